#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tsf/error.hpp"
#include "tsf/pipeline.hpp"
#include "tsf/rng.hpp"

using namespace tsf;

namespace {

/// Univariate table with the given target values; feature column 0 mirrors
/// the target, column 1 is a ramp.
FeatureTable make_table(const std::vector<double>& target) {
    FeatureTable t;
    t.column_names = {"PM2.5", "ramp"};
    t.target = target;
    t.timestamps.resize(target.size());
    t.features.resize(target.size() * 2);
    for (std::size_t i = 0; i < target.size(); ++i) {
        t.timestamps[i] = static_cast<std::int64_t>(i);
        t.features[i * 2] = target[i];
        t.features[i * 2 + 1] = static_cast<double>(i);
    }
    return t;
}

FeatureTable ramp_table(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    return make_table(v);
}

}  // namespace

TEST_CASE("chrono split sizes") {
    auto [train, test] = chrono_split(ramp_table(10), 0.7);
    CHECK(train.num_rows() == 7);
    CHECK(test.num_rows() == 3);

    auto [train2, test2] = chrono_split(ramp_table(43800), 0.7);
    CHECK(train2.num_rows() == 30660);
    CHECK(test2.num_rows() == 13140);

    auto [train3, test3] = chrono_split(ramp_table(10), 0.999);
    CHECK(train3.num_rows() == 9);
    CHECK(test3.num_rows() == 1);

    CHECK_THROWS_AS(chrono_split(ramp_table(10), 0.01), DataError);
    CHECK_THROWS_AS(chrono_split(ramp_table(10), 1.5), ContractError);
}

TEST_CASE("chrono split preserves order and content") {
    Rng rng(8);
    for (int iter = 0; iter < 20; ++iter) {
        const std::size_t n = 4 + rng.below(40);
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(-10, 10);
        const auto table = make_table(v);
        const double fraction = 0.3 + 0.5 * rng.uniform();
        auto [train, test] = chrono_split(table, fraction);
        REQUIRE(train.num_rows() + test.num_rows() == n);
        std::vector<double> joined = train.target;
        joined.insert(joined.end(), test.target.begin(), test.target.end());
        CHECK(joined == table.target);
    }
}

TEST_CASE("min-max fitting") {
    auto scaler = fit_minmax(make_table({0, 10}));
    CHECK(scaler.mins[0] == 0.0);
    CHECK(scaler.maxs[0] == 10.0);
    CHECK(!scaler.constant[0]);

    auto flat = fit_minmax(make_table({5, 5, 5}));
    CHECK(flat.constant[0]);
    CHECK(!flat.constant[1]);  // the ramp column still varies
    CHECK(flat.target_constant);

    FeatureTable two;
    two.column_names = {"a", "b"};
    two.features = {1, 3, 2, 4};
    two.target = {0, 1};
    two.timestamps = {0, 1};
    auto s = fit_minmax(two);
    CHECK(s.mins == std::vector<double>{1, 3});
    CHECK(s.maxs == std::vector<double>{2, 4});
}

TEST_CASE("scaling follows the min-max formula") {
    const auto table = make_table({0, 5, 10});
    const auto scaler = fit_minmax(table);
    const auto scaled = apply_scale(scaler, table);
    CHECK(scaled.feature(1, 0) == 0.5);
    CHECK(scaled.target[1] == 0.5);

    // Out-of-range values pass through unclipped.
    const auto outside = apply_scale(scaler, make_table({12}));
    CHECK(outside.feature(0, 0) == doctest::Approx(1.2).epsilon(1e-15));

    FeatureTable renamed = table;
    renamed.column_names[1] = "other";
    CHECK_THROWS_AS(apply_scale(scaler, renamed), SchemaError);
}

TEST_CASE("constant columns scale to zero") {
    const auto table = make_table({5, 5, 5});
    const auto scaled = apply_scale(fit_minmax(table), table);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(scaled.feature(i, 0) == 0.0);
        CHECK(scaled.target[i] == 0.0);
    }
}

TEST_CASE("unscale_target inverts scale") {
    Rng rng(21);
    std::vector<double> values(200);
    for (double& v : values) v = rng.uniform(-300.0, 300.0);
    const auto table = make_table(values);
    const auto scaler = fit_minmax(table);
    const auto scaled = apply_scale(scaler, table);
    const auto recovered = unscale_target(scaler, scaled.target);
    for (std::size_t i = 0; i < values.size(); ++i)
        CHECK(std::abs(recovered[i] - values[i]) <= 1e-12 * std::max(1.0, std::abs(values[i])));
}

TEST_CASE("window construction matches the alignment tables") {
    const auto table = ramp_table(8);
    const auto scaler = fit_minmax(table);
    const auto scaled = apply_scale(scaler, table);

    SUBCASE("single step: w=3, k=1") {
        const auto ds = WindowedDataset::build(scaled, 3, 1);
        REQUIRE(ds.size() == 5);
        CHECK(ds.start_row(0) == 0);
        CHECK(ds.label_row(0) == 3);  // x(1..3) -> y(4) in 1-based terms
        CHECK(ds.label(0) == scaled.target[3]);
        CHECK(ds.label_row(4) == 7);
    }
    SUBCASE("multi step: w=3, k=3") {
        const auto ds = WindowedDataset::build(scaled, 3, 3);
        REQUIRE(ds.size() == 3);
        CHECK(ds.label_row(0) == 5);  // x(1..3) -> y(6)
        CHECK(ds.label_row(2) == 7);
    }
    SUBCASE("too short for any sample") {
        const auto ds = WindowedDataset::build(apply_scale(fit_minmax(ramp_table(3)), ramp_table(3)), 3, 1);
        CHECK(ds.size() == 0);
        CHECK(ds.empty());
    }
    SUBCASE("w or k below one is a contract error") {
        CHECK_THROWS_AS(WindowedDataset::build(scaled, 0, 1), ContractError);
        CHECK_THROWS_AS(WindowedDataset::build(scaled, 3, 0), ContractError);
    }
}

TEST_CASE("random sweep: count formula and brute-force re-slicing") {
    Rng rng(33);
    for (int iter = 0; iter < 60; ++iter) {
        const std::size_t total = 1 + rng.below(50);
        const std::size_t w = 1 + rng.below(8);
        const std::size_t k = 1 + rng.below(5);
        std::vector<double> v(total);
        for (double& x : v) x = rng.uniform(0, 1);
        const auto table = make_table(v);
        const auto ds = WindowedDataset::build(table, w, k);

        const std::size_t expect =
            total < w + k ? 0 : total - w - k + 1;
        REQUIRE(ds.size() == expect);

        for (std::size_t i = 0; i < ds.size(); ++i) {
            for (std::size_t t = 0; t < w; ++t)
                for (std::size_t f = 0; f < table.num_cols(); ++f)
                    CHECK(ds.input(i, t, f) == table.feature(i + t, f));
            CHECK(ds.label(i) == table.target[i + w - 1 + k]);
        }
    }
}

TEST_CASE("strict gap mode drops samples that span a seam") {
    auto table = ramp_table(10);
    // Knock an hour out of the middle of the timeline.
    for (std::size_t i = 5; i < 10; ++i) table.timestamps[i] += 1;
    const auto loose = WindowedDataset::build(table, 3, 1);
    const auto strict = WindowedDataset::build(table, 3, 1, true);
    CHECK(loose.size() == 7);
    // Samples covering rows {4,5} in their [start, label] span are gone.
    CHECK(strict.size() == 4);
    for (std::size_t i = 0; i < strict.size(); ++i) {
        const std::size_t start = strict.start_row(i);
        const std::size_t last = strict.label_row(i);
        for (std::size_t r = start; r < last; ++r)
            CHECK(table.timestamps[r + 1] == table.timestamps[r] + 1);
    }
}

TEST_CASE("gather helpers agree with per-element access") {
    const auto table = ramp_table(12);
    const auto ds = WindowedDataset::build(table, 4, 2);
    const std::vector<std::size_t> idx{2, 0, 5};
    const Tensor step = ds.gather_step(idx, 1);
    REQUIRE(step.rows() == 2);
    REQUIRE(step.cols() == 3);
    for (std::size_t b = 0; b < idx.size(); ++b)
        for (std::size_t f = 0; f < 2; ++f)
            CHECK(step.at(f, b) == ds.input(idx[b], 1, f));
    const Tensor labels = ds.gather_labels(idx);
    for (std::size_t b = 0; b < idx.size(); ++b)
        CHECK(labels.at(0, b) == ds.label(idx[b]));
    const Tensor win = ds.window_matrix(3);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t f = 0; f < 2; ++f)
            CHECK(win.at(f, t) == ds.input(3, t, f));
}

TEST_CASE("window export carries the documented layout") {
    const auto ds = WindowedDataset::build(ramp_table(6), 2, 1);
    std::ostringstream out;
    write_windows_csv(ds, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "4,2,2,1");
    std::string first;
    std::getline(in, first);
    // rows 0..1 of [target, ramp] then the label at row 2
    CHECK(first == "0,0,1,1,2");
}
