#include "tsf/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "tsf/error.hpp"

namespace tsf {

namespace {

FeatureTable slice_table(const FeatureTable& t, std::size_t begin, std::size_t count) {
    FeatureTable out;
    out.column_names = t.column_names;
    out.category_levels = t.category_levels;
    const std::size_t m = t.num_cols();
    out.timestamps.assign(t.timestamps.begin() + begin,
                          t.timestamps.begin() + begin + count);
    out.target.assign(t.target.begin() + begin, t.target.begin() + begin + count);
    out.features.assign(t.features.begin() + begin * m,
                        t.features.begin() + (begin + count) * m);
    return out;
}

void write_double(double v, std::ostream& out) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

}  // namespace

std::pair<FeatureTable, FeatureTable> chrono_split(const FeatureTable& table,
                                                   double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ContractError("chrono_split: train_fraction must be in (0, 1)");
    const std::size_t total = table.num_rows();
    // The nudge absorbs representation error in fractions like 0.7 so the
    // floor matches exact decimal arithmetic.
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(total) + 1e-9));
    if (n_train == 0 || n_train >= total)
        throw DataError("chrono_split: empty partition (T=" + std::to_string(total) +
                        ", fraction=" + std::to_string(train_fraction) + ")");
    return {slice_table(table, 0, n_train), slice_table(table, n_train, total - n_train)};
}

Scaler fit_minmax(const FeatureTable& train) {
    if (train.num_rows() == 0) throw DataError("fit_minmax: empty table");
    Scaler s;
    s.column_names = train.column_names;
    const std::size_t m = train.num_cols();
    s.mins.assign(m, std::numeric_limits<double>::infinity());
    s.maxs.assign(m, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < train.num_rows(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double v = train.feature(i, j);
            s.mins[j] = std::min(s.mins[j], v);
            s.maxs[j] = std::max(s.maxs[j], v);
        }
    }
    s.constant.resize(m);
    for (std::size_t j = 0; j < m; ++j) s.constant[j] = s.mins[j] == s.maxs[j];
    const auto [tmin, tmax] = std::minmax_element(train.target.begin(), train.target.end());
    s.target_min = *tmin;
    s.target_max = *tmax;
    s.target_constant = s.target_min == s.target_max;
    return s;
}

FeatureTable apply_scale(const Scaler& scaler, const FeatureTable& table) {
    if (table.column_names != scaler.column_names)
        throw SchemaError("scale: table columns do not match the scaler's");
    FeatureTable out = table;
    const std::size_t m = table.num_cols();
    for (std::size_t j = 0; j < m; ++j) {
        const double lo = scaler.mins[j];
        const double range = scaler.maxs[j] - lo;
        for (std::size_t i = 0; i < table.num_rows(); ++i) {
            double& v = out.features[i * m + j];
            v = scaler.constant[j] ? 0.0 : (v - lo) / range;
        }
    }
    for (double& v : out.target)
        v = scaler.target_constant ? 0.0
                                   : (v - scaler.target_min) / scaler.target_range();
    return out;
}

std::vector<double> unscale_target(const Scaler& scaler, std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v = unscale_target(scaler, v);
    return out;
}

double unscale_target(const Scaler& scaler, double value) {
    if (scaler.target_constant) return scaler.target_min;
    return value * scaler.target_range() + scaler.target_min;
}

WindowedDataset WindowedDataset::build(const FeatureTable& scaled_table, std::size_t w,
                                       std::size_t k, bool strict_gaps) {
    if (w < 1 || k < 1) throw ContractError("build_windows: w and k must be >= 1");
    WindowedDataset ds;
    ds.w_ = w;
    ds.k_ = k;
    ds.m_ = scaled_table.num_cols();
    auto storage = std::make_shared<Storage>();
    storage->features = scaled_table.features;
    storage->target = scaled_table.target;
    storage->timestamps = scaled_table.timestamps;
    ds.storage_ = std::move(storage);

    const std::size_t total = scaled_table.num_rows();
    if (total < w + k) return ds;  // zero samples, not an error
    const std::size_t n = total - w - k + 1;
    ds.sample_starts_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (strict_gaps) {
            // The sample touches rows [i, i+w-1+k]; reject any gap inside.
            bool gapped = false;
            for (std::size_t r = i; r < i + w - 1 + k; ++r) {
                if (ds.storage_->timestamps[r + 1] != ds.storage_->timestamps[r] + 1) {
                    gapped = true;
                    break;
                }
            }
            if (gapped) continue;
        }
        ds.sample_starts_.push_back(i);
    }
    return ds;
}

double WindowedDataset::label(std::size_t i) const {
    return storage_->target[label_row(i)];
}

std::size_t WindowedDataset::label_row(std::size_t i) const {
    return sample_starts_[i] + w_ - 1 + k_;
}

std::int64_t WindowedDataset::label_timestamp(std::size_t i) const {
    return storage_->timestamps[label_row(i)];
}

double WindowedDataset::input(std::size_t i, std::size_t t, std::size_t f) const {
    return storage_->features[(sample_starts_[i] + t) * m_ + f];
}

double WindowedDataset::target_at_row(std::size_t row) const {
    return storage_->target[row];
}

Tensor WindowedDataset::gather_step(std::span<const std::size_t> idx, std::size_t t) const {
    Tensor out(m_, idx.size());
    auto data = out.mutable_data();
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const double* src = storage_->features.data() + (sample_starts_[idx[b]] + t) * m_;
        for (std::size_t f = 0; f < m_; ++f) data[f * idx.size() + b] = src[f];
    }
    return out;
}

Tensor WindowedDataset::gather_labels(std::span<const std::size_t> idx) const {
    Tensor out(1, idx.size());
    auto data = out.mutable_data();
    for (std::size_t b = 0; b < idx.size(); ++b) data[b] = label(idx[b]);
    return out;
}

Tensor WindowedDataset::window_matrix(std::size_t i) const {
    Tensor out(m_, w_);
    auto data = out.mutable_data();
    for (std::size_t t = 0; t < w_; ++t) {
        const double* src = storage_->features.data() + (sample_starts_[i] + t) * m_;
        for (std::size_t f = 0; f < m_; ++f) data[f * w_ + t] = src[f];
    }
    return out;
}

void write_windows_csv(const WindowedDataset& ds, std::ostream& out) {
    out << ds.size() << ',' << ds.window_size() << ',' << ds.num_features() << ','
        << ds.horizon() << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        bool first = true;
        for (std::size_t t = 0; t < ds.window_size(); ++t) {
            for (std::size_t f = 0; f < ds.num_features(); ++f) {
                if (!first) out << ',';
                write_double(ds.input(i, t, f), out);
                first = false;
            }
        }
        out << ',';
        write_double(ds.label(i), out);
        out << '\n';
    }
}

}  // namespace tsf
