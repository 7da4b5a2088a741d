#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsf/ingest.hpp"
#include "tsf/tensor.hpp"

namespace tsf {

/// Splits rows chronologically: the first floor(train_fraction * T) rows go
/// to train, the rest to test. Throws DataError if either side is empty.
std::pair<FeatureTable, FeatureTable> chrono_split(const FeatureTable& table,
                                                   double train_fraction);

/// Per-column min/max fitted on one table (normally the training split).
struct Scaler {
    std::vector<std::string> column_names;
    std::vector<double> mins;
    std::vector<double> maxs;
    std::vector<bool> constant;  // max == min; such columns scale to 0
    double target_min = 0.0;
    double target_max = 0.0;
    bool target_constant = false;

    double target_range() const { return target_max - target_min; }
};

Scaler fit_minmax(const FeatureTable& train);

/// (x - min) / (max - min) per column, target included. Values outside the
/// fitted range map outside [0, 1]; nothing is clipped.
FeatureTable apply_scale(const Scaler& scaler, const FeatureTable& table);

std::vector<double> unscale_target(const Scaler& scaler, std::span<const double> values);
double unscale_target(const Scaler& scaler, double value);

/// Supervised sliding-window view over a (scaled) table. Sample i's input
/// is rows [i, i+w-1]; its label is the target at row i+w-1+k. Samples are
/// views into shared storage, not copies.
class WindowedDataset {
public:
    WindowedDataset() = default;

    /// strict_gaps skips samples whose row span crosses a timestamp gap.
    static WindowedDataset build(const FeatureTable& scaled_table, std::size_t w,
                                 std::size_t k, bool strict_gaps = false);

    std::size_t size() const { return sample_starts_.size(); }
    bool empty() const { return sample_starts_.empty(); }
    std::size_t window_size() const { return w_; }
    std::size_t horizon() const { return k_; }
    std::size_t num_features() const { return m_; }

    double label(std::size_t i) const;
    std::size_t start_row(std::size_t i) const { return sample_starts_[i]; }
    std::size_t label_row(std::size_t i) const;
    std::int64_t label_timestamp(std::size_t i) const;
    double input(std::size_t i, std::size_t t, std::size_t f) const;

    /// Scaled target at an absolute table row (teacher-forcing lookups).
    double target_at_row(std::size_t row) const;

    /// m x B tensor of the inputs at window offset t for the given samples.
    Tensor gather_step(std::span<const std::size_t> idx, std::size_t t) const;
    /// 1 x B tensor of labels for the given samples.
    Tensor gather_labels(std::span<const std::size_t> idx) const;
    /// m x w matrix (columns are time steps) for one sample.
    Tensor window_matrix(std::size_t i) const;

private:
    struct Storage {
        std::vector<double> features;  // T x m
        std::vector<double> target;    // T
        std::vector<std::int64_t> timestamps;
    };
    std::shared_ptr<const Storage> storage_;
    std::vector<std::size_t> sample_starts_;
    std::size_t w_ = 0;
    std::size_t k_ = 0;
    std::size_t m_ = 0;
};

/// Debug dump: `N,w,m,k` header line, then per sample the w x m input block
/// (row-major) followed by the label, one sample per line.
void write_windows_csv(const WindowedDataset& ds, std::ostream& out);

}  // namespace tsf
