#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tsf {

/// One data row of the hourly air-quality CSV, as parsed.
struct RawRecord {
    std::int64_t row_no = 0;
    int year = 0;
    int month = 0;
    int day = 0;
    int hour = 0;
    std::optional<double> pm25;  // absent when the file says NA
    double dewp = 0.0;
    double temp = 0.0;
    double pres = 0.0;
    std::string cbwd;
    double iws = 0.0;
    double is_snow = 0.0;
    double ir_rain = 0.0;

    bool operator==(const RawRecord&) const = default;
};

struct FeatureConfig {
    /// Append sin/cos encodings of hour-of-day and month as extra features.
    bool cyclical_time = false;

    bool operator==(const FeatureConfig&) const = default;
};

/// Cleaned, encoded table: one timestamp per row, all features numeric,
/// no missing values. Feature column order is
///   PM2.5, DEWP, TEMP, PRES, Iws, Is, Ir, cbwd_<level>...,
///   [hour_sin, hour_cos, month_sin, month_cos]
/// with one-hot levels in first-appearance order.
struct FeatureTable {
    std::vector<std::int64_t> timestamps;  // epoch hours, strictly increasing
    std::vector<std::string> column_names;
    std::vector<double> features;  // row-major, num_rows x num_cols
    std::vector<double> target;    // PM2.5 per row
    std::vector<std::string> category_levels;

    std::size_t num_rows() const { return target.size(); }
    std::size_t num_cols() const { return column_names.size(); }
    double feature(std::size_t r, std::size_t c) const {
        return features[r * column_names.size() + c];
    }
};

struct BuildResult {
    FeatureTable table;
    std::size_t dropped_rows = 0;  // rows removed for missing pm2.5
    std::size_t gap_count = 0;     // non-consecutive-hour seams after dropping
};

/// Exact header the source file must carry.
extern const char* const kRawCsvHeader;

/// Parses the raw CSV. `NA` is accepted only in the pm2.5 column.
std::vector<RawRecord> parse_raw_csv(std::istream& in);

/// Writes records back in the same CSV schema.
void write_raw_csv(const std::vector<RawRecord>& records, std::ostream& out);

BuildResult build_feature_table(const std::vector<RawRecord>& records,
                                const FeatureConfig& config = {});

/// Inspection dump: header `timestamp,<columns...>,target`, ISO hour stamps.
void write_feature_table_csv(const FeatureTable& table, std::ostream& out);

}  // namespace tsf
