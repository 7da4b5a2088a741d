#include "tsf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tsf/error.hpp"
#include "tsf/timeutil.hpp"

namespace tsf {

const char* const kRawCsvHeader = "No,year,month,day,hour,pm2.5,DEWP,TEMP,PRES,cbwd,Iws,Is,Ir";

namespace {

const char* const kColumnNames[13] = {"No",   "year", "month", "day", "hour",
                                      "pm2.5", "DEWP", "TEMP",  "PRES", "cbwd",
                                      "Iws",  "Is",   "Ir"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& tok, std::size_t row, const char* col) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("row " + std::to_string(row) + ": non-numeric value '" + tok +
                         "' in column " + col);
    return v;
}

std::int64_t parse_int(const std::string& tok, std::size_t row, const char* col) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("row " + std::to_string(row) + ": non-integer value '" + tok +
                         "' in column " + col);
    return v;
}

void require_not_na(const std::string& tok, std::size_t row, const char* col) {
    if (tok == "NA")
        throw ParseError("row " + std::to_string(row) + ": NA in column " + col +
                         " (only pm2.5 may be missing)");
}

void format_double(double v, std::ostream& out) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

}  // namespace

std::vector<RawRecord> parse_raw_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty input: missing header");
    const auto header = split_csv_line(line);
    const auto expected = split_csv_line(kRawCsvHeader);
    if (header.size() != expected.size())
        throw SchemaError("header has " + std::to_string(header.size()) +
                          " columns, expected " + std::to_string(expected.size()));
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (header[i] != expected[i])
            throw SchemaError("header column " + std::to_string(i + 1) + " is '" +
                              header[i] + "', expected '" + expected[i] + "'");
    }

    std::vector<RawRecord> records;
    std::size_t row = 1;  // data row number, matching the file's No column layout
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 13)
            throw ParseError("row " + std::to_string(row) + ": expected 13 fields, got " +
                             std::to_string(f.size()));
        for (std::size_t i = 0; i < 13; ++i)
            if (i != 5) require_not_na(f[i], row, kColumnNames[i]);

        RawRecord r;
        r.row_no = parse_int(f[0], row, "No");
        r.year = static_cast<int>(parse_int(f[1], row, "year"));
        r.month = static_cast<int>(parse_int(f[2], row, "month"));
        r.day = static_cast<int>(parse_int(f[3], row, "day"));
        r.hour = static_cast<int>(parse_int(f[4], row, "hour"));
        if (f[5] != "NA") r.pm25 = parse_double(f[5], row, "pm2.5");
        r.dewp = parse_double(f[6], row, "DEWP");
        r.temp = parse_double(f[7], row, "TEMP");
        r.pres = parse_double(f[8], row, "PRES");
        r.cbwd = f[9];
        r.iws = parse_double(f[10], row, "Iws");
        r.is_snow = parse_double(f[11], row, "Is");
        r.ir_rain = parse_double(f[12], row, "Ir");

        if (r.row_no <= 0)
            throw ParseError("row " + std::to_string(row) + ": No must be positive");
        if (r.month < 1 || r.month > 12)
            throw ParseError("row " + std::to_string(row) + ": month out of range");
        if (r.day < 1 || r.day > 31)
            throw ParseError("row " + std::to_string(row) + ": day out of range");
        if (r.hour < 0 || r.hour > 23)
            throw ParseError("row " + std::to_string(row) + ": hour out of range");
        if (r.pm25 && *r.pm25 < 0.0)
            throw ParseError("row " + std::to_string(row) + ": negative pm2.5");

        records.push_back(std::move(r));
        ++row;
    }
    return records;
}

void write_raw_csv(const std::vector<RawRecord>& records, std::ostream& out) {
    out << kRawCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.row_no << ',' << r.year << ',' << r.month << ',' << r.day << ','
            << r.hour << ',';
        if (r.pm25)
            format_double(*r.pm25, out);
        else
            out << "NA";
        out << ',';
        format_double(r.dewp, out);
        out << ',';
        format_double(r.temp, out);
        out << ',';
        format_double(r.pres, out);
        out << ',' << r.cbwd << ',';
        format_double(r.iws, out);
        out << ',';
        format_double(r.is_snow, out);
        out << ',';
        format_double(r.ir_rain, out);
        out << '\n';
    }
}

BuildResult build_feature_table(const std::vector<RawRecord>& records,
                                const FeatureConfig& config) {
    BuildResult result;
    FeatureTable& t = result.table;

    // One-hot levels in first-appearance order, over kept rows.
    std::vector<const RawRecord*> kept;
    kept.reserve(records.size());
    for (const auto& r : records) {
        if (!r.pm25) {
            ++result.dropped_rows;
            continue;
        }
        kept.push_back(&r);
        if (std::find(t.category_levels.begin(), t.category_levels.end(), r.cbwd) ==
            t.category_levels.end())
            t.category_levels.push_back(r.cbwd);
    }
    if (kept.empty()) throw DataError("no rows left after dropping missing pm2.5");

    t.column_names = {"PM2.5", "DEWP", "TEMP", "PRES", "Iws", "Is", "Ir"};
    for (const auto& level : t.category_levels)
        t.column_names.push_back("cbwd_" + level);
    if (config.cyclical_time) {
        t.column_names.push_back("hour_sin");
        t.column_names.push_back("hour_cos");
        t.column_names.push_back("month_sin");
        t.column_names.push_back("month_cos");
    }

    const std::size_t m = t.column_names.size();
    const std::size_t onehot_base = 7;
    t.features.assign(kept.size() * m, 0.0);
    t.target.resize(kept.size());
    t.timestamps.resize(kept.size());

    for (std::size_t i = 0; i < kept.size(); ++i) {
        const RawRecord& r = *kept[i];
        t.timestamps[i] = hours_from_civil(r.year, r.month, r.day, r.hour);
        if (i > 0 && t.timestamps[i] <= t.timestamps[i - 1])
            throw DataError("timestamps not strictly increasing at kept row " +
                            std::to_string(i));
        if (i > 0 && t.timestamps[i] != t.timestamps[i - 1] + 1) ++result.gap_count;

        double* row = t.features.data() + i * m;
        row[0] = *r.pm25;
        row[1] = r.dewp;
        row[2] = r.temp;
        row[3] = r.pres;
        row[4] = r.iws;
        row[5] = r.is_snow;
        row[6] = r.ir_rain;
        const auto it =
            std::find(t.category_levels.begin(), t.category_levels.end(), r.cbwd);
        row[onehot_base + static_cast<std::size_t>(it - t.category_levels.begin())] = 1.0;
        if (config.cyclical_time) {
            const std::size_t base = onehot_base + t.category_levels.size();
            const double two_pi = 2.0 * std::numbers::pi;
            row[base + 0] = std::sin(two_pi * r.hour / 24.0);
            row[base + 1] = std::cos(two_pi * r.hour / 24.0);
            row[base + 2] = std::sin(two_pi * (r.month - 1) / 12.0);
            row[base + 3] = std::cos(two_pi * (r.month - 1) / 12.0);
        }
        t.target[i] = *r.pm25;
    }
    return result;
}

void write_feature_table_csv(const FeatureTable& table, std::ostream& out) {
    out << "timestamp";
    for (const auto& name : table.column_names) out << ',' << name;
    out << ",target\n";
    const std::size_t m = table.num_cols();
    for (std::size_t i = 0; i < table.num_rows(); ++i) {
        out << format_hour_iso(table.timestamps[i]);
        for (std::size_t j = 0; j < m; ++j) {
            out << ',';
            format_double(table.features[i * m + j], out);
        }
        out << ',';
        format_double(table.target[i], out);
        out << '\n';
    }
}

}  // namespace tsf
