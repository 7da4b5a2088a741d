#include "tsf/synth.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "tsf/rng.hpp"
#include "tsf/timeutil.hpp"

namespace tsf {

void write_synthetic_raw_csv(std::ostream& out, const SynthConfig& config) {
    Rng rng(config.seed);
    out << kRawCsvHeader << '\n';

    const std::int64_t start = hours_from_civil(2010, 1, 1, 0);
    const char* const directions[4] = {"NW", "cv", "NE", "SE"};
    std::size_t dir = 0;
    double pm = 80.0;
    double iws = 1.0;
    const double two_pi = 2.0 * std::numbers::pi;

    for (std::size_t i = 0; i < config.rows; ++i) {
        const std::int64_t ts = start + static_cast<std::int64_t>(i);
        int y, mo, d;
        civil_from_days(ts / 24, y, mo, d);
        const int hour = static_cast<int>(ts % 24);

        const double diurnal = 25.0 * std::sin(two_pi * hour / 24.0);
        const double seasonal = 30.0 * std::sin(two_pi * static_cast<double>(i) / (24.0 * 365.0));
        pm = 0.92 * pm + 0.08 * (90.0 + seasonal) + diurnal * 0.2 +
             rng.uniform(-12.0, 12.0);
        if (pm < 0.0) pm = 0.0;

        const double temp = 12.0 + 14.0 * std::sin(two_pi * (static_cast<double>(i) / (24.0 * 365.0) - 0.25)) +
                            5.0 * std::sin(two_pi * (hour - 14) / 24.0) + rng.uniform(-1.5, 1.5);
        const double dewp = temp - 8.0 + rng.uniform(-2.0, 2.0);
        const double pres = 1016.0 + 8.0 * std::sin(two_pi * static_cast<double>(i) / (24.0 * 30.0)) +
                            rng.uniform(-2.0, 2.0);

        if (rng.uniform() < 0.12) {
            dir = static_cast<std::size_t>(rng.below(4));
            iws = 1.0;
        } else {
            iws += rng.uniform(0.5, 3.0);
        }
        const double is_snow = (mo == 12 || mo <= 2) && rng.uniform() < 0.02 ? 1.0 : 0.0;
        const double ir_rain = (mo >= 6 && mo <= 8) && rng.uniform() < 0.03 ? 1.0 : 0.0;

        out << (i + 1) << ',' << y << ',' << mo << ',' << d << ',' << hour << ',';
        if (rng.uniform() < config.na_rate)
            out << "NA";
        else
            out << std::llround(pm);
        out << ',' << std::llround(dewp) << ',' << std::llround(temp) << ','
            << std::llround(pres) << ',' << directions[dir] << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", iws);
        out << buf << ',' << is_snow << ',' << ir_rain << '\n';
    }
}

FeatureTable make_sinusoid_table(std::size_t length, double period, double amplitude,
                                 double offset) {
    FeatureTable t;
    t.column_names = {"value"};
    t.timestamps.resize(length);
    t.features.resize(length);
    t.target.resize(length);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < length; ++i) {
        const double v = offset + amplitude * std::sin(two_pi * static_cast<double>(i) / period);
        t.timestamps[i] = static_cast<std::int64_t>(i);
        t.features[i] = v;
        t.target[i] = v;
    }
    return t;
}

}  // namespace tsf
