#pragma once

#include <cstdint>
#include <iosfwd>

#include "tsf/ingest.hpp"

namespace tsf {

struct SynthConfig {
    std::size_t rows = 2000;
    std::uint64_t seed = 7;
    double na_rate = 0.01;  // fraction of rows with a missing pm2.5
};

/// Deterministic synthetic data in the raw air-quality CSV schema: hourly
/// rows from 2010-01-01, an autocorrelated positive pm2.5 with diurnal and
/// seasonal swings, weather-like covariates, and NA injection.
void write_synthetic_raw_csv(std::ostream& out, const SynthConfig& config);

/// Univariate table holding offset + amplitude * sin(2*pi*t/period); the
/// single feature column equals the target.
FeatureTable make_sinusoid_table(std::size_t length, double period,
                                 double amplitude = 50.0, double offset = 100.0);

}  // namespace tsf
