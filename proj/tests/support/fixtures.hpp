#pragma once

#include "smas/ingest/generator.hpp"

namespace smas::fixtures {

/// Climate warm and variable enough that every hour of day sees all three
/// temperature regimes within a year.
inline ingest::TemperatureModel wide_climate() {
  ingest::TemperatureModel t;
  t.mean_c = 13.0;
  t.annual_amplitude_c = 14.0;
  t.diurnal_amplitude_c = 3.0;
  t.noise_sigma_c = 3.0;
  return t;
}

/// Profile whose weekday and weekend levels coincide, so the PARX recursion has
/// one intercept per season.
inline ingest::SeedProfile uniform_profile(double level = 1.0) {
  ingest::SeedProfile p;
  p.name = "uniform";
  p.weekday.fill(level);
  p.weekend.fill(level);
  return p;
}

/// Generator spec matching the coefficient-recovery setup: alpha = [0.3, 0.1, 0.1],
/// beta = [0.2, -0.03, 0.05], intercept 0.5.
inline ingest::GeneratorSpec parx_spec(std::size_t n_series, std::size_t days, double noise, std::uint64_t seed) {
  ingest::GeneratorSpec spec;
  spec.n_series = n_series;
  spec.span_hours = days * 24;
  spec.noise_sigma = noise;
  spec.temperature = wide_climate();
  spec.seed_profiles = {uniform_profile()};
  spec.coefficients.intercept = 0.5;
  spec.rng_seed = seed;
  return spec;
}

}  // namespace smas::fixtures
