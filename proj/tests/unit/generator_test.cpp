#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "../support/fixtures.hpp"
#include "smas/analytics/exogenous.hpp"
#include "smas/core/store.hpp"
#include "smas/error.hpp"
#include "smas/ingest/generator.hpp"
#include "smas/json_io.hpp"

using namespace smas;
using namespace smas::ingest;

namespace {
std::string render(const GeneratorSpec& spec) {
  SyntheticGenerator g(spec);
  std::vector<core::HourlyReading> rows;
  g.for_each_reading([&](const core::HourlyReading& r) { rows.push_back(r); });
  std::ostringstream out;
  write_meter_csv(out, rows, true);
  out << json_io::dump(g.labels_json());
  return out.str();
}
}  // namespace

TEST(Generator, SameSpecSameBytes) {
  auto spec = fixtures::parx_spec(3, 30, 0.05, 99);
  spec.random_anomalies_per_series = 1;
  const auto a = render(spec);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, render(spec));
  spec.rng_seed = 100;
  EXPECT_NE(a, render(spec));
}

TEST(Generator, NoiseFreeSeriesSatisfiesRecursion) {
  SyntheticGenerator gen(fixtures::parx_spec(2, 40, 0.0, 5));
  for (std::size_t i = 0; i < 2; ++i) {
    const auto s = gen.series(i);
    const auto& l = gen.labels()[i];
    for (std::size_t k = 3 * 24; k < s.size(); ++k) {
      const auto h = k % 24;
      const auto x = analytics::exogenous_transform(s.temperature[k]);
      double y = l.intercept_weekday[h];
      for (std::size_t j = 0; j < 3; ++j) y += l.alpha[h][j] * s.consumption[k - 24 * (j + 1)];
      y += l.beta[h][0] * x.xt1 + l.beta[h][1] * x.xt2 + l.beta[h][2] * x.xt3;
      ASSERT_NEAR(s.consumption[k], std::max(0.0, y), 1e-12) << k;
    }
  }
}

TEST(Generator, InjectionsScaleOnlyObservedDay) {
  auto spec = fixtures::parx_spec(1, 30, 0.0, 5);
  SyntheticGenerator clean(spec);
  spec.injections = {{0, 20, 3.0}};
  SyntheticGenerator dirty(spec);
  const auto a = clean.series(0);
  const auto b = dirty.series(0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double factor = k / 24 == 20 ? 3.0 : 1.0;
    ASSERT_DOUBLE_EQ(b.consumption[k], a.consumption[k] * factor);
  }
  ASSERT_EQ(dirty.labels()[0].anomalies.size(), 1u);
  EXPECT_EQ(format_date(dirty.labels()[0].anomalies[0].day), "2014-01-21");
}

TEST(Generator, SeriesAreIndependentOfCallOrder) {
  SyntheticGenerator gen(fixtures::parx_spec(4, 20, 0.05, 12));
  const auto third = gen.series(2);
  (void)gen.series(0);
  EXPECT_EQ(gen.series(2).consumption, third.consumption);
}

TEST(Generator, SpecValidation) {
  GeneratorSpec spec;
  spec.n_series = 0;
  EXPECT_THROW(SyntheticGenerator{spec}, Error);
  spec.n_series = 1;
  spec.span_hours = 10;
  EXPECT_THROW(SyntheticGenerator{spec}, Error);
}

TEST(Generator, SeedProfileFromSeries) {
  SyntheticGenerator gen(fixtures::parx_spec(1, 60, 0.0, 1));
  const auto p = seed_profile_from_series(gen.series(0), "copy");
  for (double v : p.weekday) EXPECT_GT(v, 0.0);
  EXPECT_EQ(p.name, "copy");
}

TEST(Generator, StoredBytesPerTwoYearSeries) {
  // One two-year hourly series occupies 17,520 fixed-size records.
  const std::size_t per_series = 17520 * core::kRecordBytes;
  EXPECT_EQ(per_series, 630720u);
  // Series that fit in one gigabyte (1e9 bytes) of partition files.
  EXPECT_EQ(1'000'000'000 / per_series, 1585u);
}
