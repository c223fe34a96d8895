#include <gtest/gtest.h>

#include "smas/core/types.hpp"
#include "smas/error.hpp"
#include "smas/time.hpp"

using namespace smas;

TEST(Time, ParsesIsoVariants) {
  const auto t = parse_timestamp("2014-01-01T05:00:00Z");
  EXPECT_EQ(format_timestamp(t), "2014-01-01T05:00:00Z");
  EXPECT_EQ(parse_timestamp("2014-01-01 05:00:00"), t);
  EXPECT_EQ(parse_timestamp("2014-01-01T05:00"), t);
  EXPECT_EQ(hour_of_day(t), 5);
  EXPECT_FALSE(is_hour_aligned(parse_timestamp("2014-01-01 00:30:00")));
}

TEST(Time, RejectsGarbage) {
  EXPECT_THROW((void)parse_timestamp("2014-13-01T00:00:00Z"), Error);
  EXPECT_THROW((void)parse_timestamp("yesterday"), Error);
  EXPECT_THROW((void)parse_date("2014-02-30"), Error);
}

TEST(Time, CalendarBuckets) {
  using core::Granularity;
  const auto t = parse_timestamp("2014-01-08T13:00:00Z");  // a Wednesday
  EXPECT_EQ(format_timestamp(core::bucket_start(t, Granularity::daily)), "2014-01-08T00:00:00Z");
  EXPECT_EQ(format_timestamp(core::bucket_start(t, Granularity::weekly)), "2014-01-06T00:00:00Z");
  EXPECT_EQ(format_timestamp(core::bucket_start(t, Granularity::monthly)), "2014-01-01T00:00:00Z");
  EXPECT_EQ(format_timestamp(core::next_bucket(parse_timestamp("2014-12-01T00:00:00Z"), Granularity::monthly)),
            "2015-01-01T00:00:00Z");
  EXPECT_TRUE(is_weekend(parse_date("2014-01-11")));
  EXPECT_FALSE(is_weekend(parse_date("2014-01-10")));
}

TEST(Time, GranularityParsingListsChoices) {
  EXPECT_EQ(core::parse_granularity("weekly"), core::Granularity::weekly);
  try {
    (void)core::parse_granularity("fortnightly");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
    EXPECT_NE(std::string(e.what()).find("hourly, daily, weekly, monthly"), std::string::npos);
  }
}
