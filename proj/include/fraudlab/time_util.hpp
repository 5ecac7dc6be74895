#pragma once

#include <cstdint>
#include <string>

namespace fraudlab {

// All timestamps are UTC milliseconds since the Unix epoch, proleptic
// Gregorian calendar.
using TimestampMs = std::int64_t;

constexpr std::int64_t kMsPerSecond = 1000;
constexpr std::int64_t kMsPerDay = 86400LL * kMsPerSecond;

struct CivilTime {
  int year = 1970;
  int month = 1;  // 1-12
  int day = 1;    // 1-31
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millisecond = 0;
};

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
std::int64_t days_from_civil(int y, int m, int d);
void civil_from_days(std::int64_t z, int& y, int& m, int& d);

TimestampMs to_timestamp(const CivilTime& c);
CivilTime to_civil(TimestampMs t);

// 0 = Monday ... 6 = Sunday
int day_of_week(TimestampMs t);

// UTC calendar day index (days since epoch), used for spending-spree counts
inline std::int64_t day_index(TimestampMs t) {
  // floor division for pre-epoch times
  return t >= 0 ? t / kMsPerDay : (t - kMsPerDay + 1) / kMsPerDay;
}

// Parses "YYYY-MM-DDTHH:MM:SS.mmmZ" (milliseconds optional, trailing Z
// optional). Throws std::invalid_argument on malformed input.
TimestampMs parse_iso8601(const std::string& s);

// Formats with milliseconds and trailing Z.
std::string format_iso8601(TimestampMs t);

}  // namespace fraudlab
