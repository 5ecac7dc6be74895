#include "fraudlab/time_util.hpp"

#include <cstdio>
#include <stdexcept>

namespace fraudlab {

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

TimestampMs to_timestamp(const CivilTime& c) {
  const std::int64_t days = days_from_civil(c.year, c.month, c.day);
  return ((days * 24 + c.hour) * 60 + c.minute) * 60 * kMsPerSecond +
         c.second * kMsPerSecond + c.millisecond;
}

CivilTime to_civil(TimestampMs t) {
  CivilTime c;
  std::int64_t days = day_index(t);
  std::int64_t ms = t - days * kMsPerDay;
  civil_from_days(days, c.year, c.month, c.day);
  c.hour = static_cast<int>(ms / (3600 * kMsPerSecond));
  ms -= static_cast<std::int64_t>(c.hour) * 3600 * kMsPerSecond;
  c.minute = static_cast<int>(ms / (60 * kMsPerSecond));
  ms -= static_cast<std::int64_t>(c.minute) * 60 * kMsPerSecond;
  c.second = static_cast<int>(ms / kMsPerSecond);
  c.millisecond = static_cast<int>(ms % kMsPerSecond);
  return c;
}

int day_of_week(TimestampMs t) {
  // 1970-01-01 was a Thursday (=3 with Monday=0)
  std::int64_t d = (day_index(t) + 3) % 7;
  if (d < 0) d += 7;
  return static_cast<int>(d);
}

TimestampMs parse_iso8601(const std::string& s) {
  CivilTime c;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%n", &c.year, &c.month, &c.day,
                  &c.hour, &c.minute, &c.second, &consumed) != 6) {
    throw std::invalid_argument("bad timestamp: " + s);
  }
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int frac = 0, digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9' && digits < 3) {
      frac = frac * 10 + (s[pos] - '0');
      ++pos;
      ++digits;
    }
    while (digits++ < 3) frac *= 10;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;  // truncate
    c.millisecond = frac;
  }
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) ++pos;
  if (pos != s.size()) throw std::invalid_argument("bad timestamp: " + s);
  if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 ||
      c.minute > 59 || c.second > 60) {
    throw std::invalid_argument("bad timestamp: " + s);
  }
  return to_timestamp(c);
}

std::string format_iso8601(TimestampMs t) {
  const CivilTime c = to_civil(t);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", c.year,
                c.month, c.day, c.hour, c.minute, c.second, c.millisecond);
  return buf;
}

}  // namespace fraudlab
