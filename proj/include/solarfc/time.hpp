#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "solarfc/errors.hpp"

namespace solarfc {

// All station data is minute-resolution UTC. Timestamps are carried as
// minutes since the Unix epoch, which makes grid arithmetic exact.
using EpochMinute = std::int64_t;

struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
};

inline EpochMinute to_epoch_minute(const CivilTime& c) {
  using namespace std::chrono;
  year_month_day ymd{year{c.year}, month{unsigned(c.month)}, day{unsigned(c.day)}};
  if (!ymd.ok()) {
    throw format_error("invalid civil date " + std::to_string(c.year) + "-" +
                       std::to_string(c.month) + "-" + std::to_string(c.day));
  }
  sys_days d{ymd};
  return d.time_since_epoch().count() * 1440LL + c.hour * 60LL + c.minute;
}

inline CivilTime to_civil(EpochMinute m) {
  using namespace std::chrono;
  std::int64_t days = m / 1440;
  std::int64_t rem = m % 1440;
  if (rem < 0) {
    days -= 1;
    rem += 1440;
  }
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  CivilTime c;
  c.year = int(ymd.year());
  c.month = int(unsigned(ymd.month()));
  c.day = int(unsigned(ymd.day()));
  c.hour = int(rem / 60);
  c.minute = int(rem % 60);
  return c;
}

inline int year_of(EpochMinute m) { return to_civil(m).year; }

inline int day_of_year(EpochMinute m) {
  using namespace std::chrono;
  CivilTime c = to_civil(m);
  sys_days d{year_month_day{year{c.year}, month{unsigned(c.month)}, day{unsigned(c.day)}}};
  sys_days jan1{year_month_day{year{c.year}, month{1}, day{1}}};
  return int((d - jan1).count()) + 1;
}

// ISO-8601 "YYYY-MM-DDTHH:MMZ" (seconds always zero at minute resolution).
std::string format_iso(EpochMinute m);
EpochMinute parse_iso(const std::string& text);

}  // namespace solarfc
