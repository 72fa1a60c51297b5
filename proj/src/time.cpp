#include "solarfc/time.hpp"

#include <cstdio>

namespace solarfc {

std::string format_iso(EpochMinute m) {
  CivilTime c = to_civil(m);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02dZ", c.year, c.month, c.day, c.hour,
                c.minute);
  return buf;
}

EpochMinute parse_iso(const std::string& text) {
  CivilTime c;
  int sec = 0;
  int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &c.year, &c.month, &c.day, &c.hour,
                      &c.minute, &sec);
  if (n < 5 || sec != 0 || c.hour > 23 || c.minute > 59 || c.hour < 0 || c.minute < 0) {
    throw format_error("unparseable timestamp '" + text + "'");
  }
  return to_epoch_minute(c);
}

}  // namespace solarfc
