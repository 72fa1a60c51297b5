#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "solarfc/time.hpp"

namespace solarfc {

struct SiteMeta {
  std::string site_id;
  double latitude_deg = 0.0;    // [-90, 90]
  double longitude_deg = 0.0;   // [-180, 180], east positive
  double elevation_m = 0.0;

  void validate() const;
};

// The 20 measured fields, in canonical column order.
constexpr int kFieldCount = 20;

extern const std::array<const char*, kFieldCount> kFieldNames;

int field_index(const std::string& name);  // -1 if unknown

// One timestamped station observation. Fields carry NaN when absent;
// sentinel values and nonzero-QC readings are mapped to absent at parse
// time. QC flags are kept for inspection.
struct RadiationRecord {
  EpochMinute timestamp = 0;
  std::array<double, kFieldCount> values{};  // NaN = absent
  std::array<int, kFieldCount> qc{};

  bool has(int field) const;
  std::optional<double> get(int field) const;

  // Equality over timestamp and field values/absence (QC excluded).
  bool same_observations(const RadiationRecord& other) const;
};

// Parse one station daily file: two header lines (station name; lat/lon/
// elevation) then whitespace-delimited rows of 48 columns — year, julian
// day, month, day, hour, minute, decimal time, zenith, then 20 value/QC
// pairs. Records come out sorted, strictly increasing in time.
std::vector<RadiationRecord> parse_day_file(std::istream& content, const SiteMeta& site);

// Load and merge every daily file for the given years found under root.
// Files are discovered recursively; any regular file whose first data row
// parses is accepted. Duplicate timestamps across files are an error.
std::vector<RadiationRecord> load_range(const std::string& root_path, const SiteMeta& site,
                                        const std::vector<int>& years);

// Canonical internal CSV: header `timestamp,dw_solar,...,pressure`,
// ISO-8601 UTC timestamps, empty cell = absent.
void write_canonical_csv(std::ostream& out, const std::vector<RadiationRecord>& records);
std::vector<RadiationRecord> read_canonical_csv(std::istream& in);

}  // namespace solarfc
