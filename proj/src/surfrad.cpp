#include "solarfc/surfrad.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "solarfc/errors.hpp"

namespace solarfc {

const std::array<const char*, kFieldCount> kFieldNames = {
    "dw_solar", "uw_solar",    "direct_n",    "diffuse", "dw_ir",    "dw_casetemp", "dw_dometemp",
    "uw_ir",    "uw_casetemp", "uw_dometemp", "uvb",     "par",      "netsolar",    "netir",
    "totalnet", "temp_air",    "rh",          "windspd", "winddir",  "pressure"};

int field_index(const std::string& name) {
  for (int i = 0; i < kFieldCount; ++i) {
    if (name == kFieldNames[i]) return i;
  }
  return -1;
}

void SiteMeta::validate() const {
  if (site_id.empty()) throw config_error("site_id must be non-empty");
  if (latitude_deg < -90.0 || latitude_deg > 90.0)
    throw config_error("latitude out of range: " + std::to_string(latitude_deg));
  if (longitude_deg < -180.0 || longitude_deg > 180.0)
    throw config_error("longitude out of range: " + std::to_string(longitude_deg));
}

bool RadiationRecord::has(int field) const { return std::isfinite(values[size_t(field)]); }

std::optional<double> RadiationRecord::get(int field) const {
  if (!has(field)) return std::nullopt;
  return values[size_t(field)];
}

bool RadiationRecord::same_observations(const RadiationRecord& other) const {
  if (timestamp != other.timestamp) return false;
  for (int f = 0; f < kFieldCount; ++f) {
    bool a = has(f), b = other.has(f);
    if (a != b) return false;
    if (a && values[size_t(f)] != other.values[size_t(f)]) return false;
  }
  return true;
}

namespace {

// -9999.9 and company. Everything at or below this is a missing sentinel.
constexpr double kSentinelThreshold = -999.0;

bool is_sentinel(double v) { return v <= kSentinelThreshold; }

// Range checks from the record invariants; out-of-range readings are
// treated like bad-QC readings and dropped to absent.
bool in_physical_range(int field, double v) {
  const std::string name = kFieldNames[size_t(field)];
  if (name == "rh") return v >= 0.0 && v <= 100.0;
  if (name == "winddir") return v >= 0.0 && v < 360.0;
  if (name == "windspd") return v >= 0.0;
  return true;
}

}  // namespace

std::vector<RadiationRecord> parse_day_file(std::istream& content, const SiteMeta& site) {
  site.validate();
  std::string line;
  int line_no = 0;

  // Header line 1: station name (free text).
  if (!std::getline(content, line) || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw format_error("line 1: missing station-name header");
  }
  ++line_no;

  // Header line 2: latitude, longitude, elevation.
  if (!std::getline(content, line)) throw format_error("line 2: missing lat/lon/elevation header");
  ++line_no;
  {
    std::istringstream hs(line);
    double lat, lon, elev;
    if (!(hs >> lat >> lon >> elev)) {
      throw format_error("line 2: malformed lat/lon/elevation header: '" + line + "'");
    }
  }

  constexpr int kDataColumns = 48;
  std::vector<RadiationRecord> records;
  while (std::getline(content, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::vector<double> cols;
    cols.reserve(kDataColumns);
    double v;
    while (row >> v) cols.push_back(v);
    if (cols.size() != kDataColumns) {
      throw format_error("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(kDataColumns) + " columns, got " +
                         std::to_string(cols.size()));
    }

    CivilTime civil;
    civil.year = int(cols[0]);
    // cols[1] is julian day (redundant), cols[6] decimal time, cols[7] zenith.
    civil.month = int(cols[2]);
    civil.day = int(cols[3]);
    civil.hour = int(cols[4]);
    civil.minute = int(cols[5]);

    RadiationRecord rec;
    try {
      rec.timestamp = to_epoch_minute(civil);
    } catch (const Error& e) {
      throw format_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    for (int f = 0; f < kFieldCount; ++f) {
      double value = cols[size_t(8 + 2 * f)];
      int qc = int(cols[size_t(9 + 2 * f)]);
      rec.qc[size_t(f)] = qc;
      // Nonzero QC is conservative: the field becomes absent.
      if (is_sentinel(value) || qc != 0 || !in_physical_range(f, value)) {
        rec.values[size_t(f)] = std::nan("");
      } else {
        rec.values[size_t(f)] = value;
      }
    }
    if (!records.empty() && rec.timestamp <= records.back().timestamp) {
      throw data_error("line " + std::to_string(line_no) + ": non-monotonic timestamp " +
                       format_iso(rec.timestamp));
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<RadiationRecord> load_range(const std::string& root_path, const SiteMeta& site,
                                        const std::vector<int>& years) {
  namespace fs = std::filesystem;
  site.validate();
  if (!fs::is_directory(root_path)) {
    throw missing_input_error("input directory does not exist: " + root_path);
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root_path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<RadiationRecord> all;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw missing_input_error("cannot open " + path.string());
    std::vector<RadiationRecord> day;
    try {
      day = parse_day_file(in, site);
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ": " + e.what());
    }
    if (day.empty()) continue;
    if (!years.empty()) {
      int y = year_of(day.front().timestamp);
      if (std::find(years.begin(), years.end(), y) == years.end()) continue;
    }
    all.insert(all.end(), day.begin(), day.end());
  }
  if (all.empty()) {
    throw data_error("no station records found under " + root_path + " for the requested years");
  }

  std::stable_sort(all.begin(), all.end(),
                   [](const RadiationRecord& a, const RadiationRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  for (size_t i = 1; i < all.size(); ++i) {
    if (all[i].timestamp == all[i - 1].timestamp) {
      throw data_error("duplicate timestamp across files: " + format_iso(all[i].timestamp));
    }
  }
  return all;
}

void write_canonical_csv(std::ostream& out, const std::vector<RadiationRecord>& records) {
  out << "timestamp";
  for (const char* name : kFieldNames) out << ',' << name;
  out << '\n';
  char buf[32];
  for (const auto& rec : records) {
    out << format_iso(rec.timestamp);
    for (int f = 0; f < kFieldCount; ++f) {
      out << ',';
      if (rec.has(f)) {
        std::snprintf(buf, sizeof(buf), "%.17g", rec.values[size_t(f)]);
        out << buf;
      }
    }
    out << '\n';
  }
}

std::vector<RadiationRecord> read_canonical_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw format_error("empty observation CSV");
  {
    std::ostringstream expected;
    expected << "timestamp";
    for (const char* name : kFieldNames) expected << ',' << name;
    if (line != expected.str()) {
      throw format_error("unexpected observation CSV header: '" + line + "'");
    }
  }

  std::vector<RadiationRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (cells.size() != size_t(kFieldCount + 1)) {
      throw format_error("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(kFieldCount + 1) + " cells, got " +
                         std::to_string(cells.size()));
    }
    RadiationRecord rec;
    rec.timestamp = parse_iso(cells[0]);
    for (int f = 0; f < kFieldCount; ++f) {
      const std::string& s = cells[size_t(f + 1)];
      rec.values[size_t(f)] = s.empty() ? std::nan("") : std::stod(s);
      rec.qc[size_t(f)] = 0;
    }
    if (!records.empty() && rec.timestamp <= records.back().timestamp) {
      throw data_error("line " + std::to_string(line_no) + ": non-monotonic timestamp");
    }
    records.push_back(rec);
  }
  return records;
}

}  // namespace solarfc
