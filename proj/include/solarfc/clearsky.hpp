#pragma once

#include "solarfc/surfrad.hpp"
#include "solarfc/time.hpp"

namespace solarfc {

struct SolarPosition {
  double zenith_deg = 0.0;                  // [0, 180]
  double earth_sun_distance_factor = 1.0;   // (r0/r)^2, in [0.96, 1.04]
  int day_of_year = 1;
};

struct AtmosParams {
  double ozone_atm_cm = 0.3;
  double precipitable_water_cm = 1.5;
  double aod_500nm = 0.1;
  double aod_380nm = 0.05;
  double ground_albedo = 0.2;
  double pressure_mb = 1013.0;

  void validate() const;
};

struct ClearSkyPoint {
  EpochMinute timestamp = 0;
  double ghi_clear = 0.0;   // W/m^2
  double direct_h = 0.0;    // W/m^2
  double diffuse_h = 0.0;   // W/m^2
};

// Closed-form fractional-year algorithm (declination + equation of time).
// Zenith is accurate to a few hundredths of a degree against a full
// ephemeris, well inside the 0.5 deg budget.
SolarPosition solar_position(EpochMinute timestamp, const SiteMeta& site);

// Bird & Hulstrom simplified clear-sky model: Rayleigh, ozone, mixed-gas,
// water-vapor and aerosol transmittances, direct + diffuse on a horizontal
// surface. Returns all-zero components when the sun is at or below the
// horizon.
ClearSkyPoint bird_ghi(const SolarPosition& pos, const AtmosParams& atmos);

inline ClearSkyPoint clear_sky_at(EpochMinute timestamp, const SiteMeta& site,
                                  const AtmosParams& atmos) {
  ClearSkyPoint p = bird_ghi(solar_position(timestamp, site), atmos);
  p.timestamp = timestamp;
  return p;
}

}  // namespace solarfc
