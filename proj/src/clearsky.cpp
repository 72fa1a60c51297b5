#include "solarfc/clearsky.hpp"

#include <cmath>

#include "solarfc/errors.hpp"

namespace solarfc {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kSolarConstant = 1367.0;  // W/m^2
}  // namespace

void AtmosParams::validate() const {
  if (ozone_atm_cm <= 0.0) throw config_error("ozone must be > 0");
  if (precipitable_water_cm <= 0.0) throw config_error("precipitable water must be > 0");
  if (aod_500nm < 0.0 || aod_380nm < 0.0) throw config_error("aerosol optical depth must be >= 0");
  if (ground_albedo < 0.0 || ground_albedo > 1.0) throw config_error("albedo must be in [0,1]");
  if (pressure_mb <= 0.0) throw config_error("pressure must be > 0");
}

SolarPosition solar_position(EpochMinute timestamp, const SiteMeta& site) {
  site.validate();
  CivilTime c = to_civil(timestamp);
  if (c.year < 1950 || c.year > 2100) {
    throw config_error("timestamp outside solar-position validity window 1950-2100: " +
                       format_iso(timestamp));
  }

  int doy = day_of_year(timestamp);
  double frac_hour = c.hour + c.minute / 60.0;
  // Fractional year in radians.
  double gamma = 2.0 * kPi / 365.0 * (doy - 1 + (frac_hour - 12.0) / 24.0);

  // Equation of time (minutes) and declination (radians).
  double eqtime = 229.18 * (0.000075 + 0.001868 * std::cos(gamma) - 0.032077 * std::sin(gamma) -
                            0.014615 * std::cos(2 * gamma) - 0.040849 * std::sin(2 * gamma));
  double decl = 0.006918 - 0.399912 * std::cos(gamma) + 0.070257 * std::sin(gamma) -
                0.006758 * std::cos(2 * gamma) + 0.000907 * std::sin(2 * gamma) -
                0.002697 * std::cos(3 * gamma) + 0.00148 * std::sin(3 * gamma);

  // True solar time in minutes; hour angle in degrees.
  double time_offset = eqtime + 4.0 * site.longitude_deg;
  double tst = frac_hour * 60.0 + time_offset;
  double ha_deg = tst / 4.0 - 180.0;

  double lat = site.latitude_deg * kDegToRad;
  double cos_zen = std::sin(lat) * std::sin(decl) +
                   std::cos(lat) * std::cos(decl) * std::cos(ha_deg * kDegToRad);
  cos_zen = std::clamp(cos_zen, -1.0, 1.0);

  SolarPosition pos;
  pos.zenith_deg = std::acos(cos_zen) / kDegToRad;
  pos.day_of_year = doy;
  // Squared inverse relative earth-sun distance (Spencer series).
  pos.earth_sun_distance_factor = 1.00011 + 0.034221 * std::cos(gamma) +
                                  0.00128 * std::sin(gamma) + 0.000719 * std::cos(2 * gamma) +
                                  0.000077 * std::sin(2 * gamma);
  return pos;
}

ClearSkyPoint bird_ghi(const SolarPosition& pos, const AtmosParams& atmos) {
  atmos.validate();
  ClearSkyPoint out;
  double z = pos.zenith_deg;
  if (z >= 90.0) return out;  // sun at/below horizon

  double cos_z = std::cos(z * kDegToRad);
  double etr = kSolarConstant * pos.earth_sun_distance_factor;

  // Kasten air mass, pressure-corrected for the absorbers that scale with
  // the actual column.
  double air_mass = 1.0 / (cos_z + 0.15 * std::pow(93.885 - z, -1.253));
  double am_press = air_mass * atmos.pressure_mb / 1013.0;

  double t_rayleigh =
      std::exp(-0.0903 * std::pow(am_press, 0.84) * (1.0 + am_press - std::pow(am_press, 1.01)));

  double xo = atmos.ozone_atm_cm * air_mass;
  double t_ozone = 1.0 - 0.1611 * xo * std::pow(1.0 + 139.48 * xo, -0.3035) -
                   0.002715 * xo / (1.0 + 0.044 * xo + 0.0003 * xo * xo);

  double t_gases = std::exp(-0.0127 * std::pow(am_press, 0.26));

  double xw = atmos.precipitable_water_cm * air_mass;
  double t_water = 1.0 - 2.4959 * xw / (std::pow(1.0 + 79.034 * xw, 0.6828) + 6.385 * xw);

  // Broadband turbidity from the two-wavelength parameterization.
  double tau = 0.2758 * atmos.aod_380nm + 0.35 * atmos.aod_500nm;
  double t_aerosol = std::exp(-std::pow(tau, 0.873) * (1.0 + tau - std::pow(tau, 0.7088)) *
                              std::pow(air_mass, 0.9108));
  double t_aa = 1.0 - 0.1 * (1.0 - air_mass + std::pow(air_mass, 1.06)) * (1.0 - t_aerosol);

  double direct_normal = 0.9662 * etr * t_rayleigh * t_ozone * t_gases * t_water * t_aerosol;
  double direct_h = direct_normal * cos_z;

  constexpr double kForwardScatter = 0.84;
  double ias = etr * cos_z * 0.79 * t_ozone * t_gases * t_water * t_aa *
               (0.5 * (1.0 - t_rayleigh) + kForwardScatter * (1.0 - t_aerosol / t_aa)) /
               (1.0 - air_mass + std::pow(air_mass, 1.02));

  double sky_albedo = 0.0685 + (1.0 - kForwardScatter) * (1.0 - t_aerosol / t_aa);
  double ghi = (direct_h + ias) / (1.0 - atmos.ground_albedo * sky_albedo);

  out.ghi_clear = std::max(0.0, ghi);
  out.direct_h = std::max(0.0, std::min(direct_h, out.ghi_clear));
  out.diffuse_h = out.ghi_clear - out.direct_h;
  return out;
}

}  // namespace solarfc
