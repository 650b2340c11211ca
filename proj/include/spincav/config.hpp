#ifndef SPINCAV_CONFIG_HPP
#define SPINCAV_CONFIG_HPP

#include <string>
#include <vector>

#include "spincav/fit.hpp"
#include "spincav/linear_spectrum.hpp"
#include "spincav/photon_stats.hpp"
#include "spincav/retrieval.hpp"
#include "spincav/units.hpp"

namespace spincav {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key-value configuration with sections. Every rate key carries an
// explicit unit suffix; unknown keys are rejected with file, line and key.
// Defaults reproduce the reference apparatus.
struct RunConfig {
  // [cavity]
  double mirror_reflectivity = 0.86;
  double round_trip_loss = 0.11;
  double length_m = 0.88;
  double waist_um = 69.0;
  double wavelength_nm = 780.241;
  double dipole_Cm = constants::rb87_sigma_minus_dipole;

  // [system]
  double g_MHz = 15.8;
  double kappa_MHz = 7.25;
  double kappa0_MHz = 3.7954;
  double gamma_MHz = 3.035;
  double gamma_s_kHz = 6.7;      // ordinary kHz, times 2pi on entry
  double spin_halftime_us = 0.0; // if > 0, overrides gamma_s via ln2/tau
  double atom_number = 4.0e5;

  // [detunings]
  double delta_c_MHz = -1.5;
  double delta_r_MHz = 0.0;

  // [pulse]
  double rabi_peak_MHz = 4.8;
  double center_us = 0.75;
  double fwhm_ns = 250.0;
  std::string pulse_shape = "gaussian";

  // [integration]
  double rel_tol = 1e-9;
  double horizon_us = 0.0;  // 0 = automatic

  // [reflectance]
  double probe_span_MHz = 60.0;
  int probe_points = 601;

  // [scan]
  double dr_min_MHz = -30.0;
  double dr_max_MHz = 30.0;
  int dr_points = 61;
  double dc_min_MHz = -30.0;
  double dc_max_MHz = 30.0;
  int dc_points = 61;

  // [odsweep]
  std::vector<double> od_values = {2.0, 4.0, 8.0, 16.0, 32.0};
  double od_ref = 2.0;
  double g_ref_MHz = 15.8;
  int od_dr_points = 201;
  // The square-root law holds where g dominates the drive; the sweep uses
  // its own weak read pulse instead of the strong-retrieval default.
  double od_rabi_peak_MHz = 1.2;

  // [fit]
  std::string fit_model = "efficiency";
  double fit_rel_tol = 1e-8;
  double omega0_init_MHz = 4.0, omega0_min_MHz = 0.2, omega0_max_MHz = 25.0;
  double g_init_MHz = 14.0, g_min_MHz = 1.0, g_max_MHz = 50.0;
  double delta_c_init_MHz = 0.0, delta_c_min_MHz = -40.0,
         delta_c_max_MHz = 40.0;
  double n_init = 4.0e5, n_min = 0.0, n_max = 4.0e6;

  // [stats]
  double mu = 0.02;
  double chi_true = 0.75;
  double eta_esc = 0.56;
  double eta_t = 0.53;
  double eta_d = 0.45;
  double dark_count = 1e-4;
  double trials = 1e6;
  double seed = 20240811.0;

  // [output]
  std::string output_dir = "out";
  std::string cache_dir;

  // Typed views.
  CavityGeometry cavity_geometry() const;
  TwoLevelSystemParams two_level_params() const;
  ThreeLevelParams three_level_params() const;
  ReadPulse read_pulse() const;
  DetectionModel detection_model() const;
  AngularFrequency gamma_s() const;

  // Canonical "section.key=value; ..." line for artifact headers.
  std::string echo() const;

  // Flag-style override: set("system.g_MHz", "12.5").
  void set(const std::string& dotted_key, const std::string& value);
};

RunConfig load_config(const std::string& path);

}  // namespace spincav

#endif  // SPINCAV_CONFIG_HPP
