#pragma once

// Sectioned key = value run configuration with explicit units in key names.
//
//   [nanoparticle]  radius_nm eps_inf omega_p_ev gamma_p_ev eps_background
//   [emitter.1] [emitter.2]  distance_nm polar_angle_rad dipole_debye
//                            omega_eg_ev omega_fg_ev
//   [pulses]      area tau_over_T T_ns window_multiplier
//   [truncation]  n_max threshold n_modes (0: choose with select_modes)
//   [numerics]    rtol atol rank_tol omega_min_ev omega_max_ev omega_points
//                 coupling_scale loss_factor integrator model max_steps
//   [scan]        phi_min_over_pi phi_max_over_pi phi_points area_min area_max
//                 area_points mode_counts distances_nm
//   [output]      dir
//
// '#' and ';' start comments. Unknown sections or keys are errors.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qplas/greens.hpp"
#include "qplas/system.hpp"

namespace qplas {

struct PulseConfig {
  double area = 60.0;
  double tau_over_T = 0.7;
  double T_ns = 10.0;
  double window_multiplier = 3.0;
};

struct TruncationConfig {
  int n_max = 40;
  double threshold = 0.0025;
  int n_modes = 0;
};

struct NumericsConfig {
  double rtol = 1e-6;
  double atol = 1e-9;
  double rank_tol = 1e-10;
  double omega_min_ev = 2.0;
  double omega_max_ev = 3.0;
  int omega_points = 4001;
  double coupling_scale = 0.1;
  double loss_factor = 0.5;
  std::string integrator = "magnus";
  std::string model = "reduced";
  long max_steps = 2'000'000;
};

struct ScanConfig {
  double phi_min_over_pi = 0.0;
  double phi_max_over_pi = 1.0;
  int phi_points = 31;
  double area_min = 10.0;
  double area_max = 150.0;
  int area_points = 15;
  std::vector<int> mode_counts{1, 3, 7, 25};
  std::vector<double> distances_nm{2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
};

struct RunConfig {
  NanoparticleModel nanoparticle;
  std::array<EmitterSpec, 2> emitters;
  PulseConfig pulses;
  TruncationConfig truncation;
  NumericsConfig numerics;
  ScanConfig scan;
  std::string output_dir = "qplas_out";

  std::vector<double> omega_grid() const;
  std::vector<double> phi_grid() const;
  std::vector<double> area_grid() const;
  /// Emitter 2 angle relative to emitter 1.
  double phi() const { return emitters[1].polar_angle_rad - emitters[0].polar_angle_rad; }
};

/// Throws ConfigError with the offending line for syntax errors, unknown keys,
/// duplicate keys, missing sections and invalid values.
RunConfig parse_config(std::string_view text);

/// Full effective configuration; parse_config(echo_config(c)) reproduces c
/// and echoes to the same text.
std::string echo_config(const RunConfig& c);

/// Throws ConfigError naming the offending field.
void validate_config(const RunConfig& c);

/// Pulse, model and propagator settings of a run.
StirapSettings stirap_settings(const RunConfig& c);

/// truncation.n_modes when set, otherwise select_modes on both emitters.
ModeSelection mode_selection(const RunConfig& c);

std::vector<std::string> preset_names();
/// Text of a built-in preset; throws ConfigError for unknown names.
std::string preset_text(std::string_view name);

}  // namespace qplas
