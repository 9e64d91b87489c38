#pragma once

// Quasistatic multipole response of a metal nanosphere and the per-mode
// emitter coupling quantities derived from it.

#include <span>
#include <vector>

#include "qplas/units.hpp"

namespace qplas {

struct NanoparticleModel {
  double radius_nm = 8.0;
  double eps_inf = 6.0;
  double omega_p = 7.9;    // eV
  double gamma_p = 0.051;  // eV
  double eps_background = 2.13;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

/// Radially oriented dipole emitter with a Lambda level scheme.
struct EmitterSpec {
  double distance_nm = 2.0;      // from the metal surface
  double polar_angle_rad = 0.0;  // angular position around the sphere
  double dipole_debye = 10.0;
  double omega_eg = 2.0;  // eV
  double omega_fg = 0.3;  // eV

  void validate() const;
  double radial_position(const NanoparticleModel& np) const {
    return np.radius_nm + distance_nm;
  }
};

struct SpectrumSample {
  double omega;  // eV
  cplx kappa;    // sqrt(eV), real and non-negative by phase convention
};

struct CouplingSpectrum {
  int mode_n = 1;
  int emitter_index = 0;
  std::vector<SpectrumSample> samples;
};

/// eps_inf - omega_p^2 / (omega^2 + i gamma_p omega).
cplx drude_permittivity(const NanoparticleModel& np, double omega);

/// alpha_n = R^(2n+1) n (eps_m - eps_b) / (n eps_m + (n+1) eps_b), in nm^(2n+1).
cplx mode_polarizability(const NanoparticleModel& np, int n, double omega);

/// alpha_n / R^(2n+1). Same checks as mode_polarizability, no overflow for large n.
cplx reduced_polarizability(const NanoparticleModel& np, int n, double omega);

/// Frequency where Re[n eps_m + (n+1) eps_b] vanishes (closed form of the
/// Drude model). Throws DomainError when the mode has no real resonance.
double quasistatic_resonance(const NanoparticleModel& np, int n);

/// Im of the radial-radial element of the n-th scattered Green tensor
/// between radial positions r1, r2 separated by the angle `gamma_angle`.
/// Units 1/nm.
double im_green_radial(const NanoparticleModel& np, int n, double omega,
                       double r1_nm, double r2_nm, double gamma_angle_rad);

/// |kappa_{omega,n}(r)|^2 in eV, multiplied by `coupling_scale`.
double kappa_squared(const NanoparticleModel& np, const EmitterSpec& emitter,
                     int n, double omega, double coupling_scale = 1.0);

/// Samples kappa over `omega_grid` (OpenMP-parallel over samples).
CouplingSpectrum coupling_spectrum(const NanoparticleModel& np,
                                   const EmitterSpec& emitter, int n,
                                   std::span<const double> omega_grid,
                                   double coupling_scale = 1.0,
                                   int emitter_index = 0);

/// Serial reference for coupling_spectrum; results are bitwise identical.
CouplingSpectrum coupling_spectrum_serial(const NanoparticleModel& np,
                                          const EmitterSpec& emitter, int n,
                                          std::span<const double> omega_grid,
                                          double coupling_scale = 1.0,
                                          int emitter_index = 0);

/// Per-mode decay-rate enhancement Im G_n(r,r)_rr / (k / 6 pi).
double partial_ldos(const NanoparticleModel& np, const EmitterSpec& emitter,
                    int n, double omega);

/// Maximum of partial_ldos over omega for mode n (golden-section search
/// around the quasistatic resonance). Requires gamma_p > 0.
double peak_partial_ldos(const NanoparticleModel& np,
                         const EmitterSpec& emitter, int n);

struct ModeSelection {
  int n_prime = 1;
  bool clamped = false;
};

/// Smallest n' such that every mode above n' has peak partial LDOS below
/// `threshold` times the emitter's largest peak, for all emitters.
/// Modes are examined up to n_max + 1; the result is clamped to n_max.
ModeSelection select_modes(const NanoparticleModel& np,
                           std::span<const EmitterSpec> emitters,
                           double threshold, int n_max);

/// Uniform grid [lo, hi] with `points` samples.
std::vector<double> linear_grid(double lo, double hi, int points);

}  // namespace qplas
