#pragma once

#include <vector>

#include "qplas/greens.hpp"

namespace qplas {

/// Lorentzian reduction of one LSP mode: kappa_{omega,n}(r_i) ~ g_n(r_i) L_n(omega)
/// with L_n(omega) = sqrt(gamma_n / 2 pi) / (omega - omega_n + i gamma_n).
struct ModeResonance {
  int mode_n = 1;
  double omega_n = 0.0;  // eV
  double gamma_n = 0.0;  // eV, half-width of |L_n|^2
  std::vector<double> g_amplitudes;  // eV, one per emitter, >= 0
  double residual = 0.0;             // worst relative RMS residual of the fits
};

/// |L_n(omega)| for the given width and center.
double lorentzian_magnitude(double omega, double omega_n, double gamma_n);

/// Least-squares fit of |kappa| against |g L_n(omega)|. Returns a resonance
/// with a single g amplitude. Throws FitWindowError when the peak lies on the
/// grid boundary or the window holds too few samples, FitError on
/// non-convergence.
ModeResonance fit_lorentzian(const CouplingSpectrum& spectrum);

}  // namespace qplas
