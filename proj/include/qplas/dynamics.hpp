#pragma once

// Gaussian STIRAP pulse pair and adaptive propagation of the non-Hermitian
// single-excitation Schrodinger equation i dpsi/dt = H(t) psi (hbar = 1).

#include <string>
#include <utility>
#include <vector>

#include "qplas/hamiltonian.hpp"

namespace qplas {

/// P(t) = omega0 exp(-((t - tau)/T)^2), S(t) = omega0 exp(-((t + tau)/T)^2).
/// Times in hbar/eV, omega0 in eV.
struct PulsePair {
  double omega0 = 0.0;
  double tau = 0.0;
  double width_T = 1.0;

  static PulsePair from_area(double area, double tau_over_T, double width_T);
  double area() const { return omega0 * width_T; }
  void validate() const;
};

struct PulseValues {
  double pump;
  double stokes;
};

PulseValues evaluate_pulses(const PulsePair& p, double t);

/// [-m T - tau, m T + tau].
std::pair<double, double> pulse_window(const PulsePair& p, double multiplier = 3.0);

enum class Integrator {
  /// Commutator-free fourth-order Magnus with step-doubling control. Stable
  /// for the stiff full model; each step is a contraction.
  Magnus,
  /// Embedded Dormand-Prince 5(4). Step bounded by the fastest detuning.
  DormandPrince
};

Integrator parse_integrator(const std::string& name);
std::string integrator_name(Integrator i);

struct PropagateOptions {
  double rtol = 1e-6;
  double atol = 1e-9;
  Integrator integrator = Integrator::Magnus;
  double initial_step = 0.0;  // 0: chosen from the pulse width
  long max_steps = 2'000'000;
  bool record = true;  // keep every accepted step, otherwise endpoints only
};

struct Trajectory {
  std::vector<BasisLabel> labels;
  std::vector<double> times;
  std::vector<CVector> amplitudes;
  long accepted_steps = 0;
  long rejected_steps = 0;

  /// |c_k|^2 at sample s.
  Eigen::VectorXd populations(std::size_t s) const;
  double norm_squared(std::size_t s) const;
  const CVector& final_state() const { return amplitudes.back(); }
};

/// Solves from t_span.first to t_span.second with adaptive steps. psi0 must be
/// normalized. Throws PropagationError on step underflow or step budget
/// exhaustion.
Trajectory propagate(const EffectiveHamiltonian& h, const PulsePair& pulses,
                     const CVector& psi0, std::pair<double, double> t_span,
                     const PropagateOptions& opts = {});

/// Unit vector on the basis state `kind`.
CVector basis_state(const EffectiveHamiltonian& h, StateKind kind);

/// Final |<GF|psi>|^2.
double transfer_efficiency(const Trajectory& traj);

}  // namespace qplas
