#include "qplas/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "qplas/error.hpp"

namespace qplas {

PulsePair PulsePair::from_area(double area, double tau_over_T, double width_T) {
  PulsePair p{area / width_T, tau_over_T * width_T, width_T};
  p.validate();
  return p;
}

void PulsePair::validate() const {
  if (!(width_T > 0.0) || !std::isfinite(width_T)) throw DomainError("pulse width must be > 0");
  if (!(tau > 0.0)) throw DomainError("pulse half-delay tau must be > 0 (counterintuitive order)");
  if (!(omega0 >= 0.0) || !std::isfinite(omega0))
    throw DomainError("peak Rabi frequency must be finite and >= 0");
}

PulseValues evaluate_pulses(const PulsePair& p, double t) {
  const double xp = (t - p.tau) / p.width_T;
  const double xs = (t + p.tau) / p.width_T;
  return {p.omega0 * std::exp(-xp * xp), p.omega0 * std::exp(-xs * xs)};
}

std::pair<double, double> pulse_window(const PulsePair& p, double multiplier) {
  if (!(multiplier > 0.0)) throw DomainError("window multiplier must be > 0");
  const double half = multiplier * p.width_T + p.tau;
  return {-half, half};
}

Integrator parse_integrator(const std::string& name) {
  if (name == "magnus") return Integrator::Magnus;
  if (name == "dopri5") return Integrator::DormandPrince;
  throw DomainError("unknown integrator '" + name + "' (magnus, dopri5)");
}

std::string integrator_name(Integrator i) {
  return i == Integrator::Magnus ? "magnus" : "dopri5";
}

Eigen::VectorXd Trajectory::populations(std::size_t s) const {
  return amplitudes.at(s).cwiseAbs2();
}

double Trajectory::norm_squared(std::size_t s) const { return amplitudes.at(s).squaredNorm(); }

CVector basis_state(const EffectiveHamiltonian& h, StateKind kind) {
  CVector v = CVector::Zero(h.dim());
  v[h.index_of(kind)] = 1.0;
  return v;
}

double transfer_efficiency(const Trajectory& traj) {
  if (traj.amplitudes.empty()) throw DomainError("empty trajectory");
  for (std::size_t i = 0; i < traj.labels.size(); ++i)
    if (traj.labels[i].kind == StateKind::GF) return std::norm(traj.final_state()[i]);
  throw DomainError("trajectory has no GF state");
}

namespace {

// Max over components of |a - b| / (atol + rtol max(|a|, |b|)).
double error_norm(const CVector& a, const CVector& b, double rtol, double atol) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

class Stepper {
 public:
  Stepper(const EffectiveHamiltonian& h, const PulsePair& p) : h_(h), p_(p) {}

  const CMatrix& at(double t) {
    const auto v = evaluate_pulses(p_, t);
    add_drive_into(h_, v.pump, v.stokes, work_);
    return work_;
  }

  // Commutator-free fourth-order Magnus step on the Gauss nodes. The drives
  // are Hermitian and the loss is static, so both exponents keep the loss
  // part -dt Gamma / 2 and each factor is a contraction.
  CVector magnus(double t, double dt, const CVector& psi) {
    constexpr double a1 = 0.25 + 0.28867513459481287;  // 1/4 + sqrt(3)/6
    constexpr double a2 = 0.25 - 0.28867513459481287;
    constexpr double c1 = 0.5 - 0.28867513459481287;    // 1/2 -+ sqrt(3)/6
    constexpr double c2 = 0.5 + 0.28867513459481287;
    const CMatrix h1 = at(t + c1 * dt);
    const CMatrix& h2 = at(t + c2 * dt);
    const cplx f(0.0, -dt);
    const CVector half = (f * (a1 * h1 + a2 * h2)).exp() * psi;
    return (f * (a2 * h1 + a1 * h2)).exp() * half;
  }

  CVector rhs(double t, const CVector& psi) { return cplx(0.0, -1.0) * (at(t) * psi); }

  [[noreturn]] void fail(const std::string& why, double t, double dt) const {
    double max_det = 0.0, mean = 0.0;
    for (double d : h_.delta_n) {
      max_det = std::max(max_det, std::abs(d));
      mean += d;
    }
    if (!h_.delta_n.empty()) mean /= static_cast<double>(h_.delta_n.size());
    throw PropagationError(why + " at t = " + std::to_string(t) + " (step " +
                               std::to_string(dt) + ", max |Delta_n| = " +
                               std::to_string(max_det) + " eV; shift the frame by " +
                               std::to_string(mean) + " eV or use the reduced model)",
                           t, dt, max_det, mean);
  }

 private:
  const EffectiveHamiltonian& h_;
  const PulsePair& p_;
  CMatrix work_;
};

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr std::array<double, 7> kB5{35.0 / 384,     0.0,          500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84,    0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600,     0.0,           7571.0 / 16695,
                                    393.0 / 640,        -92097.0 / 339200, 187.0 / 2100,
                                    1.0 / 40};

}  // namespace

Trajectory propagate(const EffectiveHamiltonian& h, const PulsePair& pulses,
                     const CVector& psi0, std::pair<double, double> t_span,
                     const PropagateOptions& opts) {
  pulses.validate();
  const auto [t0, t1] = t_span;
  if (!(t1 > t0)) throw DomainError("time span must be increasing");
  if (psi0.size() != h.dim()) throw DomainError("initial state does not match the basis");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw DomainError("initial state must be normalized");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw DomainError("tolerances must be > 0");

  Trajectory traj;
  traj.labels = h.basis;
  traj.times.push_back(t0);
  traj.amplitudes.push_back(psi0);

  Stepper stepper(h, pulses);
  const double span = t1 - t0;
  const double h_min = 1e-13 * span;
  double dt = opts.initial_step > 0.0 ? opts.initial_step : pulses.width_T / 50.0;
  dt = std::min(dt, span);
  double t = t0;
  CVector psi = psi0;
  const bool magnus = opts.integrator == Integrator::Magnus;

  std::array<CVector, 7> k;
  if (!magnus) k[0] = stepper.rhs(t, psi);

  while (t < t1) {
    if (traj.accepted_steps + traj.rejected_steps >= opts.max_steps)
      stepper.fail("step budget of " + std::to_string(opts.max_steps) + " exhausted", t, dt);
    const bool last = t + dt >= t1;
    const double step = last ? t1 - t : dt;

    CVector next;
    double err;
    if (magnus) {
      const CVector whole = stepper.magnus(t, step, psi);
      const CVector half = stepper.magnus(t, 0.5 * step, psi);
      next = stepper.magnus(t + 0.5 * step, 0.5 * step, half);
      err = error_norm(whole, next, opts.rtol, opts.atol);
    } else {
      for (int s = 1; s < 7; ++s) {
        CVector y = psi;
        for (int j = 0; j < s; ++j)
          if (kA[s][j] != 0.0) y += (step * kA[s][j]) * k[j];
        k[s] = stepper.rhs(t + kC[s] * step, y);
      }
      next = psi;
      CVector low = psi;
      for (int s = 0; s < 7; ++s) {
        next += (step * kB5[s]) * k[s];
        low += (step * kB4[s]) * k[s];
      }
      err = error_norm(next, low, opts.rtol, opts.atol);
    }
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

    const double order = 5.0;
    const double factor =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -1.0 / order), 0.2, 5.0);
    if (err <= 1.0) {
      t = last ? t1 : t + step;
      psi = std::move(next);
      ++traj.accepted_steps;
      if (!magnus) k[0] = k[6];
      if (opts.record || t >= t1) {
        traj.times.push_back(t);
        traj.amplitudes.push_back(psi);
      }
      dt = step * factor;
      if (last) break;
    } else {
      ++traj.rejected_steps;
      dt = step * factor;
      if (dt < h_min) stepper.fail("step size underflow", t, dt);
    }
  }
  return traj;
}

}  // namespace qplas
