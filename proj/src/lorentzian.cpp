#include "qplas/lorentzian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "qplas/error.hpp"

namespace qplas {

double lorentzian_magnitude(double omega, double omega_n, double gamma_n) {
  const double dw = omega - omega_n;
  return std::sqrt(gamma_n / (2.0 * std::numbers::pi)) /
         std::sqrt(dw * dw + gamma_n * gamma_n);
}

namespace {

constexpr int kMinWindowSamples = 7;

struct LorentzResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>* omega;
  const std::vector<double>* magnitude;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(omega->size()); }

  // x = (g, omega_n, gamma_n)
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const double g = x[0], w0 = x[1], gam = std::abs(x[2]);
    for (std::size_t i = 0; i < omega->size(); ++i)
      f[i] = (*magnitude)[i] - g * lorentzian_magnitude((*omega)[i], w0, gam);
    return 0;
  }
};

struct Window {
  std::vector<double> omega;
  std::vector<double> magnitude;
};

Window window_around(const CouplingSpectrum& s, double center, double half) {
  Window w;
  for (const auto& x : s.samples) {
    if (std::abs(x.omega - center) <= half) {
      w.omega.push_back(x.omega);
      w.magnitude.push_back(std::abs(x.kappa));
    }
  }
  if (static_cast<int>(w.omega.size()) < kMinWindowSamples)
    throw FitWindowError("fit window of mode " + std::to_string(s.mode_n) +
                         " holds fewer than " + std::to_string(kMinWindowSamples) +
                         " samples; refine the omega grid");
  return w;
}

// Half width at half maximum of |kappa|^2 by linear interpolation.
double seed_half_width(const CouplingSpectrum& s, std::size_t peak) {
  const double half = 0.5 * std::norm(s.samples[peak].kappa);
  double widths = 0.0;
  int found = 0;
  for (std::size_t i = peak; i + 1 < s.samples.size(); ++i) {
    const double a = std::norm(s.samples[i].kappa), b = std::norm(s.samples[i + 1].kappa);
    if (b < half) {
      const double w = s.samples[i].omega +
                       (a - half) / (a - b) * (s.samples[i + 1].omega - s.samples[i].omega);
      widths += w - s.samples[peak].omega;
      ++found;
      break;
    }
  }
  for (std::size_t i = peak; i > 0; --i) {
    const double a = std::norm(s.samples[i].kappa), b = std::norm(s.samples[i - 1].kappa);
    if (b < half) {
      const double w = s.samples[i].omega -
                       (a - half) / (a - b) * (s.samples[i].omega - s.samples[i - 1].omega);
      widths += s.samples[peak].omega - w;
      ++found;
      break;
    }
  }
  if (found == 0)
    throw FitWindowError("half maximum of mode " + std::to_string(s.mode_n) +
                         " not reached inside the omega grid");
  return widths / found;
}

double relative_rms(const Window& w, double g, double w0, double gam) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w.omega.size(); ++i) {
    const double r = w.magnitude[i] - g * lorentzian_magnitude(w.omega[i], w0, gam);
    num += r * r;
    den += w.magnitude[i] * w.magnitude[i];
  }
  return std::sqrt(num / den);
}

Eigen::VectorXd solve(const Window& w, Eigen::VectorXd x, int mode_n) {
  LorentzResidual functor{&w.omega, &w.magnitude};
  Eigen::NumericalDiff<LorentzResidual> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LorentzResidual>> lm(numdiff);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 4000;
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !x.allFinite()) {
    const double res = x.allFinite() ? relative_rms(w, std::abs(x[0]), x[1], std::abs(x[2]))
                                     : std::nan("");
    throw FitError("Lorentzian fit of mode " + std::to_string(mode_n) + " did not converge",
                   res);
  }
  return x;
}

}  // namespace

ModeResonance fit_lorentzian(const CouplingSpectrum& spectrum) {
  const auto& s = spectrum.samples;
  if (s.size() < static_cast<std::size_t>(kMinWindowSamples))
    throw FitWindowError("spectrum too short to fit");
  const auto peak_it = std::max_element(s.begin(), s.end(), [](const auto& a, const auto& b) {
    return std::abs(a.kappa) < std::abs(b.kappa);
  });
  const auto peak = static_cast<std::size_t>(peak_it - s.begin());
  if (peak == 0 || peak + 1 == s.size())
    throw FitWindowError("peak of mode " + std::to_string(spectrum.mode_n) +
                         " lies on the omega-grid boundary");

  const double w_peak = s[peak].omega;
  const double hw = seed_half_width(spectrum, peak);
  Eigen::VectorXd x(3);
  x << std::sqrt(2.0 * std::numbers::pi * hw) * std::abs(s[peak].kappa), w_peak, hw;

  Window w = window_around(spectrum, w_peak, 3.0 * hw);
  x = solve(w, x, spectrum.mode_n);
  // Refit on the window centred on the fitted resonance.
  w = window_around(spectrum, x[1], 3.0 * std::abs(x[2]));
  x = solve(w, x, spectrum.mode_n);

  ModeResonance out;
  out.mode_n = spectrum.mode_n;
  out.omega_n = x[1];
  out.gamma_n = std::abs(x[2]);
  out.g_amplitudes = {std::abs(x[0])};
  out.residual = relative_rms(w, out.g_amplitudes[0], out.omega_n, out.gamma_n);
  if (!std::isfinite(out.residual) || !(out.gamma_n > 0.0))
    throw FitError("Lorentzian fit of mode " + std::to_string(spectrum.mode_n) +
                   " produced a degenerate width", out.residual);
  return out;
}

}  // namespace qplas
