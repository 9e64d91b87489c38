#include "qplas/greens.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "qplas/error.hpp"

namespace qplas {

namespace {

void require_mode(int n) {
  if (n < 1) throw DomainError("mode index must be >= 1, got " + std::to_string(n));
}

void require_frequency(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw DomainError("frequency must be positive and finite");
}

void require_outside(const NanoparticleModel& np, double r) {
  if (!(r > np.radius_nm))
    throw GeometryError("radial position " + std::to_string(r) +
                        " nm is not outside the sphere of radius " +
                        std::to_string(np.radius_nm) + " nm");
}

// Green-tensor prefactor C (c/omega)^2 (n+1)^2 with C = 1 / (4 pi eps_b).
double green_prefactor(const NanoparticleModel& np, int n, double omega) {
  const double k = units::wavenumber(omega);
  const double np1 = n + 1.0;
  return np1 * np1 / (4.0 * std::numbers::pi * np.eps_background * k * k);
}

// R^(2n+1) / (r1 r2)^(n+2), evaluated without forming large powers.
double radial_factor(const NanoparticleModel& np, int n, double r1, double r2) {
  const double R = np.radius_nm;
  return std::pow(R * R / (r1 * r2), n + 2) / (R * R * R);
}

}  // namespace

void NanoparticleModel::validate() const {
  if (!(radius_nm > 0.0)) throw DomainError("radius_nm must be > 0");
  if (!(omega_p > 0.0)) throw DomainError("omega_p must be > 0");
  if (!(gamma_p >= 0.0)) throw DomainError("gamma_p must be >= 0");
  if (!(eps_inf >= 1.0)) throw DomainError("eps_inf must be >= 1");
  if (!(eps_background >= 1.0)) throw DomainError("eps_background must be >= 1");
}

void EmitterSpec::validate() const {
  if (!(distance_nm > 0.0)) throw DomainError("distance_nm must be > 0");
  if (!(dipole_debye > 0.0)) throw DomainError("dipole_debye must be > 0");
  if (!(omega_fg >= 0.0 && omega_fg < omega_eg))
    throw DomainError("level energies must satisfy 0 <= omega_fg < omega_eg");
  if (!std::isfinite(polar_angle_rad)) throw DomainError("polar_angle_rad must be finite");
}

cplx drude_permittivity(const NanoparticleModel& np, double omega) {
  require_frequency(omega);
  const cplx denom(omega * omega, np.gamma_p * omega);
  return np.eps_inf - np.omega_p * np.omega_p / denom;
}

cplx reduced_polarizability(const NanoparticleModel& np, int n, double omega) {
  require_mode(n);
  const cplx eps = drude_permittivity(np, omega);
  const double eb = np.eps_background;
  const cplx denom = static_cast<double>(n) * eps + (n + 1.0) * eb;
  if (denom == cplx(0.0, 0.0))
    throw SingularityError("exact pole of mode " + std::to_string(n) +
                           " polarizability at omega = " + std::to_string(omega));
  return static_cast<double>(n) * (eps - eb) / denom;
}

cplx mode_polarizability(const NanoparticleModel& np, int n, double omega) {
  const cplx reduced = reduced_polarizability(np, n, omega);
  return std::pow(np.radius_nm, 2 * n + 1) * reduced;
}

double quasistatic_resonance(const NanoparticleModel& np, int n) {
  require_mode(n);
  // n (eps_inf - wp^2 / (w^2 + gp^2)) + (n+1) eb = 0
  const double target = n * np.eps_inf + (n + 1.0) * np.eps_background;
  const double w2 = n * np.omega_p * np.omega_p / target - np.gamma_p * np.gamma_p;
  if (!(w2 > 0.0))
    throw DomainError("mode " + std::to_string(n) + " has no real resonance");
  return std::sqrt(w2);
}

double im_green_radial(const NanoparticleModel& np, int n, double omega,
                       double r1_nm, double r2_nm, double gamma_angle_rad) {
  require_mode(n);
  require_outside(np, r1_nm);
  require_outside(np, r2_nm);
  const cplx alpha = reduced_polarizability(np, n, omega);
  const double angular = std::legendre(static_cast<unsigned>(n), std::cos(gamma_angle_rad));
  return green_prefactor(np, n, omega) * alpha.imag() *
         radial_factor(np, n, r1_nm, r2_nm) * angular;
}

double kappa_squared(const NanoparticleModel& np, const EmitterSpec& emitter,
                     int n, double omega, double coupling_scale) {
  const double r = emitter.radial_position(np);
  const double im_g = im_green_radial(np, n, omega, r, r, 0.0);
  const double k = units::wavenumber(omega);
  const double d = units::debye_to_e_nm(emitter.dipole_debye);
  // (1 / hbar pi eps0) (omega/c)^2 d^2 Im G, with 1/eps0 = 4 pi (e^2/4 pi eps0).
  return coupling_scale * 4.0 * units::coulomb_ev_nm * k * k * d * d * im_g;
}

namespace {

void check_grid(std::span<const double> omega_grid) {
  if (omega_grid.empty()) throw DomainError("omega grid is empty");
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    require_frequency(omega_grid[i]);
    if (i > 0 && !(omega_grid[i] > omega_grid[i - 1]))
      throw DomainError("omega grid must be strictly increasing");
  }
}

SpectrumSample sample_at(const NanoparticleModel& np, const EmitterSpec& emitter,
                         int n, double omega, double scale) {
  const double k2 = kappa_squared(np, emitter, n, omega, scale);
  return {omega, cplx(std::sqrt(std::max(k2, 0.0)), 0.0)};
}

CouplingSpectrum prepare(const NanoparticleModel& np, const EmitterSpec& emitter,
                         int n, std::span<const double> omega_grid,
                         int emitter_index) {
  require_mode(n);
  check_grid(omega_grid);
  require_outside(np, emitter.radial_position(np));
  CouplingSpectrum out;
  out.mode_n = n;
  out.emitter_index = emitter_index;
  out.samples.resize(omega_grid.size());
  return out;
}

void check_finite(const CouplingSpectrum& s) {
  for (const auto& x : s.samples)
    if (!std::isfinite(x.kappa.real()))
      throw SingularityError("non-finite coupling at omega = " + std::to_string(x.omega));
}

}  // namespace

CouplingSpectrum coupling_spectrum_serial(const NanoparticleModel& np,
                                          const EmitterSpec& emitter, int n,
                                          std::span<const double> omega_grid,
                                          double coupling_scale, int emitter_index) {
  CouplingSpectrum out = prepare(np, emitter, n, omega_grid, emitter_index);
  for (std::size_t i = 0; i < omega_grid.size(); ++i)
    out.samples[i] = sample_at(np, emitter, n, omega_grid[i], coupling_scale);
  check_finite(out);
  return out;
}

CouplingSpectrum coupling_spectrum(const NanoparticleModel& np,
                                   const EmitterSpec& emitter, int n,
                                   std::span<const double> omega_grid,
                                   double coupling_scale, int emitter_index) {
  CouplingSpectrum out = prepare(np, emitter, n, omega_grid, emitter_index);
  const auto count = static_cast<std::ptrdiff_t>(omega_grid.size());
  bool singular = false;
#pragma omp parallel for schedule(static) reduction(|| : singular)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out.samples[i] = sample_at(np, emitter, n, omega_grid[i], coupling_scale);
    } catch (const Error&) {
      out.samples[i] = {omega_grid[i], cplx(std::nan(""), 0.0)};
      singular = true;
    }
  }
  if (singular) check_finite(out);
  return out;
}

double partial_ldos(const NanoparticleModel& np, const EmitterSpec& emitter,
                    int n, double omega) {
  const double r = emitter.radial_position(np);
  const double vacuum = units::wavenumber(omega) / (6.0 * std::numbers::pi);
  return im_green_radial(np, n, omega, r, r, 0.0) / vacuum;
}

double peak_partial_ldos(const NanoparticleModel& np, const EmitterSpec& emitter,
                         int n) {
  if (!(np.gamma_p > 0.0)) throw DomainError("peak LDOS requires gamma_p > 0");
  const double center = quasistatic_resonance(np, n);
  const double half = 8.0 * np.gamma_p;
  double a = std::max(center - half, 0.5 * center);
  double b = center + half;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double w) { return partial_ldos(np, emitter, n, w); };
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-9 * center) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

ModeSelection select_modes(const NanoparticleModel& np,
                           std::span<const EmitterSpec> emitters,
                           double threshold, int n_max) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw DomainError("selection threshold must lie in (0, 1)");
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  if (emitters.empty()) throw DomainError("no emitters given");

  ModeSelection sel;
  for (const auto& e : emitters) {
    std::vector<double> peaks(n_max + 1);
    for (int n = 1; n <= n_max + 1; ++n) peaks[n - 1] = peak_partial_ldos(np, e, n);
    const double top = *std::max_element(peaks.begin(), peaks.end());
    for (int n = n_max + 1; n >= 1; --n) {
      if (peaks[n - 1] >= threshold * top) {
        sel.n_prime = std::max(sel.n_prime, n);
        break;
      }
    }
  }
  if (sel.n_prime > n_max) {
    sel.n_prime = n_max;
    sel.clamped = true;
    std::clog << "qplas: mode truncation clamped to n_max = " << n_max << "\n";
  }
  return sel;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw DomainError("grid needs at least one point");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo + step * i;
  g.back() = hi;
  return g;
}

}  // namespace qplas
