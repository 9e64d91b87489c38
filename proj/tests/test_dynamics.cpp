#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qplas/dynamics.hpp"
#include "qplas/error.hpp"
#include "qplas/system.hpp"
#include "qplas/units.hpp"

using namespace qplas;

namespace {

constexpr double kPi = std::numbers::pi;

EffectiveHamiltonian four_level() {
  EffectiveHamiltonian h;
  h.basis = {{StateKind::FG}, {StateKind::EG}, {StateKind::GE}, {StateKind::GF}};
  h.h_static = CMatrix::Zero(4, 4);
  h.pump_slot = {0, 1};
  h.stokes_slot = {2, 3};
  return h;
}

const PulsePair kNoDrive{0.0, 1.0, 1.0};

PropagateOptions with(Integrator i, double rtol = 1e-9, double atol = 1e-12) {
  PropagateOptions o;
  o.integrator = i;
  o.rtol = rtol;
  o.atol = atol;
  return o;
}

StirapSystem symmetric_system(double d_nm) {
  EmitterSpec e;
  e.distance_nm = d_nm;
  const auto grid = linear_grid(2.0, 3.0, 4001);
  return make_system(NanoparticleModel{}, {e, e}, 25, grid, 0.1);
}

StirapSettings fig5_settings() {
  StirapSettings s;
  s.tau_over_T = 0.7;
  s.width_T = units::ns_to_internal(10.0);
  return s;
}

}  // namespace

TEST_CASE("pulse pair from area") {
  const double T = units::ns_to_internal(10.0);
  const auto p = PulsePair::from_area(60.0, 0.7, T);
  CHECK(p.omega0 == doctest::Approx(60.0 / T).epsilon(1e-15));
  CHECK(p.tau == doctest::Approx(0.7 * T).epsilon(1e-15));
  CHECK(p.area() == doctest::Approx(60.0).epsilon(1e-15));
  const auto at_tau = evaluate_pulses(p, p.tau);
  CHECK(at_tau.pump == doctest::Approx(p.omega0).epsilon(1e-15));
  CHECK(at_tau.stokes == doctest::Approx(p.omega0 * std::exp(-4.0 * 0.49)).epsilon(1e-14));
  // Counterintuitive order: Stokes peaks first.
  CHECK(evaluate_pulses(p, -p.tau).stokes == doctest::Approx(p.omega0).epsilon(1e-15));
  CHECK(evaluate_pulses(p, -p.tau).pump < evaluate_pulses(p, -p.tau).stokes);
  const auto [t0, t1] = pulse_window(p);
  CHECK(t0 == doctest::Approx(-3.7 * T).epsilon(1e-15));
  CHECK(t1 == doctest::Approx(3.7 * T).epsilon(1e-15));

  CHECK_THROWS_AS(PulsePair::from_area(60.0, 0.0, T), DomainError);
  CHECK_THROWS_AS(PulsePair::from_area(60.0, -0.5, T), DomainError);
  CHECK_THROWS_AS(PulsePair::from_area(-1.0, 0.7, T), DomainError);
  CHECK_THROWS_AS(PulsePair::from_area(60.0, 0.7, 0.0), DomainError);
  CHECK_THROWS_AS(pulse_window(p, 0.0), DomainError);
  CHECK(parse_integrator("dopri5") == Integrator::DormandPrince);
  CHECK(integrator_name(parse_integrator("magnus")) == "magnus");
  CHECK_THROWS_AS(parse_integrator("rk4"), DomainError);
}

TEST_CASE("exponential decay of a lossy state") {
  const double gamma = 0.3;
  auto h = four_level();
  h.h_static(1, 1) = cplx(0.2, -0.5 * gamma);
  for (auto integ : {Integrator::Magnus, Integrator::DormandPrince}) {
    const auto tr = propagate(h, kNoDrive, basis_state(h, StateKind::EG), {0.0, 10.0}, with(integ));
    for (std::size_t s = 0; s < tr.times.size(); ++s)
      CHECK(tr.norm_squared(s) == doctest::Approx(std::exp(-gamma * tr.times[s])).epsilon(1e-7));
    CHECK(tr.times.back() == 10.0);
    const cplx expected = std::exp(cplx(-0.5 * gamma, -0.2) * 10.0);
    CHECK(std::abs(tr.final_state()[1] - expected) < 1e-7);
  }
}

TEST_CASE("Rabi oscillation under a static exchange") {
  const double g = 0.05;
  auto h = four_level();
  h.h_static(1, 2) = h.h_static(2, 1) = g;
  for (auto integ : {Integrator::Magnus, Integrator::DormandPrince}) {
    const auto half = propagate(h, kNoDrive, basis_state(h, StateKind::EG), {0.0, kPi / (2 * g)}, with(integ));
    CHECK(half.populations(half.times.size() - 1)[2] == doctest::Approx(1.0).epsilon(1e-7));
    const auto full = propagate(h, kNoDrive, basis_state(h, StateKind::EG), {0.0, kPi / g}, with(integ));
    CHECK(full.populations(full.times.size() - 1)[1] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(full.norm_squared(full.times.size() - 1) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("Gaussian pulse area theorem") {
  // Resonant pump alone: |EG|^2 = sin^2(integral of P) = sin^2(sqrt(pi) omega0 T).
  auto h = four_level();
  const double T = 20.0;
  for (double theta : {0.4, kPi / 2, 2.5}) {
    const PulsePair p{theta / (std::sqrt(kPi) * T), 5.0, T};
    for (auto integ : {Integrator::Magnus, Integrator::DormandPrince}) {
      const auto tr = propagate(h, p, basis_state(h, StateKind::FG), {-8 * T, 8 * T}, with(integ));
      CHECK(tr.populations(tr.times.size() - 1)[1] ==
            doctest::Approx(std::pow(std::sin(theta), 2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("norm never grows with loss present") {
  const auto sys = symmetric_system(2.0);
  auto settings = fig5_settings();
  settings.width_T = units::ns_to_internal(1.0);
  const auto tr = run_stirap(sys, 25, kPi / 3, 40.0, settings);
  REQUIRE(tr.times.size() > 10);
  for (std::size_t s = 1; s < tr.times.size(); ++s) CHECK(tr.norm_squared(s) <= tr.norm_squared(s - 1) + 1e-12);
  CHECK(tr.norm_squared(tr.times.size() - 1) < 1.0);
  CHECK(tr.labels.size() == 4);
}

TEST_CASE("STIRAP transfer with emitters on the same side") {
  const auto sys = symmetric_system(2.0);
  const auto settings = fig5_settings();
  const double eff = stirap_efficiency(sys, 25, 0.0, 60.0, settings);
  CHECK(eff > 0.9);
  auto tight = settings;
  tight.prop.rtol *= 0.5;
  tight.prop.atol *= 0.5;
  CHECK(std::abs(stirap_efficiency(sys, 25, 0.0, 60.0, tight) - eff) < 1e-4);
  auto dopri = settings;
  dopri.prop.integrator = Integrator::DormandPrince;
  CHECK(std::abs(stirap_efficiency(sys, 25, 0.0, 60.0, dopri) - eff) < 1e-4);
}

TEST_CASE("swapping the drives mirrors the transfer") {
  // Identical emitters: exchanging their roles must give the same efficiency.
  const auto sys = symmetric_system(2.0);
  const auto settings = fig5_settings();
  const auto h = build_hamiltonian(sys, 25, kPi / 5, settings);
  const auto pulses = PulsePair::from_area(60.0, settings.tau_over_T, settings.width_T);
  const auto window = pulse_window(pulses, settings.window_multiplier);
  const auto fwd = propagate(h, pulses, basis_state(h, StateKind::FG), window, settings.prop);

  auto mirrored = h;
  mirrored.pump_slot = {h.index_of(StateKind::GF), h.index_of(StateKind::GE)};
  mirrored.stokes_slot = {h.index_of(StateKind::FG), h.index_of(StateKind::EG)};
  const auto back = propagate(mirrored, pulses, basis_state(h, StateKind::GF), window, settings.prop);
  const double eff_back = std::norm(back.final_state()[h.index_of(StateKind::FG)]);
  CHECK(eff_back == doctest::Approx(transfer_efficiency(fwd)).epsilon(1e-5));
}

TEST_CASE("reduced model matches the full model for fast plasmons") {
  const auto sys = symmetric_system(3.0);
  auto settings = fig5_settings();
  settings.width_T = units::ns_to_internal(2.0);
  for (double phi : {0.0, kPi / 3, kPi}) {
    const double reduced = stirap_efficiency(sys, 7, phi, 40.0, settings);
    auto full = settings;
    full.model = ModelKind::Full;
    const double expanded = stirap_efficiency(sys, 7, phi, 40.0, full);
    MESSAGE("phi " << phi << ": reduced " << reduced << " full " << expanded);
    CHECK(std::abs(reduced - expanded) < 1e-5);
  }
}

TEST_CASE("propagation failures carry diagnostics") {
  const auto sys = symmetric_system(2.0);
  auto settings = fig5_settings();
  settings.model = ModelKind::Full;
  settings.prop.integrator = Integrator::DormandPrince;
  settings.prop.max_steps = 50;
  try {
    run_stirap(sys, 3, 0.0, 60.0, settings);
    FAIL("expected a PropagationError");
  } catch (const PropagationError& e) {
    const auto h = build_hamiltonian(sys, 3, 0.0, settings);
    double max_det = 0.0;
    for (double d : h.delta_n) max_det = std::max(max_det, std::abs(d));
    CHECK(e.max_abs_detuning() == doctest::Approx(max_det));
    CHECK(e.suggested_frame_shift() > 0.0);
    CHECK(e.step() > 0.0);
  }

  const auto h = build_hamiltonian(sys, 3, 0.0, fig5_settings());
  CVector bad = CVector::Zero(4);
  bad[0] = 0.5;
  CHECK_THROWS_AS(propagate(h, kNoDrive, bad, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(propagate(h, kNoDrive, basis_state(h, StateKind::FG), {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(propagate(h, kNoDrive, CVector::Ones(3) / std::sqrt(3.0), {0.0, 1.0}), DomainError);
}
