#include "qplas/system.hpp"

#include <exception>

#include "qplas/error.hpp"

namespace qplas {

ModeTable build_mode_table(const NanoparticleModel& np, std::span<const EmitterSpec> emitters,
                           int n_modes, std::span<const double> omega_grid,
                           double coupling_scale) {
  if (n_modes < 1) throw DomainError("mode table needs at least one mode");
  if (emitters.empty()) throw DomainError("mode table needs at least one emitter");
  np.validate();
  for (const auto& e : emitters) e.validate();

  ModeTable table;
  table.modes.resize(n_modes);
  std::vector<std::exception_ptr> failures(n_modes);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n_modes; ++k) {
    try {
      const int n = k + 1;
      ModeResonance combined;
      for (std::size_t i = 0; i < emitters.size(); ++i) {
        const auto spec = coupling_spectrum_serial(np, emitters[i], n, omega_grid,
                                                   coupling_scale, static_cast<int>(i));
        const ModeResonance fit = fit_lorentzian(spec);
        if (i == 0) {
          combined = fit;
          combined.g_amplitudes.clear();
        }
        combined.g_amplitudes.push_back(fit.g_amplitudes.front());
        combined.residual = std::max(combined.residual, fit.residual);
      }
      table.modes[k] = std::move(combined);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return table;
}

std::vector<LowdinDecomposition> decompose_modes(const NanoparticleModel& np,
                                                 std::span<const EmitterSpec> emitters,
                                                 const ModeTable& table, int n_modes,
                                                 double rank_tol) {
  if (n_modes < 1 || n_modes > table.size())
    throw DomainError("mode count " + std::to_string(n_modes) + " outside 1.." +
                      std::to_string(table.size()));
  std::vector<LowdinDecomposition> decs;
  decs.reserve(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const auto& res = table.modes[k];
    if (res.g_amplitudes.size() != emitters.size())
      throw AssemblyError("mode table was built for a different emitter count");
    const OverlapMatrix M = overlap_matrix(np, emitters, res.mode_n, res.omega_n);
    std::vector<cplx> locals(res.g_amplitudes.begin(), res.g_amplitudes.end());
    decs.push_back(canonical_orthonormalize(M, locals, rank_tol));
  }
  return decs;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "reduced") return ModelKind::Reduced;
  if (name == "full") return ModelKind::Full;
  throw DomainError("unknown model '" + name + "' (reduced, full)");
}

std::string model_kind_name(ModelKind k) { return k == ModelKind::Reduced ? "reduced" : "full"; }

StirapSystem make_system(const NanoparticleModel& np, const std::array<EmitterSpec, 2>& emitters,
                         int n_modes, std::span<const double> omega_grid,
                         double coupling_scale) {
  return {np, emitters, build_mode_table(np, emitters, n_modes, omega_grid, coupling_scale)};
}

EffectiveHamiltonian build_hamiltonian(const StirapSystem& sys, int n_modes, double phi,
                                       const StirapSettings& settings) {
  if (sys.emitters[0].omega_eg != sys.emitters[1].omega_eg)
    throw AssemblyError("driven model assumes equal emitter transition energies");
  std::array<EmitterSpec, 2> placed = sys.emitters;
  placed[1].polar_angle_rad = placed[0].polar_angle_rad + phi;
  const auto decs = decompose_modes(sys.np, placed, sys.table, n_modes, settings.rank_tol);
  const std::span<const ModeResonance> res(sys.table.modes.data(), n_modes);
  EffectiveHamiltonian full = assemble_effective(res, decs, placed[0].omega_eg,
                                                 settings.loss_factor);
  return settings.model == ModelKind::Full ? full : adiabatic_eliminate(full);
}

Trajectory run_stirap(const StirapSystem& sys, int n_modes, double phi, double area,
                      const StirapSettings& settings) {
  const EffectiveHamiltonian h = build_hamiltonian(sys, n_modes, phi, settings);
  const PulsePair pulses = PulsePair::from_area(area, settings.tau_over_T, settings.width_T);
  return propagate(h, pulses, basis_state(h, StateKind::FG),
                   pulse_window(pulses, settings.window_multiplier), settings.prop);
}

double stirap_efficiency(const StirapSystem& sys, int n_modes, double phi, double area,
                         const StirapSettings& settings) {
  StirapSettings quiet = settings;
  quiet.prop.record = false;
  return transfer_efficiency(run_stirap(sys, n_modes, phi, area, quiet));
}

}  // namespace qplas
