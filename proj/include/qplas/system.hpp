#pragma once

// Glue between the plasmonic response and the driven model: per-mode
// Lorentzian fits for a pair of emitters, computed once, and Hamiltonian
// construction for a given angle and mode count.

#include <array>
#include <span>
#include <vector>

#include "qplas/dynamics.hpp"
#include "qplas/hamiltonian.hpp"
#include "qplas/lorentzian.hpp"
#include "qplas/lowdin.hpp"

namespace qplas {

/// Fitted resonances for modes 1..n, g_amplitudes holding one entry per emitter.
struct ModeTable {
  std::vector<ModeResonance> modes;

  int size() const { return static_cast<int>(modes.size()); }
};

/// Fits every mode for every emitter. The line shape of |kappa|^2 does not
/// depend on the emitter position, so omega_n and gamma_n come from the first
/// emitter; residual is the worst over emitters. Parallel over modes.
ModeTable build_mode_table(const NanoparticleModel& np, std::span<const EmitterSpec> emitters,
                           int n_modes, std::span<const double> omega_grid,
                           double coupling_scale);

/// Lowdin decompositions of modes 1..n_modes at their resonance frequencies,
/// with the fitted amplitudes as local couplings.
std::vector<LowdinDecomposition> decompose_modes(const NanoparticleModel& np,
                                                 std::span<const EmitterSpec> emitters,
                                                 const ModeTable& table, int n_modes,
                                                 double rank_tol);

enum class ModelKind { Reduced, Full };

ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind k);

/// Two emitters with their fitted mode table.
struct StirapSystem {
  NanoparticleModel np;
  std::array<EmitterSpec, 2> emitters;
  ModeTable table;
};

StirapSystem make_system(const NanoparticleModel& np, const std::array<EmitterSpec, 2>& emitters,
                         int n_modes, std::span<const double> omega_grid,
                         double coupling_scale);

struct StirapSettings {
  double tau_over_T = 0.7;
  double width_T = 1.0;  // hbar/eV
  double window_multiplier = 3.0;
  ModelKind model = ModelKind::Reduced;
  double rank_tol = kDefaultRankTol;
  double loss_factor = 0.5;
  PropagateOptions prop;
};

/// Driven model for modes 1..n_modes with emitter 2 placed at polar angle
/// emitter 1 + phi. The reduced model is the adiabatic elimination of the full one.
EffectiveHamiltonian build_hamiltonian(const StirapSystem& sys, int n_modes, double phi,
                                       const StirapSettings& settings);

/// Full STIRAP run from FG over the pulse window.
Trajectory run_stirap(const StirapSystem& sys, int n_modes, double phi, double area,
                      const StirapSettings& settings);

double stirap_efficiency(const StirapSystem& sys, int n_modes, double phi, double area,
                         const StirapSettings& settings);

}  // namespace qplas
