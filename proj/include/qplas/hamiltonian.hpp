#pragma once

// Single-excitation effective Hamiltonian for two Lambda emitters coupled to
// truncated bright plasmon modes, resonant STIRAP drive and adiabatic
// elimination of the plasmonic block.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qplas/lorentzian.hpp"
#include "qplas/lowdin.hpp"

namespace qplas {

enum class StateKind { FG, EG, Bright, GE, GF };

struct BasisLabel {
  StateKind kind = StateKind::FG;
  int branch = 0;  // bright branch j (1-based), Bright only
  int mode = 0;    // multipole order n, Bright only

  std::string name() const;
  bool operator==(const BasisLabel&) const = default;
};

/// FG, EG, Bright(1, 1..n'), Bright(2, n) for modes with two bright
/// branches, GE, GF. n_ind_per_mode[k] is the rank of mode k+1 (1 or 2).
std::vector<BasisLabel> enumerate_basis(int n_prime, std::span<const int> n_ind_per_mode);

struct EffectiveHamiltonian {
  std::vector<BasisLabel> basis;
  CMatrix h_static;
  std::pair<Eigen::Index, Eigen::Index> pump_slot{0, 1};
  std::pair<Eigen::Index, Eigen::Index> stokes_slot{0, 0};
  std::vector<double> delta_n;  // per retained mode, omega_n - omega_eg
  std::vector<double> gamma_n;

  Eigen::Index dim() const { return h_static.rows(); }
  /// Index of a label in the basis, throws AssemblyError when absent.
  Eigen::Index index_of(const BasisLabel& label) const;
  Eigen::Index index_of(StateKind kind) const { return index_of(BasisLabel{kind}); }
  /// Per-state decay rates: -Im of the diagonal.
  Eigen::VectorXd loss() const;
};

/// Builds the static matrix in the frame rotating with the drives.
/// g^{ij}_n = g_n(r_i) lambda_j^{1/2} conj(T(i, j)) from the decomposition of
/// mode n at its resonance. Plasmon diagonal: Delta_n - i loss_factor gamma_n.
/// A branch whose eigenvalue is below rank_tol * lambda_max is dropped.
EffectiveHamiltonian assemble_effective(std::span<const ModeResonance> resonances,
                                        std::span<const LowdinDecomposition> decs,
                                        double omega_eg, double loss_factor = 0.5);

/// Snapshot of h with pump P at (FG, EG) and Stokes S at (GE, GF).
CMatrix add_drive(const EffectiveHamiltonian& h, double pump_rabi, double stokes_rabi);

/// Same, written into a caller-owned matrix (no allocation when sized).
void add_drive_into(const EffectiveHamiltonian& h, double pump_rabi,
                    double stokes_rabi, CMatrix& out);

/// H_PP - H_PQ H_QQ^{-1} H_QP over P = {FG, EG, GE, GF}. The result keeps
/// the drive slots, so it propagates like any other EffectiveHamiltonian.
EffectiveHamiltonian adiabatic_eliminate(const EffectiveHamiltonian& h);

/// (row_label, col_label, re, im) for every nonzero entry, row-major.
std::string hamiltonian_csv(const EffectiveHamiltonian& h, const CMatrix& m);

}  // namespace qplas
