#include "qplas/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qplas/error.hpp"

namespace qplas {

std::string BasisLabel::name() const {
  switch (kind) {
    case StateKind::FG: return "FG";
    case StateKind::EG: return "EG";
    case StateKind::GE: return "GE";
    case StateKind::GF: return "GF";
    case StateKind::Bright: return fmt::format("B{}_n{}", branch, mode);
  }
  return "?";
}

std::vector<BasisLabel> enumerate_basis(int n_prime, std::span<const int> n_ind_per_mode) {
  if (n_prime < 1) throw AssemblyError("n_prime must be >= 1");
  if (static_cast<int>(n_ind_per_mode.size()) != n_prime)
    throw AssemblyError("one rank per retained mode is required");
  std::vector<BasisLabel> basis{{StateKind::FG}, {StateKind::EG}};
  for (int n = 1; n <= n_prime; ++n) {
    const int r = n_ind_per_mode[n - 1];
    if (r < 1 || r > 2) throw AssemblyError("mode rank must be 1 or 2 for two emitters");
    basis.push_back({StateKind::Bright, 1, n});
  }
  for (int n = 1; n <= n_prime; ++n)
    if (n_ind_per_mode[n - 1] == 2) basis.push_back({StateKind::Bright, 2, n});
  basis.push_back({StateKind::GE});
  basis.push_back({StateKind::GF});
  return basis;
}

Eigen::Index EffectiveHamiltonian::index_of(const BasisLabel& label) const {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == label) return static_cast<Eigen::Index>(i);
  throw AssemblyError("basis has no state " + label.name());
}

Eigen::VectorXd EffectiveHamiltonian::loss() const {
  return -h_static.diagonal().imag();
}

EffectiveHamiltonian assemble_effective(std::span<const ModeResonance> resonances,
                                        std::span<const LowdinDecomposition> decs,
                                        double omega_eg, double loss_factor) {
  if (resonances.empty()) throw AssemblyError("no modes to assemble");
  if (resonances.size() != decs.size())
    throw AssemblyError("one decomposition per retained mode is required");
  if (!(loss_factor >= 0.0)) throw AssemblyError("loss_factor must be >= 0");
  const int n_prime = static_cast<int>(resonances.size());
  std::vector<int> ranks(n_prime);
  for (int k = 0; k < n_prime; ++k) {
    const auto& res = resonances[k];
    const auto& dec = decs[k];
    if (res.mode_n != k + 1) throw AssemblyError("modes must be listed as 1..n'");
    if (res.g_amplitudes.size() != 2 || dec.T.rows() != 2)
      throw AssemblyError("driven assembly needs exactly two emitters per mode");
    if (dec.rank < 1 || dec.rank > 2) throw AssemblyError("mode rank must be 1 or 2");
    ranks[k] = dec.rank;
  }

  EffectiveHamiltonian h;
  h.basis = enumerate_basis(n_prime, ranks);
  const auto dim = static_cast<Eigen::Index>(h.basis.size());
  h.h_static = CMatrix::Zero(dim, dim);
  const Eigen::Index eg = 1, ge = dim - 2;
  h.pump_slot = {0, 1};
  h.stokes_slot = {dim - 2, dim - 1};

  for (Eigen::Index b = 2; b < ge; ++b) {
    const BasisLabel& label = h.basis[b];
    const int k = label.mode - 1;
    const int j = label.branch - 1;
    const auto& res = resonances[k];
    const auto& dec = decs[k];
    h.h_static(b, b) = cplx(res.omega_n - omega_eg, -loss_factor * res.gamma_n);
    const double sqrt_l = std::sqrt(dec.lambdas[j]);
    const cplx g1 = res.g_amplitudes[0] * sqrt_l * std::conj(dec.T(0, j));
    const cplx g2 = res.g_amplitudes[1] * sqrt_l * std::conj(dec.T(1, j));
    h.h_static(eg, b) = g1;
    h.h_static(b, eg) = std::conj(g1);
    h.h_static(ge, b) = g2;
    h.h_static(b, ge) = std::conj(g2);
  }
  for (const auto& res : resonances) {
    h.delta_n.push_back(res.omega_n - omega_eg);
    h.gamma_n.push_back(res.gamma_n);
  }
  return h;
}

void add_drive_into(const EffectiveHamiltonian& h, double pump_rabi, double stokes_rabi,
                    CMatrix& out) {
  out = h.h_static;
  const auto [p0, p1] = h.pump_slot;
  const auto [s0, s1] = h.stokes_slot;
  out(p0, p1) += pump_rabi;
  out(p1, p0) += pump_rabi;
  out(s0, s1) += stokes_rabi;
  out(s1, s0) += stokes_rabi;
}

CMatrix add_drive(const EffectiveHamiltonian& h, double pump_rabi, double stokes_rabi) {
  CMatrix out;
  add_drive_into(h, pump_rabi, stokes_rabi, out);
  return out;
}

EffectiveHamiltonian adiabatic_eliminate(const EffectiveHamiltonian& h) {
  const Eigen::Index dim = h.dim();
  if (dim < 4) throw EliminationError("Hamiltonian has fewer than four states");
  const std::vector<Eigen::Index> keep{h.index_of(StateKind::FG), h.index_of(StateKind::EG),
                                       h.index_of(StateKind::GE), h.index_of(StateKind::GF)};
  std::vector<Eigen::Index> drop;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) drop.push_back(i);

  const CMatrix& H = h.h_static;
  CMatrix hpp = H(keep, keep);
  if (!drop.empty()) {
    const CMatrix hqq = H(drop, drop);
    for (Eigen::Index i = 0; i < hqq.rows(); ++i)
      if (std::abs(hqq(i, i)) == 0.0)
        throw EliminationError("plasmon state " + h.basis[drop[i]].name() +
                               " has zero detuning and zero loss");
    Eigen::FullPivLU<CMatrix> lu(hqq);
    if (!lu.isInvertible()) throw EliminationError("plasmonic block is singular");
    const CMatrix hpq = H(keep, drop);
    const CMatrix hqp = H(drop, keep);
    hpp -= hpq * lu.solve(hqp);
  }

  EffectiveHamiltonian out;
  out.basis = {{StateKind::FG}, {StateKind::EG}, {StateKind::GE}, {StateKind::GF}};
  out.h_static = hpp;
  out.pump_slot = {0, 1};
  out.stokes_slot = {2, 3};
  out.delta_n = h.delta_n;
  out.gamma_n = h.gamma_n;
  return out;
}

std::string hamiltonian_csv(const EffectiveHamiltonian& h, const CMatrix& m) {
  if (m.rows() != h.dim() || m.cols() != h.dim())
    throw AssemblyError("matrix does not match the basis");
  std::string out = "row_label,col_label,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const cplx v = m(i, j);
      if (v == cplx(0.0, 0.0)) continue;
      out += fmt::format("{},{},{:.11e},{:.11e}\n", h.basis[i].name(), h.basis[j].name(),
                         v.real() + 0.0, v.imag() + 0.0);  // no negative zero
    }
  return out;
}

}  // namespace qplas
