#include "qplas/lowdin.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "qplas/error.hpp"

namespace qplas {

OverlapMatrix gram_matrix(std::span<const CVector> vectors) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  if (n == 0) throw DomainError("gram_matrix needs at least one vector");
  const auto dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw DomainError("gram_matrix vectors differ in dimension");
    if (v.squaredNorm() == 0.0) throw DomainError("gram_matrix got a zero vector");
  }
  OverlapMatrix out;
  out.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.entries(i, j) = vectors[i].dot(vectors[j]);
  return out;
}

namespace {

// Rotate each column so its largest-magnitude entry is real positive.
void fix_phases(CMatrix& T) {
  for (Eigen::Index k = 0; k < T.cols(); ++k) {
    const double top = T.col(k).cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 0; i < T.rows(); ++i)
      if (std::abs(T(i, k)) >= top * (1.0 - 1e-9)) pivot = i;
    const cplx phase = std::conj(T(pivot, k)) / std::abs(T(pivot, k));
    T.col(k) *= phase;
    T(pivot, k) = cplx(T(pivot, k).real(), 0.0);
  }
}

// Replace the columns [first, last) spanning a degenerate eigenspace by the
// orthonormalized projections of e_1, e_2, ...
void canonicalize_cluster(CMatrix& T, Eigen::Index first, Eigen::Index last) {
  const Eigen::Index n = T.rows();
  const Eigen::Index m = last - first;
  const CMatrix Q = T.middleCols(first, m);
  CMatrix basis(n, m);
  Eigen::Index found = 0;
  for (Eigen::Index k = 0; k < n && found < m; ++k) {
    CVector v = Q * Q.row(k).adjoint();  // projection of e_k
    for (Eigen::Index c = 0; c < found; ++c) v -= basis.col(c) * basis.col(c).dot(v);
    for (Eigen::Index c = 0; c < found; ++c) v -= basis.col(c) * basis.col(c).dot(v);
    const double norm = v.norm();
    if (norm > 1e-6) basis.col(found++) = v / norm;
  }
  if (found != m) throw NumericError("failed to canonicalize a degenerate eigenspace");
  T.middleCols(first, m) = basis;
}

}  // namespace

Eigensystem eigendecompose_rank(const CMatrix& M, double rank_tol) {
  if (M.rows() != M.cols() || M.rows() == 0)
    throw DomainError("overlap matrix must be square and non-empty");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("overlap matrix is not Hermitian within 1e-12");
  if (!(rank_tol > 0.0)) throw DomainError("rank_tol must be > 0");

  // Diagonalizing M - cI with c the mean eigenvalue keeps eigenvector errors
  // relative to the off-diagonal part, so nearly orthogonal sets (small
  // overlaps, small eigenvalue gaps) still get accurate eigenvectors.
  const Eigen::Index dim = M.rows();
  const double shift = M.diagonal().real().mean();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(M - shift * CMatrix::Identity(dim, dim));
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");

  const Eigen::Index n = M.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ev[a] > ev[b]; });

  Eigensystem out;
  out.lambdas.resize(n);
  out.T.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.lambdas[k] = ev[order[k]] + shift;
    out.T.col(k) = solver.eigenvectors().col(order[k]);
  }

  const double lmax = std::max(out.lambdas[0], 0.0);
  const double cluster_tol = 1e-10 * std::max(1.0, lmax);
  for (Eigen::Index first = 0; first < n;) {
    Eigen::Index last = first + 1;
    while (last < n && out.lambdas[last - 1] - out.lambdas[last] <= cluster_tol) ++last;
    if (last - first > 1) canonicalize_cluster(out.T, first, last);
    first = last;
  }
  fix_phases(out.T);

  const double cut = rank_tol * lmax;
  out.rank = static_cast<int>(
      std::count_if(out.lambdas.begin(), out.lambdas.end(), [&](double l) { return l > cut; }));
  return out;
}

LowdinDecomposition canonical_orthonormalize(const OverlapMatrix& M,
                                             std::span<const cplx> kappa_locals,
                                             double rank_tol) {
  const Eigen::Index n = M.size();
  if (static_cast<Eigen::Index>(kappa_locals.size()) != n)
    throw DomainError("one local coupling per emitter is required");
  for (const auto& k : kappa_locals)
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
      throw DomainError("local couplings must be finite");

  const Eigensystem es = eigendecompose_rank(M.entries, rank_tol);
  if (es.rank == 0) throw DegenerateSetError("overlap matrix has rank zero");

  LowdinDecomposition dec;
  dec.T = es.T;
  dec.lambdas = es.lambdas;
  dec.rank = es.rank;
  dec.beta.resize(es.rank, n);
  dec.kappa_bright.resize(n, es.rank);
  for (int j = 0; j < es.rank; ++j) {
    const double lam = es.lambdas[j];
    if (lam < 1e-6 * es.lambdas[0])
      std::clog << "qplas: bright mode " << j + 1 << " kept with small eigenvalue " << lam
                << " (amplification " << 1.0 / std::sqrt(lam) << ")\n";
    const double inv_sqrt = 1.0 / std::sqrt(lam);
    const double sqrt_l = std::sqrt(lam);
    for (Eigen::Index i = 0; i < n; ++i) {
      dec.beta(j, i) = inv_sqrt * es.T(i, j);
      dec.kappa_bright(i, j) = kappa_locals[i] * sqrt_l * std::conj(es.T(i, j));
    }
  }
  return dec;
}

CMatrix reconstruct_originals(const LowdinDecomposition& dec) {
  const Eigen::Index n = dec.T.rows();
  CMatrix S(n, dec.rank);
  for (int j = 0; j < dec.rank; ++j) {
    const double sqrt_l = std::sqrt(dec.lambdas[j]);
    for (Eigen::Index i = 0; i < n; ++i) S(i, j) = sqrt_l * std::conj(dec.T(i, j));
  }
  return S;
}

CMatrix gram_from_synthesis(const CMatrix& S) { return S.conjugate() * S.transpose(); }

CMatrix bright_gram(const CMatrix& beta, const CMatrix& M) {
  return beta.conjugate() * M * beta.transpose();
}

TwoEmitterCouplings two_emitter_closed_form(cplx mu12, cplx kappa1, cplx kappa2) {
  const double m = std::abs(mu12);
  if (m == 0.0)
    throw ConventionError("closed form undefined for mu12 = 0 (phase factor mu/|mu|)");
  if (m > 1.0 + 1e-12) throw DomainError("|mu12| must not exceed 1");
  const double plus = std::sqrt((1.0 + m) / 2.0);
  const double minus = std::sqrt(std::max(0.0, 1.0 - m) / 2.0);
  const cplx phase = mu12 / m;
  return {kappa1 * phase * plus, -kappa1 * phase * minus, kappa2 * plus, kappa2 * minus};
}

cplx mode_overlap(const NanoparticleModel& np, const EmitterSpec& emitter_i,
                  const EmitterSpec& emitter_j, int n, double omega) {
  const double ri = emitter_i.radial_position(np);
  const double rj = emitter_j.radial_position(np);
  const double angle = emitter_i.polar_angle_rad - emitter_j.polar_angle_rad;
  const double gii = im_green_radial(np, n, omega, ri, ri, 0.0);
  const double gjj = im_green_radial(np, n, omega, rj, rj, 0.0);
  if (!(gii > 0.0 && gjj > 0.0))
    throw DomainError("mode overlap undefined: Im G vanishes (lossless metal?)");
  const double gij = im_green_radial(np, n, omega, ri, rj, angle);
  return {gij / std::sqrt(gii * gjj), 0.0};
}

OverlapMatrix overlap_matrix(const NanoparticleModel& np,
                             std::span<const EmitterSpec> emitters, int n,
                             double omega) {
  const auto count = static_cast<Eigen::Index>(emitters.size());
  OverlapMatrix M;
  M.n_mode = n;
  M.omega = omega;
  M.entries = CMatrix::Identity(count, count);
  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index j = i + 1; j < count; ++j) {
      const cplx mu_ji = mode_overlap(np, emitters[j], emitters[i], n, omega);
      M.entries(i, j) = mu_ji;
      M.entries(j, i) = std::conj(mu_ji);
    }
  return M;
}

}  // namespace qplas
