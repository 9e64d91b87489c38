#pragma once

// Gram-matrix rank detection and Lowdin canonical orthonormalization of a
// possibly linearly dependent set of vectors (bright mode operators).

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "qplas/greens.hpp"

namespace qplas {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kDefaultRankTol = 1e-10;

/// Overlap (Gram) matrix of the per-emitter bright operators of one mode at
/// one frequency. entries(i, j) = <a_i, a_j>, i.e. mu^{j,i}.
struct OverlapMatrix {
  int n_mode = 0;
  double omega = 0.0;
  CMatrix entries;

  Eigen::Index size() const { return entries.rows(); }
};

/// Pairwise inner products <v_i, v_j> (conjugate-linear in the first slot).
/// Throws DomainError for a zero vector or mismatched dimensions.
OverlapMatrix gram_matrix(std::span<const CVector> vectors);

struct Eigensystem {
  CMatrix T;               // unitary, columns are eigenvectors
  Eigen::VectorXd lambdas; // descending
  int rank = 0;
};

/// Hermitian eigendecomposition with numerical rank. An eigenvalue counts
/// towards the rank when it exceeds rank_tol * max(lambda_max, 0).
///
/// Ordering and phases are canonical: eigenvalues descending; inside a
/// degenerate cluster the eigenvectors are rebuilt by projecting e_1, e_2, ...
/// onto the cluster subspace and orthonormalizing in that order; each column
/// is rotated so that its largest-magnitude entry is real positive (ties go to
/// the highest row index).
Eigensystem eigendecompose_rank(const CMatrix& M, double rank_tol = kDefaultRankTol);

struct LowdinDecomposition {
  CMatrix T;
  Eigen::VectorXd lambdas;
  int rank = 0;
  /// rank x N, b_j = sum_i beta(j, i) a_i.
  CMatrix beta;
  /// N x rank, coupling of emitter i to bright operator b_j.
  CMatrix kappa_bright;
};

/// Lowdin canonical orthonormalization B = A T D^{-1/2} restricted to the
/// non-null eigenvalues, plus the bright couplings
/// kappa^{i,j} = kappa_i lambda_j^{1/2} conj(T(i, j)).
/// Throws DegenerateSetError when the rank is zero.
LowdinDecomposition canonical_orthonormalize(const OverlapMatrix& M,
                                             std::span<const cplx> kappa_locals,
                                             double rank_tol = kDefaultRankTol);

/// Expansion of the original operators on the bright ones:
/// a_i = sum_j S(i, j) b_j with S(i, j) = lambda_j^{1/2} conj(T(i, j)). N x rank.
CMatrix reconstruct_originals(const LowdinDecomposition& dec);

/// Gram matrix of vectors expanded on an orthonormal set with coefficient
/// rows S: <a_i, a_k> = sum_j conj(S(i, j)) S(k, j).
CMatrix gram_from_synthesis(const CMatrix& S);

/// Gram matrix of the bright set b_j = sum_i beta(j, i) a_i.
CMatrix bright_gram(const CMatrix& beta, const CMatrix& M);

struct TwoEmitterCouplings {
  cplx k11, k12, k21, k22;
};

/// Closed-form couplings for two emitters, consistent with
/// canonical_orthonormalize on M = [[1, conj(mu12)], [mu12, 1]].
/// Throws ConventionError for mu12 == 0 and DomainError for |mu12| > 1.
TwoEmitterCouplings two_emitter_closed_form(cplx mu12, cplx kappa1, cplx kappa2);

/// Normalized overlap mu^{i,j} of the mode-n fields excited by two emitters,
/// from the imaginary part of the Green tensor. Equals P_n(cos phi_ij) for
/// radial dipoles.
cplx mode_overlap(const NanoparticleModel& np, const EmitterSpec& emitter_i,
                  const EmitterSpec& emitter_j, int n, double omega);

/// Overlap matrix over all emitters for mode n at omega.
OverlapMatrix overlap_matrix(const NanoparticleModel& np,
                             std::span<const EmitterSpec> emitters, int n,
                             double omega);

}  // namespace qplas
