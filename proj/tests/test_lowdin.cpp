#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qplas/error.hpp"
#include "qplas/lowdin.hpp"

using namespace qplas;

namespace {

std::mt19937_64 rng(20240611);

cplx random_cplx() {
  std::normal_distribution<double> d;
  return {d(rng), d(rng)};
}

CVector random_unit(int dim) {
  CVector v(dim);
  for (auto& x : v) x = random_cplx();
  return v / v.norm();
}

OverlapMatrix two_by_two(cplx mu12) {
  OverlapMatrix M;
  M.entries.resize(2, 2);
  M.entries << 1.0, std::conj(mu12), mu12, 1.0;
  return M;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// N unit vectors spanning `rank` dimensions inside C^dim.
std::vector<CVector> dependent_set(int n, int rank, int dim) {
  std::vector<CVector> basis;
  for (int k = 0; k < rank; ++k) basis.push_back(random_unit(dim));
  std::vector<CVector> out = basis;
  while (static_cast<int>(out.size()) < n) {
    CVector v = CVector::Zero(dim);
    for (const auto& b : basis) v += random_cplx() * b;
    out.push_back(v / v.norm());
  }
  return out;
}

CMatrix as_columns(const std::vector<CVector>& vs) {
  CMatrix A(vs.front().size(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) A.col(i) = vs[i];
  return A;
}

}  // namespace

TEST_CASE("gram matrix") {
  std::vector<CVector> e(3, CVector::Zero(3));
  for (int i = 0; i < 3; ++i) e[i][i] = 1.0;
  CHECK(max_abs(gram_matrix(e).entries - CMatrix::Identity(3, 3)) == 0.0);

  const CVector v = random_unit(4);
  const std::vector<CVector> dup{v, v};
  CHECK(std::abs(gram_matrix(dup).entries(0, 1)) == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<CVector> r{random_unit(5), random_unit(5), random_unit(5)};
  const auto M = gram_matrix(r).entries;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      cplx brute = 0.0;
      for (int k = 0; k < 5; ++k) brute += std::conj(r[i][k]) * r[j][k];
      CHECK(std::abs(M(i, j) - brute) < 1e-14);
    }
  const std::vector<CVector> bad{random_unit(3), CVector::Zero(3)};
  CHECK_THROWS_AS(gram_matrix(bad), DomainError);
  const std::vector<CVector> mixed{random_unit(3), random_unit(4)};
  CHECK_THROWS_AS(gram_matrix(mixed), DomainError);
}

TEST_CASE("eigendecomposition and rank") {
  const auto id = eigendecompose_rank(CMatrix::Identity(3, 3));
  CHECK(id.rank == 3);
  for (int k = 0; k < 3; ++k) CHECK(id.lambdas[k] == doctest::Approx(1.0));
  CHECK(max_abs(id.T - CMatrix::Identity(3, 3)) < 1e-15);

  for (double mu : {0.3, -0.7, 0.999}) {
    const auto es = eigendecompose_rank(two_by_two(mu).entries);
    CHECK(es.lambdas[0] == doctest::Approx(1.0 + std::abs(mu)).epsilon(1e-14));
    CHECK(es.lambdas[1] == doctest::Approx(1.0 - std::abs(mu)).epsilon(1e-12));
    CHECK(es.rank == 2);
  }
  CHECK(eigendecompose_rank(two_by_two(1.0).entries).rank == 1);
  CHECK(eigendecompose_rank(two_by_two(std::polar(1.0, 0.8)).entries).rank == 1);

  CMatrix skew = two_by_two(0.5).entries;
  skew(0, 1) += 1e-6;
  CHECK_THROWS_AS(eigendecompose_rank(skew), DomainError);

  // Unitary and diagonalizing, for random Gram matrices.
  for (int trial = 0; trial < 50; ++trial) {
    const auto M = gram_matrix(dependent_set(5, 1 + trial % 5, 6)).entries;
    const auto es = eigendecompose_rank(M);
    CHECK(max_abs(es.T.adjoint() * es.T - CMatrix::Identity(5, 5)) < 1e-12);
    CHECK(max_abs(es.T.adjoint() * M * es.T - CMatrix(es.lambdas.cast<cplx>().asDiagonal())) < 1e-12);
    CHECK(es.rank == 1 + trial % 5);
  }
}

TEST_CASE("canonical phase and order are deterministic") {
  // Columns: largest-magnitude entry real positive.
  for (int trial = 0; trial < 20; ++trial) {
    const auto M = gram_matrix(dependent_set(4, 4, 4)).entries;
    const auto es = eigendecompose_rank(M);
    for (int k = 0; k < 4; ++k) {
      Eigen::Index pivot;
      es.T.col(k).cwiseAbs().maxCoeff(&pivot);
      CHECK(std::abs(es.T(pivot, k).imag()) < 1e-15);
      CHECK(es.T(pivot, k).real() > 0.0);
    }
    for (int k = 1; k < 4; ++k) CHECK(es.lambdas[k] <= es.lambdas[k - 1]);
  }
  // Degenerate cluster: block diagonal with a doubly degenerate eigenvalue.
  CMatrix M = CMatrix::Identity(3, 3);
  M(0, 2) = M(2, 0) = 0.5;
  const auto es = eigendecompose_rank(M);
  CHECK(es.lambdas[1] == doctest::Approx(1.0));
  CHECK(std::abs(es.T(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("N = 2 bright combinations and couplings") {
  const cplx mu = std::polar(0.6, 1.1);
  const double m = std::abs(mu);
  const cplx k1(0.7, -0.2), k2(0.3, 0.4);
  const std::vector<cplx> kl{k1, k2};
  const auto dec = canonical_orthonormalize(two_by_two(mu), kl);
  REQUIRE(dec.rank == 2);
  // b1 = [a2 + (mu21/|mu|) a1] / sqrt(2(1+|mu|)), b2 = [a2 - (mu21/|mu|) a1] / sqrt(2(1-|mu|))
  const cplx mu21 = std::conj(mu);
  CHECK(std::abs(dec.beta(0, 1) - 1.0 / std::sqrt(2.0 * (1.0 + m))) < 1e-14);
  CHECK(std::abs(dec.beta(0, 0) - mu21 / m / std::sqrt(2.0 * (1.0 + m))) < 1e-14);
  CHECK(std::abs(dec.beta(1, 1) - 1.0 / std::sqrt(2.0 * (1.0 - m))) < 1e-14);
  CHECK(std::abs(dec.beta(1, 0) + mu21 / m / std::sqrt(2.0 * (1.0 - m))) < 1e-14);

  const auto cf = two_emitter_closed_form(mu, k1, k2);
  CHECK(std::abs(dec.kappa_bright(0, 0) - cf.k11) < 1e-14);
  CHECK(std::abs(dec.kappa_bright(0, 1) - cf.k12) < 1e-14);
  CHECK(std::abs(dec.kappa_bright(1, 0) - cf.k21) < 1e-14);
  CHECK(std::abs(dec.kappa_bright(1, 1) - cf.k22) < 1e-14);

  // Nearly orthogonal emitters: eigenvectors stay accurate despite the tiny gap.
  {
    const cplx mu_t = std::polar(1e-9, -0.4);
    const auto d = canonical_orthonormalize(two_by_two(mu_t), kl);
    const auto c = two_emitter_closed_form(mu_t, k1, k2);
    CHECK(std::abs(d.kappa_bright(0, 0) - c.k11) < 1e-14);
    CHECK(std::abs(d.kappa_bright(0, 1) - c.k12) < 1e-14);
    CHECK(std::abs(d.kappa_bright(1, 0) - c.k21) < 1e-14);
    CHECK(std::abs(d.kappa_bright(1, 1) - c.k22) < 1e-14);
  }
  // Below the cluster tolerance the pair counts as orthogonal: identity basis.
  const auto ortho = canonical_orthonormalize(two_by_two(std::polar(1e-13, -0.4)), kl);
  CHECK(std::abs(ortho.kappa_bright(0, 0) - k1) < 1e-12);
  CHECK(std::abs(ortho.kappa_bright(1, 1) - k2) < 1e-12);
  CHECK(std::abs(ortho.kappa_bright(0, 1)) < 1e-12);

  const auto dep = canonical_orthonormalize(two_by_two(1.0), kl);
  CHECK(dep.rank == 1);
  CHECK(dep.kappa_bright.cols() == 1);
  CHECK(std::abs(dep.kappa_bright(0, 0) - k1) < 1e-14);
  CHECK(std::abs(dep.kappa_bright(1, 0) - k2) < 1e-14);
  const auto cf1 = two_emitter_closed_form(1.0, k1, k2);
  CHECK(std::abs(cf1.k12) == 0.0);
  CHECK(std::abs(cf1.k22) == 0.0);
  CHECK(std::abs(cf1.k11 - k1) < 1e-15);
  CHECK(std::abs(cf1.k21 - k2) < 1e-15);

  const auto opp = two_emitter_closed_form(-1.0, k1, k2);
  CHECK(std::abs(opp.k11 + k1) < 1e-15);
  CHECK(std::abs(opp.k21 - k2) < 1e-15);

  CHECK_THROWS_AS(two_emitter_closed_form(0.0, k1, k2), ConventionError);
  CHECK_THROWS_AS(two_emitter_closed_form(1.5, k1, k2), DomainError);
}

TEST_CASE("identity overlap leaves emitters uncoupled") {
  OverlapMatrix M;
  M.entries = CMatrix::Identity(3, 3);
  const std::vector<cplx> kl{0.1, cplx(0.2, 0.1), -0.4};
  const auto dec = canonical_orthonormalize(M, kl);
  CHECK(dec.rank == 3);
  CMatrix expected = CMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) expected(i, i) = kl[i];
  CHECK(max_abs(dec.kappa_bright - expected) < 1e-15);
  CHECK(max_abs(reconstruct_originals(dec) - CMatrix::Identity(3, 3)) < 1e-15);
}

TEST_CASE("synthesis reproduces the Gram matrix") {
  const auto dec2 = canonical_orthonormalize(two_by_two(std::polar(0.4, -2.0)), std::vector<cplx>{1.0, 1.0});
  CHECK(max_abs(gram_from_synthesis(reconstruct_originals(dec2)) - two_by_two(std::polar(0.4, -2.0)).entries) < 1e-12);

  // Rank-deficient N = 3: one duplicate.
  const CVector a = random_unit(4), b = random_unit(4);
  const std::vector<CVector> set{a, b, a};
  const auto M = gram_matrix(set);
  const auto dec = canonical_orthonormalize(M, std::vector<cplx>{1.0, 1.0, 1.0});
  CHECK(dec.rank == 2);
  const CMatrix back = gram_from_synthesis(reconstruct_originals(dec));
  CHECK(max_abs(back - M.entries) < 1e-12);
  CHECK(std::abs(back(0, 2) - 1.0) < 1e-12);
}

TEST_CASE("Gram lemmas on random sets") {
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const int rank = 1 + trial % n;
    const auto set = dependent_set(n, rank, 7);
    const auto M = gram_matrix(set);
    const auto es = eigendecompose_rank(M.entries);
    CHECK(es.lambdas.minCoeff() >= -1e-10);
    CHECK(es.rank == rank);
    // Kernel vectors of M map to the zero vector.
    const CMatrix A = as_columns(set);
    for (int k = es.rank; k < n; ++k) CHECK((A * es.T.col(k)).norm() <= 1e-8);

    std::vector<cplx> kl(n);
    for (auto& x : kl) x = random_cplx();
    const auto dec = canonical_orthonormalize(M, kl);
    CHECK(max_abs(bright_gram(dec.beta, M.entries) - CMatrix::Identity(rank, rank)) < 1e-12);
    for (int i = 0; i < n; ++i)
      CHECK(dec.kappa_bright.row(i).squaredNorm() == doctest::Approx(std::norm(kl[i])).epsilon(1e-12));
    CHECK(max_abs(gram_from_synthesis(reconstruct_originals(dec)) - M.entries) < 1e-12);
  }
}

TEST_CASE("bright span equals the Gram-Schmidt span") {
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    const auto set = dependent_set(n, n, 6);
    const CMatrix A = as_columns(set);
    const auto dec = canonical_orthonormalize(gram_matrix(set), std::vector<cplx>(n, 1.0));
    const CMatrix B = A * dec.beta.transpose();
    CHECK(max_abs(B.adjoint() * B - CMatrix::Identity(n, n)) < 1e-12);
    // Classical Gram-Schmidt basis of the same vectors.
    CMatrix Q(A.rows(), n);
    for (int k = 0; k < n; ++k) {
      CVector v = A.col(k);
      for (int j = 0; j < k; ++j) v -= Q.col(j) * Q.col(j).dot(v);
      Q.col(k) = v / v.norm();
    }
    const CMatrix I = CMatrix::Identity(A.rows(), A.rows());
    CHECK(((I - Q * Q.adjoint()) * B).norm() <= 1e-10);
    CHECK(((I - B * B.adjoint()) * Q).norm() <= 1e-10);
  }
}

TEST_CASE("degenerate and invalid inputs") {
  OverlapMatrix zero;
  zero.entries = CMatrix::Zero(2, 2);
  CHECK_THROWS_AS(canonical_orthonormalize(zero, std::vector<cplx>{1.0, 1.0}), DegenerateSetError);
  CHECK_THROWS_AS(canonical_orthonormalize(two_by_two(0.5), std::vector<cplx>{1.0}), DomainError);
  CHECK_THROWS_AS(canonical_orthonormalize(two_by_two(0.5), std::vector<cplx>{1.0, std::nan("")}), DomainError);
}

TEST_CASE("mode overlap follows Legendre polynomials") {
  NanoparticleModel np;
  EmitterSpec a, b;
  a.distance_nm = 2.0;
  b.distance_nm = 4.0;
  for (int n = 1; n <= 25; ++n) {
    const double w = quasistatic_resonance(np, n);
    b.polar_angle_rad = 0.0;
    CHECK(mode_overlap(np, a, b, n, w).real() == doctest::Approx(1.0).epsilon(1e-12));
    b.polar_angle_rad = std::numbers::pi;
    CHECK(mode_overlap(np, a, b, n, w).real() == doctest::Approx(n % 2 ? -1.0 : 1.0).epsilon(1e-12));
  }
  b.polar_angle_rad = std::numbers::pi / 2;
  CHECK(mode_overlap(np, a, b, 2, 2.6).real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(mode_overlap(np, a, b, 2, 2.6).imag() == 0.0);

  const std::vector<EmitterSpec> three{a, b, a};
  const auto M = overlap_matrix(np, three, 3, 2.65);
  CHECK(M.n_mode == 3);
  CHECK(max_abs(M.entries - M.entries.adjoint()) == 0.0);
  CHECK(std::abs(M.entries(0, 2) - 1.0) < 1e-12);
  CHECK(eigendecompose_rank(M.entries).rank == 2);
}
