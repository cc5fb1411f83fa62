#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsf/numerics.hpp"
#include "dsf/rng.hpp"
#include "helpers.hpp"

using namespace dsf;
using test_util::naive_matmul;
using test_util::random_matrix;
using test_util::random_psd;

TEST_CASE("matmul identity and hand cases") {
  RandomStream rs(1);
  DenseMatrix m = random_matrix(rs, 3, 5);
  DenseMatrix id = DenseMatrix::Identity(3, 3);
  CHECK(matmul(id, m) == m);

  DenseMatrix a(2, 2), b(2, 1);
  a << 1, 2, 3, 4;
  b << 0, 1;
  DenseMatrix c = matmul(a, b);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(1, 0) == 4.0);
}

TEST_CASE("matmul bit-matches the naive triple loop") {
  RandomStream rs(2);
  DenseMatrix a = random_matrix(rs, 7, 5);
  DenseMatrix b = random_matrix(rs, 5, 3);
  DenseMatrix c = matmul(a, b);
  DenseMatrix oracle = naive_matmul(a, b);
  REQUIRE(c.rows() == oracle.rows());
  for (Index i = 0; i < c.size(); ++i) CHECK(c.data()[i] == oracle.data()[i]);

  // also exercise the unroll remainder paths
  for (Index k : {1, 2, 3, 4, 6, 9}) {
    DenseMatrix x = random_matrix(rs, 4, k);
    DenseMatrix y = random_matrix(rs, k, 5);
    CHECK(matmul(x, y) == naive_matmul(x, y));
  }
}

TEST_CASE("matmul rejects dimension mismatch and is pure") {
  RandomStream rs(3);
  DenseMatrix a = random_matrix(rs, 3, 4);
  DenseMatrix b = random_matrix(rs, 5, 2);
  CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);

  DenseMatrix x = random_matrix(rs, 6, 6);
  CHECK(matmul(x, x) == matmul(x, x));
}

TEST_CASE("gram basics") {
  DenseMatrix id = DenseMatrix::Identity(4, 4);
  CHECK(gram(id) == id);

  DenseMatrix x(2, 1);
  x << 1, 2;
  CHECK(gram(x)(0, 0) == 5.0);
}

TEST_CASE("gram equals symmetrized matmul oracle") {
  RandomStream rs(4);
  DenseMatrix x = random_matrix(rs, 10, 4);
  DenseMatrix xt = x.transpose();
  DenseMatrix m = matmul(xt, x);
  DenseMatrix sym = 0.5 * (m + DenseMatrix(m.transpose()));
  CHECK(gram(x) == sym);
}

TEST_CASE("sym_eigen identity") {
  DenseMatrix id = DenseMatrix::Identity(4, 4);
  EigenDecomposition dec = sym_eigen(id);
  for (Index i = 0; i < 4; ++i) CHECK(dec.eigvals[i] == doctest::Approx(1.0));
  DenseMatrix qtq = matmul(DenseMatrix(dec.Q.transpose()), dec.Q);
  CHECK(frobenius_error(qtq, id) <= 1e-10 * 4);
}

TEST_CASE("sym_eigen closed-form 2x2") {
  DenseMatrix s(2, 2);
  s << 2, 1, 1, 2;
  EigenDecomposition dec = sym_eigen(s);
  CHECK(dec.eigvals[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec.eigvals[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sym_eigen reconstructs random symmetric input") {
  RandomStream rs(5);
  DenseMatrix s = random_psd(rs, 16);
  // mix in negative eigenvalues: general symmetric, not only PSD
  s -= 3.0 * DenseMatrix::Identity(16, 16);
  EigenDecomposition dec = sym_eigen(s);
  for (Index i = 0; i + 1 < 16; ++i) CHECK(dec.eigvals[i] <= dec.eigvals[i + 1]);
  DenseMatrix lam = DenseMatrix::Zero(16, 16);
  for (Index i = 0; i < 16; ++i) lam(i, i) = dec.eigvals[i];
  DenseMatrix rec = matmul(matmul(dec.Q, lam), DenseMatrix(dec.Q.transpose()));
  CHECK(frobenius_error(rec, s) <= 1e-9 * frobenius_norm(s));
  DenseMatrix qtq = matmul(DenseMatrix(dec.Q.transpose()), dec.Q);
  CHECK(frobenius_error(qtq, DenseMatrix::Identity(16, 16)) <= 1e-10 * 16);
}

TEST_CASE("sym_eigen rejects asymmetric input") {
  DenseMatrix s(2, 2);
  s << 1, 2, 0, 1;
  CHECK_THROWS_AS(sym_eigen(s), std::invalid_argument);
}

TEST_CASE("solve_spd trivial cases") {
  RandomStream rs(6);
  DenseMatrix m = random_matrix(rs, 5, 3);
  DenseMatrix zero = DenseMatrix::Zero(5, 5);
  CHECK(test_util::rel_frob_error(solve_spd(zero, 1.0, m), m) <= 1e-15);

  DenseMatrix id = DenseMatrix::Identity(5, 5);
  DenseMatrix half = 0.5 * m;
  CHECK(test_util::rel_frob_error(solve_spd(id, 1.0, m), half) <= 1e-15);
}

TEST_CASE("solve_spd residual on random PSD") {
  RandomStream rs(7);
  DenseMatrix s = random_psd(rs, 12);
  DenseMatrix rhs = random_matrix(rs, 12, 7);
  DenseMatrix y = solve_spd(s, 0.5, rhs);
  DenseMatrix shifted = s + 0.5 * DenseMatrix::Identity(12, 12);
  CHECK(frobenius_error(matmul(shifted, y), rhs) <= 1e-8 * frobenius_norm(rhs));
}

TEST_CASE("solve_spd reports breakdown") {
  DenseMatrix s = -10.0 * DenseMatrix::Identity(3, 3);
  DenseMatrix rhs = DenseMatrix::Identity(3, 3);
  CHECK_THROWS_AS(solve_spd(s, 1.0, rhs), NumericalError);
}

TEST_CASE("svd diagonal and rank-1 cases") {
  DenseMatrix w = DenseMatrix::Zero(3, 3);
  w(0, 0) = 3;
  w(1, 1) = 2;
  w(2, 2) = 1;
  SvdResult dec = svd(w, 2);
  CHECK(dec.singulars[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(dec.singulars[1] == doctest::Approx(2.0).epsilon(1e-12));

  RandomStream rs(8);
  DenseMatrix u = random_matrix(rs, 6, 1);
  DenseMatrix v = random_matrix(rs, 1, 4);
  DenseMatrix r1 = matmul(u, v);
  SvdResult d1 = svd(r1, 1);
  DenseMatrix rec = d1.U;
  rec *= d1.singulars[0];
  CHECK(frobenius_error(matmul(rec, d1.Vt), r1) <= 1e-10 * frobenius_norm(r1));
}

TEST_CASE("svd truncation error equals discarded singular energy") {
  RandomStream rs(9);
  DenseMatrix w = random_matrix(rs, 9, 6);
  SvdResult dec = svd(w, 3);
  DenseMatrix us = dec.U;
  for (Index c = 0; c < 3; ++c) us.col(c) *= dec.singulars[c];
  const double err = frobenius_error(matmul(us, dec.Vt), w);
  double kept = 0.0;
  for (Index c = 0; c < 3; ++c) kept += dec.singulars[c] * dec.singulars[c];
  const double total = frobenius_norm(w) * frobenius_norm(w);
  CHECK(err == doctest::Approx(std::sqrt(total - kept)).epsilon(1e-8));
}

TEST_CASE("svd orthonormality, monotone truncation, full reconstruction") {
  RandomStream rs(10);
  DenseMatrix w = random_matrix(rs, 8, 5);
  double prev = 1e300;
  for (Index k = 1; k <= 5; ++k) {
    SvdResult dec = svd(w, k);
    DenseMatrix utu = matmul(DenseMatrix(dec.U.transpose()), dec.U);
    CHECK(frobenius_error(utu, DenseMatrix::Identity(k, k)) <= 1e-10 * k);
    DenseMatrix vvt = matmul(dec.Vt, DenseMatrix(dec.Vt.transpose()));
    CHECK(frobenius_error(vvt, DenseMatrix::Identity(k, k)) <= 1e-10 * k);
    for (Index c = 0; c + 1 < k; ++c) CHECK(dec.singulars[c] >= dec.singulars[c + 1]);
    DenseMatrix us = dec.U;
    for (Index c = 0; c < k; ++c) us.col(c) *= dec.singulars[c];
    const double err = frobenius_error(matmul(us, dec.Vt), w);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK(prev <= 1e-8 * frobenius_norm(w));
  CHECK_THROWS_AS(svd(w, 6), std::invalid_argument);
  CHECK_THROWS_AS(svd(w, 0), std::invalid_argument);
}

TEST_CASE("frobenius_error basics and oracle") {
  RandomStream rs(11);
  DenseMatrix m = random_matrix(rs, 4, 4);
  CHECK(frobenius_error(m, m) == 0.0);

  DenseMatrix a(1, 2), b(1, 2);
  a << 3, 4;
  b << 0, 0;
  CHECK(frobenius_error(a, b) == 5.0);

  DenseMatrix x = random_matrix(rs, 5, 7);
  DenseMatrix y = random_matrix(rs, 5, 7);
  double sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double d = x.data()[i] - y.data()[i];
    sum += d * d;
  }
  CHECK(frobenius_error(x, y) == doctest::Approx(std::sqrt(sum)).epsilon(1e-12));

  DenseMatrix wrong = random_matrix(rs, 7, 5);
  CHECK_THROWS_AS(frobenius_error(x, wrong), std::invalid_argument);
}
