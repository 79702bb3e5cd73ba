#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "kmslab/critical_temperature.hpp"
#include "kmslab/errors.hpp"
#include "kmslab/gibbs_representation.hpp"
#include "kmslab/partition_function.hpp"
#include "kmslab/shift_space.hpp"

using namespace kmslab;

namespace {

const Complex kLambda = std::polar(1.0, 2.0 * std::numbers::pi / 7.0);

// Kernel oracle: the generator entry at (y, z) is lambda^(1-|y|+|z|) when the
// first symbol of y matches and z is the shift of y, and zero otherwise. Built
// directly from the points, independent of the production index arithmetic.
Complex kernel_entry(Complex lambda, int generator, const TailPoint& y,
                     const TailPoint& z) {
  if (y.symbol(1) != generator) return {0.0, 0.0};
  if (shift(y) != z) return {0.0, 0.0};
  const auto k = 1 - static_cast<long>(y.level()) + static_cast<long>(z.level());
  Complex v{1.0, 0.0};
  for (long i = 0; i < k; ++i) v *= lambda;
  return v;
}

}  // namespace

TEST_CASE("smallest truncation has the expected explicit form") {
  const double beta = 2.0;
  const TruncatedRep rep = build_rep(beta, kLambda, 1);
  REQUIRE(rep.dim() == 2);
  CHECK(rep.basis_point(0) == TailPoint{});
  CHECK(rep.basis_point(1) == TailPoint{parse_word("0")});

  CHECK(std::abs(rep.v1().coeff(0, 0) - kLambda) <= 1e-15);
  CHECK(std::abs(rep.v1().coeff(1, 0)) == 0.0);
  CHECK(std::abs(rep.v0().coeff(1, 0) - Complex{1.0, 0.0}) == 0.0);
  CHECK(std::abs(rep.v0().coeff(0, 0)) == 0.0);

  CHECK(rep.density()[0] == 1.0);
  CHECK(rep.density()[1] == doctest::Approx(std::exp(-beta)).epsilon(1e-15));
}

TEST_CASE("generators agree with the kernel oracle on small truncations") {
  const TruncatedRep rep = build_rep(1.3, kLambda, 5);
  for (Eigen::Index i = 0; i < rep.dim(); ++i) {
    for (Eigen::Index j = 0; j < rep.dim(); ++j) {
      const TailPoint y = rep.basis_point(i);
      const TailPoint z = rep.basis_point(j);
      CHECK(std::abs(rep.v0().coeff(i, j) - kernel_entry(kLambda, 0, y, z)) <= 1e-15);
      CHECK(std::abs(rep.v1().coeff(i, j) - kernel_entry(kLambda, 1, y, z)) <= 1e-15);
    }
  }
}

TEST_CASE("basis layout: dimension, order, determinism") {
  const TruncatedRep rep = build_rep(2.0, kLambda, 6);
  CHECK(rep.dim() == 64);
  // level-major, lexicographic inside each level
  std::size_t prev_level = 0;
  std::string prev_stem;
  for (Eigen::Index i = 0; i < rep.dim(); ++i) {
    const TailPoint y = rep.basis_point(i);
    CHECK(y.level() == rep.level_of(i));
    if (y.level() == prev_level && i > 0) {
      CHECK(prev_stem < y.stem().str());
    } else if (i > 0) {
      CHECK(y.level() == prev_level + 1);
    }
    prev_level = y.level();
    prev_stem = y.stem().str();
  }

  const TruncatedRep again = build_rep(2.0, kLambda, 6);
  CHECK((rep.v0() - again.v0()).norm() == 0.0);
  CHECK((rep.v1() - again.v1()).norm() == 0.0);
  CHECK((rep.density() - again.density()).norm() == 0.0);
}

TEST_CASE("build_rep validates inputs") {
  CHECK_THROWS_AS(build_rep(2.0, kLambda, kMaxRepLevel + 1), ResourceLimit);
  CHECK_THROWS_AS(build_rep(2.0, Complex{1.1, 0.0}, 4), std::invalid_argument);
}

TEST_CASE("orbit sums accumulate the potential along shifts") {
  const TruncatedRep rep = build_rep(1.9, kLambda, 8);
  for (Eigen::Index i = 0; i < rep.dim(); ++i) {
    const TailPoint y = rep.basis_point(i);
    CHECK(rep.orbit_sum()[i] ==
          doctest::Approx(birkhoff_sum(y, y.level())).epsilon(1e-14));
  }
}

TEST_CASE("cuntz relations under truncation") {
  for (const std::size_t N : {1u, 6u, 12u}) {
    const TruncatedRep rep = build_rep(4.0, kLambda, N);
    const CuntzReport r = check_cuntz(rep);
    CHECK(r.completeness_residual <= 1e-14);
    CHECK(r.isometry_interior_residual <= 1e-14);
    CHECK(r.isometry_boundary_value <= 1e-14);  // truncation kills the next level
  }
}

TEST_CASE("covariance identity") {
  const TruncatedRep rep = build_rep(4.0, kLambda, 12);
  CHECK(check_covariance(rep, 0.0) == 0.0);
  CHECK(check_covariance(rep, 0.37) <= 1e-13);
  CHECK(check_covariance(rep, 1.0) <= 1e-13);
  CHECK(check_covariance(rep, 2.0 * std::numbers::pi) <= 1e-13);
}

TEST_CASE("flow unitary has unimodular diagonal") {
  const TruncatedRep rep = build_rep(4.0, kLambda, 10);
  const Eigen::VectorXcd u = rep.flow_unitary(0.83);
  for (Eigen::Index i = 0; i < rep.dim(); ++i) {
    CHECK(std::abs(std::abs(u[i]) - 1.0) <= 1e-15);
  }
}

TEST_CASE("trace of the density matches the partition prefix") {
  for (const double beta : {1.5, 4.0}) {
    const TruncatedRep rep = build_rep(beta, kLambda, 12);
    const PartitionTable t = partition_sequence(beta, 12);
    CHECK(std::abs(rep.trace() - (1.0 + t.partial_M[12])) <= 1e-12);
  }
}

TEST_CASE("gibbs state: unitality, projections, positivity") {
  const double beta = 4.0;
  const TruncatedRep rep = build_rep(beta, kLambda, 10);
  const GibbsState state = gibbs_state(rep);

  SparseOp eye(rep.dim(), rep.dim());
  eye.setIdentity();
  CHECK(std::abs(evaluate(state, eye) - Complex{1.0, 0.0}) <= 1e-14);

  const Eigen::VectorXd full = cylinder_projection(rep, parse_word(""));
  CHECK(std::abs(evaluate(state, full) - Complex{1.0, 0.0}) <= 1e-14);

  // cylinder values match the atomic measure under the same truncation
  const AtomicMeasure m = atomic_measure(beta, 10);
  for (const char* w : {"0", "1", "10", "110", "0110"}) {
    const Word u = parse_word(w);
    const Complex v = evaluate(state, cylinder_projection(rep, u));
    CHECK(std::abs(v.imag()) == 0.0);
    CHECK(v.real() == doctest::Approx(m.cylinder_mass(u)).epsilon(1e-13));
  }

  // positivity of a* a on random sparse operators
  for (std::uint64_t seed = 7; seed < 12; ++seed) {
    const SparseOp a = random_unit_sparse(rep.dim(), seed);
    const Complex v = evaluate(state, SparseOp(SparseOp(a.adjoint()) * a));
    CHECK(v.real() >= -1e-12);
    CHECK(std::abs(v.imag()) <= 1e-12);
  }
}

TEST_CASE("cylinder projection shapes") {
  const TruncatedRep rep = build_rep(2.0, kLambda, 3);
  const Eigen::VectorXd p1 = cylinder_projection(rep, parse_word("1"));
  CHECK(p1[0] == 1.0);  // the fixed point lies in [1]
  for (Eigen::Index i = 1; i < rep.dim(); ++i) {
    CHECK(p1[i] == (rep.basis_point(i).stem().at(1) == 1 ? 1.0 : 0.0));
  }
  const TruncatedRep tiny = build_rep(2.0, kLambda, 1);
  const Eigen::VectorXd p0 = cylinder_projection(tiny, parse_word("0"));
  CHECK(p0.sum() == 1.0);
  CHECK(p0[1] == 1.0);
  CHECK_THROWS_AS(cylinder_projection(tiny, parse_word("00")), std::invalid_argument);
}

TEST_CASE("modular relation residual") {
  const TruncatedRep rep = build_rep(4.0, kLambda, 12);
  SparseOp eye(rep.dim(), rep.dim());
  eye.setIdentity();
  CHECK(check_kms(rep, eye, eye) <= 1e-15);

  const SparseOp v0adj = SparseOp(rep.v0().adjoint());
  CHECK(check_kms(rep, rep.v0(), v0adj) <= 1e-10);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SparseOp a = random_unit_sparse(rep.dim(), seed);
    const SparseOp b = random_unit_sparse(rep.dim(), seed + 1000);
    CHECK(check_kms(rep, a, b) <= 1e-10);
  }

  SparseOp big = eye;
  big.coeffRef(0, 0) = Complex{2e3, 0.0};
  CHECK_THROWS_AS(check_kms(rep, big, eye), std::invalid_argument);
}

TEST_CASE("word operators compose the generators") {
  const TruncatedRep rep = build_rep(2.0, kLambda, 4);
  const SparseOp w = word_operator(rep, parse_word("01"));
  const SparseOp direct = SparseOp(rep.v0() * rep.v1());
  CHECK((w - direct).norm() <= 1e-15);
  const SparseOp empty = word_operator(rep, parse_word(""));
  SparseOp eye(rep.dim(), rep.dim());
  eye.setIdentity();
  CHECK((empty - eye).norm() == 0.0);
}

TEST_CASE("circle averages: identity, diagonal, off-diagonal") {
  const double beta = 4.0;
  const std::size_t N = 8;

  const CircleAverage trivial =
      circle_average(beta, N, 16, parse_word(""), parse_word(""));
  CHECK(std::abs(trivial.quadrature_mean - Complex{1.0, 0.0}) <= 1e-13);
  CHECK(std::abs(trivial.reference - Complex{1.0, 0.0}) <= 1e-13);

  const CircleAverage diag =
      circle_average(beta, N, 16, parse_word("0"), parse_word("0"));
  CHECK(std::abs(diag.quadrature_mean - diag.reference) <= 1e-10);

  const CircleAverage off =
      circle_average(beta, N, 64, parse_word("1"), parse_word(""));
  CHECK(std::abs(off.reference) == 0.0);
  CHECK(std::abs(off.quadrature_mean) <= 1e-10);

  CHECK_THROWS_AS(circle_average(beta, N, 1, parse_word(""), parse_word("")),
                  std::invalid_argument);
}

TEST_CASE("quadrature is exact once the node count clears the word lengths") {
  const double beta = 4.0;
  const std::size_t N = 6;
  for (const char* us : {"", "1", "10", "011"}) {
    for (const char* vs : {"", "0", "11"}) {
      const Word u = parse_word(us);
      const Word v = parse_word(vs);
      const CircleAverage a = circle_average(beta, N, 4, u, v);
      const CircleAverage b = circle_average(beta, N, 64, u, v);
      CHECK(std::abs(a.quadrature_mean - b.quadrature_mean) <= 1e-12);
    }
  }
}
