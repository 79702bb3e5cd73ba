#include "kmslab/gibbs_representation.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmslab/errors.hpp"
#include "kmslab/numeric.hpp"
#include "kmslab/partition_function.hpp"

namespace kmslab {

namespace {

// Index layout: the fixed point at 0; level n >= 1 occupies
// [2^(n-1), 2^n) ordered by the first n-1 stem bits (the last bit is 0).
std::size_t level_of_index(std::size_t i) {
  return i == 0 ? 0 : std::bit_width(i);
}

// Full stem bits (MSB = first symbol, LSB = terminal 0) of a level-n index.
std::uint64_t stem_bits(std::size_t i, std::size_t n) {
  return (static_cast<std::uint64_t>(i) - (std::uint64_t{1} << (n - 1))) << 1;
}

std::size_t index_of(std::uint64_t bits, std::size_t n) {
  if (n == 0) return 0;
  return (std::size_t{1} << (n - 1)) + static_cast<std::size_t>(bits >> 1);
}

std::size_t leading_ones(std::uint64_t bits, std::size_t n) {
  std::size_t c = 0;
  while (c < n && ((bits >> (n - 1 - c)) & 1)) ++c;
  return c;
}

}  // namespace

std::size_t TruncatedRep::level_of(Eigen::Index i) const {
  return level_of_index(static_cast<std::size_t>(i));
}

TailPoint TruncatedRep::basis_point(Eigen::Index i) const {
  const std::size_t n = level_of(i);
  if (n == 0) return TailPoint{};
  const std::uint64_t bits = stem_bits(static_cast<std::size_t>(i), n);
  std::string s(n, '0');
  for (std::size_t p = 0; p < n; ++p) {
    if ((bits >> (n - 1 - p)) & 1) s[p] = '1';
  }
  return TailPoint{parse_word(s)};
}

Eigen::VectorXcd TruncatedRep::flow_unitary(double t) const {
  Eigen::VectorXcd u(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    u[i] = std::polar(1.0, t * orbit_sum_[i]);
  }
  return u;
}

TruncatedRep build_rep(double beta, Complex lambda, std::size_t level_cap) {
  if (level_cap > kMaxRepLevel) {
    throw ResourceLimit("representation level cap is " +
                        std::to_string(kMaxRepLevel));
  }
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) {
    throw std::invalid_argument("lambda must lie on the unit circle");
  }

  TruncatedRep rep;
  rep.beta_ = beta;
  rep.lambda_ = lambda;
  rep.level_cap_ = level_cap;

  const Eigen::Index dim = Eigen::Index{1} << level_cap;
  rep.orbit_sum_.resize(dim);
  rep.h_.resize(dim);

  std::vector<Eigen::Triplet<Complex>> t0, t1;
  t0.reserve(static_cast<std::size_t>(dim) / 2);
  t1.reserve(static_cast<std::size_t>(dim) / 2 + 1);

  rep.orbit_sum_[0] = 0.0;
  t1.emplace_back(0, 0, lambda);  // the fixed-point row of V1

  for (std::size_t i = 1; i < static_cast<std::size_t>(dim); ++i) {
    const std::size_t n = level_of_index(i);
    const std::uint64_t bits = stem_bits(i, n);
    const int head = static_cast<int>((bits >> (n - 1)) & 1);
    const std::uint64_t tail = bits & ((std::uint64_t{1} << (n - 1)) - 1);
    const std::size_t sigma = index_of(tail, n - 1);

    // S accumulates one potential value per level along the orbit, so the
    // parent entry is always already filled.
    const double f = 1.0 / static_cast<double>(leading_ones(bits, n) + 1);
    rep.orbit_sum_[static_cast<Eigen::Index>(i)] =
        f + rep.orbit_sum_[static_cast<Eigen::Index>(sigma)];

    const auto row = static_cast<Eigen::Index>(i);
    const auto col = static_cast<Eigen::Index>(sigma);
    if (head == 0) {
      t0.emplace_back(row, col, Complex{1.0, 0.0});
    } else {
      t1.emplace_back(row, col, Complex{1.0, 0.0});
    }
  }

  rep.v0_.resize(dim, dim);
  rep.v1_.resize(dim, dim);
  rep.v0_.setFromTriplets(t0.begin(), t0.end());
  rep.v1_.setFromTriplets(t1.begin(), t1.end());

  KahanSum tr;
  for (Eigen::Index i = 0; i < dim; ++i) {
    rep.h_[i] = std::exp(-beta * rep.orbit_sum_[i]);
    tr.add(rep.h_[i]);
  }
  rep.trace_ = require_finite(tr.value(), "trace of the density");
  return rep;
}

Eigen::VectorXd cylinder_projection(const TruncatedRep& rep, const Word& u) {
  if (u.length() > rep.level_cap()) {
    throw std::invalid_argument(
        "cylinder projection: word longer than the retained levels");
  }
  Eigen::VectorXd d(rep.dim());
  for (Eigen::Index i = 0; i < rep.dim(); ++i) {
    d[i] = in_cylinder(rep.basis_point(i), u) ? 1.0 : 0.0;
  }
  return d;
}

GibbsState gibbs_state(const TruncatedRep& rep) { return GibbsState{&rep}; }

Complex evaluate(const GibbsState& state, const SparseOp& a) {
  const TruncatedRep& rep = *state.rep;
  if (a.rows() != rep.dim() || a.cols() != rep.dim()) {
    throw std::invalid_argument("evaluate: operator dimension mismatch");
  }
  KahanSum re, im;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseOp::InnerIterator it(a, k); it; ++it) {
      if (it.row() == it.col()) {
        const Complex v = rep.density()[it.row()] * it.value();
        re.add(v.real());
        im.add(v.imag());
      }
    }
  }
  return Complex{re.value(), im.value()} / rep.trace();
}

Complex evaluate(const GibbsState& state, const Eigen::VectorXd& diagonal) {
  const TruncatedRep& rep = *state.rep;
  if (diagonal.size() != rep.dim()) {
    throw std::invalid_argument("evaluate: diagonal dimension mismatch");
  }
  KahanSum re;
  for (Eigen::Index i = 0; i < rep.dim(); ++i) {
    re.add(rep.density()[i] * diagonal[i]);
  }
  return Complex{re.value() / rep.trace(), 0.0};
}

CuntzReport check_cuntz(const TruncatedRep& rep) {
  CuntzReport out;
  const Eigen::Index dim = rep.dim();

  SparseOp completeness = rep.v0() * SparseOp(rep.v0().adjoint()) +
                          rep.v1() * SparseOp(rep.v1().adjoint());
  std::vector<char> diag_seen(static_cast<std::size_t>(dim), 0);
  for (int k = 0; k < completeness.outerSize(); ++k) {
    for (SparseOp::InnerIterator it(completeness, k); it; ++it) {
      const double expected = it.row() == it.col() ? 1.0 : 0.0;
      out.completeness_residual = std::max(out.completeness_residual,
                                           std::abs(it.value() - expected));
      if (it.row() == it.col()) diag_seen[static_cast<std::size_t>(it.row())] = 1;
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!diag_seen[static_cast<std::size_t>(i)]) {
      out.completeness_residual = std::max(out.completeness_residual, 1.0);
    }
  }

  for (const SparseOp* v : {&rep.v0(), &rep.v1()}) {
    SparseOp w = SparseOp(v->adjoint()) * (*v);
    Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(dim);
    for (int k = 0; k < w.outerSize(); ++k) {
      for (SparseOp::InnerIterator it(w, k); it; ++it) {
        if (it.row() == it.col()) diag[it.row()] = it.value();
      }
    }
    for (Eigen::Index z = 0; z < dim; ++z) {
      if (rep.interior(z)) {
        out.isometry_interior_residual = std::max(
            out.isometry_interior_residual, std::abs(diag[z] - Complex{1.0, 0.0}));
      } else {
        out.isometry_boundary_value =
            std::max(out.isometry_boundary_value, std::abs(diag[z]));
      }
    }
  }
  return out;
}

double check_covariance(const TruncatedRep& rep, double t) {
  const Eigen::VectorXcd u = rep.flow_unitary(t);
  Eigen::VectorXcd d(rep.dim());
  d[0] = Complex{1.0, 0.0};  // the potential vanishes at the fixed point
  for (Eigen::Index i = 1; i < rep.dim(); ++i) {
    d[i] = std::polar(1.0, t * potential(rep.basis_point(i)));
  }

  double residual = 0.0;
  for (const SparseOp* v : {&rep.v0(), &rep.v1()}) {
    for (int k = 0; k < v->outerSize(); ++k) {
      for (SparseOp::InnerIterator it(*v, k); it; ++it) {
        const Complex lhs = u[it.row()] * it.value() * std::conj(u[it.col()]);
        const Complex rhs = d[it.row()] * it.value();
        residual = std::max(residual, std::abs(lhs - rhs));
      }
    }
  }
  return residual;
}

double check_kms(const TruncatedRep& rep, const SparseOp& a, const SparseOp& b) {
  if (a.rows() != rep.dim() || a.cols() != rep.dim() ||
      b.rows() != rep.dim() || b.cols() != rep.dim()) {
    throw std::invalid_argument("check_kms: operator dimension mismatch");
  }
  const auto max_entry = [](const SparseOp& m) {
    double mx = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseOp::InnerIterator it(m, k); it; ++it) {
        mx = std::max(mx, std::abs(it.value()));
      }
    }
    return mx;
  };
  if (max_entry(a) > 1e3 || max_entry(b) > 1e3) {
    throw std::invalid_argument("check_kms: entries exceed the conditioning guard");
  }

  const GibbsState state = gibbs_state(rep);
  const Complex lhs = evaluate(state, SparseOp(a * b));

  // H a H^-1 is a diagonal scaling of the sparse entries.
  SparseOp scaled = a;
  for (int k = 0; k < scaled.outerSize(); ++k) {
    for (SparseOp::InnerIterator it(scaled, k); it; ++it) {
      it.valueRef() *= rep.density()[it.row()] / rep.density()[it.col()];
    }
  }
  const Complex rhs = evaluate(state, SparseOp(b * scaled));
  return std::abs(lhs - rhs);
}

SparseOp word_operator(const TruncatedRep& rep, const Word& u) {
  SparseOp acc(rep.dim(), rep.dim());
  acc.setIdentity();
  for (std::size_t p = 1; p <= u.length(); ++p) {
    acc = acc * (u.at(p) == 0 ? rep.v0() : rep.v1());
  }
  return acc;
}

CircleAverage circle_average(double beta, std::size_t level_cap,
                             std::size_t quadrature, const Word& u,
                             const Word& v) {
  if (quadrature < 2) {
    throw std::invalid_argument("circle_average: need at least two nodes");
  }
  KahanSum re, im;
  for (std::size_t q = 0; q < quadrature; ++q) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(q) /
                         static_cast<double>(quadrature);
    const TruncatedRep rep = build_rep(beta, std::polar(1.0, angle), level_cap);
    const SparseOp m =
        word_operator(rep, u) * SparseOp(word_operator(rep, v).adjoint());
    const Complex val = evaluate(gibbs_state(rep), m);
    re.add(val.real());
    im.add(val.imag());
  }
  CircleAverage out;
  const double n = static_cast<double>(quadrature);
  out.quadrature_mean = Complex{re.value() / n, im.value() / n};

  const AtomicMeasure am = atomic_measure(beta, level_cap);
  out.reference = (u == v) ? Complex{am.cylinder_mass(u), 0.0} : Complex{0.0, 0.0};
  return out;
}

SparseOp random_unit_sparse(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pos(0, dim - 1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(dim) * 4);
  for (Eigen::Index k = 0; k < dim * 4; ++k) {
    trips.emplace_back(pos(rng), pos(rng), std::polar(1.0, angle(rng)));
  }
  SparseOp m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace kmslab
