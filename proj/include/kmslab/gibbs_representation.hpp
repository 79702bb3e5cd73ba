#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "kmslab/shift_space.hpp"

namespace kmslab {

using Complex = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<Complex>;

inline constexpr std::size_t kMaxRepLevel = 22;

/// Sparse truncation of the circle-parameter representation on l2 of the
/// tail set, restricted to levels 0..level_cap (dimension 2^level_cap).
///
/// Basis order is level-major with lexicographic stems inside a level; the
/// basis point at index 0 is the fixed point. Each generator has at most one
/// entry per row: row y of V_i carries 1 at column shift(y) when the stem of
/// y starts with symbol i, and the fixed-point row of V_1 carries lambda on
/// the diagonal. Rows at the top level keep their targets, so V_i is total
/// while V_i* loses the mass of the discarded next level.
class TruncatedRep {
 public:
  double beta() const { return beta_; }
  Complex lambda() const { return lambda_; }
  std::size_t level_cap() const { return level_cap_; }
  Eigen::Index dim() const { return h_.size(); }

  const SparseOp& v0() const { return v0_; }
  const SparseOp& v1() const { return v1_; }

  /// Birkhoff sums S(y) over the full level of each basis point.
  const Eigen::VectorXd& orbit_sum() const { return orbit_sum_; }
  /// Diagonal density H with entries exp(-beta * S(y)).
  const Eigen::VectorXd& density() const { return h_; }
  double trace() const { return trace_; }

  std::size_t level_of(Eigen::Index i) const;
  /// Interior = level <= level_cap - 1; relation checks split on this.
  bool interior(Eigen::Index i) const { return level_of(i) < level_cap_; }
  TailPoint basis_point(Eigen::Index i) const;

  /// Diagonal of the flow unitary U_t, entries exp(i t S(y)).
  Eigen::VectorXcd flow_unitary(double t) const;

 private:
  friend TruncatedRep build_rep(double beta, Complex lambda,
                                std::size_t level_cap);
  double beta_ = 0.0;
  Complex lambda_{1.0, 0.0};
  std::size_t level_cap_ = 0;
  Eigen::VectorXd orbit_sum_;
  Eigen::VectorXd h_;
  double trace_ = 0.0;
  SparseOp v0_, v1_;
};

/// Requires level_cap <= 22 and |lambda| = 1 within 1e-12.
TruncatedRep build_rep(double beta, Complex lambda, std::size_t level_cap);

/// Diagonal 0/1 projection onto the cylinder [u]; requires |u| <= level_cap
/// (membership of the discarded levels is undecidable after truncation).
Eigen::VectorXd cylinder_projection(const TruncatedRep& rep, const Word& u);

/// The Gibbs functional a -> Tr(H a)/Tr(H) of a representation.
struct GibbsState {
  const TruncatedRep* rep = nullptr;
};
GibbsState gibbs_state(const TruncatedRep& rep);
Complex evaluate(const GibbsState& state, const SparseOp& a);
Complex evaluate(const GibbsState& state, const Eigen::VectorXd& diagonal);

struct CuntzReport {
  double completeness_residual = 0.0;       // max |(V0 V0* + V1 V1* - I)|
  double isometry_interior_residual = 0.0;  // max |(Vi* Vi - I)_zz|, interior z
  double isometry_boundary_value = 0.0;     // max |(Vi* Vi)_zz|, top-level z
};
CuntzReport check_cuntz(const TruncatedRep& rep);

/// Max-norm residual of U_t V_i U_t* = D_t V_i with D_t = diag(exp(i t F)).
double check_covariance(const TruncatedRep& rep, double t);

/// |state(a b) - state(b H a H^-1)|; zero up to rounding by trace cyclicity.
/// Entries of a and b must stay below 1e3 (conditioning guard).
double check_kms(const TruncatedRep& rep, const SparseOp& a, const SparseOp& b);

/// Product of generators along the word (identity for the empty word).
SparseOp word_operator(const TruncatedRep& rep, const Word& u);

struct CircleAverage {
  Complex quadrature_mean{0.0, 0.0};
  Complex reference{0.0, 0.0};
};

/// Averages the state of V_u V_v* over the Q-th roots of unity and pairs it
/// with the atomic-measure value under the same truncation. The quadrature
/// is exact as soon as Q exceeds every circle power present, which is at
/// most max(|u|, |v|). Requires Q >= 2.
CircleAverage circle_average(double beta, std::size_t level_cap,
                             std::size_t quadrature, const Word& u,
                             const Word& v);

/// Deterministic sparse matrix with unit-modulus entries at random positions
/// (about four per row); used by the modular-relation checks.
SparseOp random_unit_sparse(Eigen::Index dim, std::uint64_t seed);

}  // namespace kmslab
