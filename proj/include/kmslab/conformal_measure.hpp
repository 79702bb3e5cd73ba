#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmslab/shift_space.hpp"

namespace kmslab {

inline constexpr std::size_t kMaxTableDepth = 16;

/// Cylinder masses of the conformal normalization recursion, level by level.
/// Base level: mass([0]) = e^-beta, mass([1]) = 1 - e^-beta. Prepending a 0
/// scales by e^-beta; prepending a 1 to a word whose first 0 sits at position
/// j scales by e^(-beta/(j+1)); the all-ones word takes the normalization
/// residual. Negative residuals are retained, not clamped: a negative value
/// is the computational witness that no conformal probability measure exists
/// at this beta.
class CylinderTable {
 public:
  double beta() const { return beta_; }
  std::size_t depth() const { return levels_.size(); }

  /// Mass of [u] for any 1 <= |u| <= depth. Index = word read as binary.
  double mass(const Word& u) const;

  /// All 2^m masses at level m, in lexicographic word order.
  const std::vector<double>& level(std::size_t m) const { return levels_[m - 1]; }

  /// R_1..R_depth where R_m is the mass of the all-ones word at level m.
  const std::vector<double>& residual_trace() const { return residuals_; }

  /// Largest |mass([w]) - mass([w0]) - mass([w1])| seen while building.
  double max_additivity_defect() const { return additivity_defect_; }

 private:
  friend CylinderTable conformal_table(double beta, std::size_t depth);
  double beta_ = 0.0;
  std::vector<std::vector<double>> levels_;
  std::vector<double> residuals_;
  double additivity_defect_ = 0.0;
};

CylinderTable conformal_table(double beta, std::size_t depth);

/// exp(-beta * Birkhoff sum) for a terminal-0 word; equals the recursion mass
/// of the same word. Rejects empty words and words ending in 1.
double cylinder_mass_closed_form(double beta, const Word& u);

struct NonexistenceReport {
  double beta = 0.0;
  std::optional<std::size_t> first_negative_depth;
  std::size_t probe_depth = 0;
};

/// Scans the O(n) residual recursion R_n = 1 - sum_{k<=n} exp(-beta*s_k) for
/// the first depth where R_n < -1e-12.
NonexistenceReport detect_nonexistence(double beta, std::size_t probe_depth);

void write_csv(const CylinderTable& table, std::ostream& os);
std::string to_json(const CylinderTable& table);

struct CsvCylinderRows {
  std::vector<std::pair<std::string, double>> rows;  // (word, mass)
  double residual = 0.0;                             // trailing residual row
};
CsvCylinderRows read_csv(std::istream& is);

}  // namespace kmslab
