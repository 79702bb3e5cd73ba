#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kmslab {

/// Finite binary word over {0,1}. Positions are 1-based and the canonical text
/// form is the left-to-right symbol string, e.g. "110". The empty word names
/// the full-space cylinder.
class Word {
 public:
  Word() = default;

  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }

  /// Symbol at 1-based position, as 0 or 1.
  int at(std::size_t pos) const { return symbols_[pos - 1] - '0'; }

  const std::string& str() const { return symbols_; }

  /// 1-based position of the first 0, or 0 when the word is all ones (or empty).
  std::size_t first_zero() const {
    const auto p = symbols_.find('0');
    return p == std::string::npos ? 0 : p + 1;
  }
  bool all_ones() const { return first_zero() == 0; }
  int last() const { return symbols_.back() - '0'; }

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word&, const Word&) = default;

 private:
  friend Word parse_word(std::string_view);
  friend Word concat(const Word&, const Word&);
  explicit Word(std::string s) : symbols_(std::move(s)) {}

  std::string symbols_;
};

/// Parses a "0"/"1" string; rejects any other character, naming its position.
Word parse_word(std::string_view text);

Word concat(const Word& a, const Word& b);

/// All words of the given length in lexicographic order (0 < 1).
std::vector<Word> all_words(std::size_t length);

/// A point of the tail set: stem . 1^inf. The stem is canonical, meaning it is
/// empty (the fixed point 1^inf) or ends in 0; this makes equality and the
/// level |y| = |stem| O(1).
class TailPoint {
 public:
  TailPoint() = default;  // the fixed point 1^inf
  explicit TailPoint(Word stem);

  std::size_t level() const { return stem_.length(); }
  const Word& stem() const { return stem_; }
  bool is_fixed_point() const { return stem_.empty(); }

  /// Symbol of the infinite string at 1-based position (stem padded with 1s).
  int symbol(std::size_t pos) const {
    return pos <= stem_.length() ? stem_.at(pos) : 1;
  }

  friend bool operator==(const TailPoint&, const TailPoint&) = default;
  friend std::strong_ordering operator<=>(const TailPoint&, const TailPoint&) = default;

 private:
  Word stem_;
};

/// One step of the left shift; the fixed point is invariant.
TailPoint shift(const TailPoint& y);

/// The potential: 1/(position of the first 0), and 0 at the fixed point.
double potential(const TailPoint& y);

/// Value of the potential on the cylinder [u]; requires u to contain a 0
/// (the potential is not constant on an all-ones cylinder).
double potential_on_cylinder(const Word& u);

/// Compensated sum of the potential along the first n shift iterates.
/// Stable in n: terms beyond the level are exactly zero.
double birkhoff_sum(const TailPoint& y, std::size_t n);

inline constexpr std::size_t kDefaultLevelSetCap = 26;

/// The points of level exactly n, in lexicographic stem order. For n >= 1
/// these are the stems of length n ending in 0, so the count is 2^(n-1).
std::vector<TailPoint> enumerate_level_set(std::size_t n,
                                           std::size_t cap = kDefaultLevelSetCap);

/// Membership of the point stem.1^inf in the cylinder [u].
bool in_cylinder(const TailPoint& y, const Word& u);

}  // namespace kmslab
