#include "kmslab/shift_space.hpp"

#include <stdexcept>
#include <string>

#include "kmslab/errors.hpp"
#include "kmslab/numeric.hpp"

namespace kmslab {

Word parse_word(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw std::invalid_argument("invalid symbol at position " +
                                  std::to_string(i + 1));
    }
  }
  return Word(std::string(text));
}

Word concat(const Word& a, const Word& b) { return Word(a.str() + b.str()); }

std::vector<Word> all_words(std::size_t length) {
  std::vector<Word> out;
  out.reserve(std::size_t{1} << length);
  std::string buf(length, '0');
  const std::size_t count = std::size_t{1} << length;
  for (std::size_t v = 0; v < count; ++v) {
    for (std::size_t i = 0; i < length; ++i) {
      buf[i] = ((v >> (length - 1 - i)) & 1) ? '1' : '0';
    }
    out.push_back(parse_word(buf));
  }
  return out;
}

TailPoint::TailPoint(Word stem) : stem_(std::move(stem)) {
  if (!stem_.empty() && stem_.last() != 0) {
    throw std::invalid_argument(
        "tail point stem must be empty or end in 0 (canonical form)");
  }
}

TailPoint shift(const TailPoint& y) {
  if (y.is_fixed_point()) return y;
  // Dropping the head keeps the terminal 0, so the result is canonical.
  return TailPoint(parse_word(std::string_view(y.stem().str()).substr(1)));
}

double potential(const TailPoint& y) {
  const std::size_t j = y.stem().first_zero();
  return j == 0 ? 0.0 : 1.0 / static_cast<double>(j);
}

double potential_on_cylinder(const Word& u) {
  const std::size_t j = u.first_zero();
  if (j == 0) {
    throw std::invalid_argument(
        "potential is not constant on an all-ones cylinder");
  }
  return 1.0 / static_cast<double>(j);
}

double birkhoff_sum(const TailPoint& y, std::size_t n) {
  KahanSum acc;
  const std::string& s = y.stem().str();
  const std::size_t steps = std::min(n, s.size());
  for (std::size_t j = 0; j < steps; ++j) {
    // First 0 of the j-step shift, scanned inside the original stem.
    const auto p = s.find('0', j);
    if (p == std::string::npos) break;  // unreachable for canonical stems
    acc.add(1.0 / static_cast<double>(p - j + 1));
  }
  return require_finite(acc.value(), "birkhoff_sum");
}

std::vector<TailPoint> enumerate_level_set(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw ResourceLimit("level set enumeration exceeds cap " +
                        std::to_string(cap) + " (requested n=" +
                        std::to_string(n) + ")");
  }
  std::vector<TailPoint> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  const std::size_t count = std::size_t{1} << (n - 1);
  out.reserve(count);
  std::string buf(n, '0');
  for (std::size_t v = 0; v < count; ++v) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      buf[i] = ((v >> (n - 2 - i)) & 1) ? '1' : '0';
    }
    buf[n - 1] = '0';
    out.push_back(TailPoint(parse_word(buf)));
  }
  return out;
}

bool in_cylinder(const TailPoint& y, const Word& u) {
  for (std::size_t pos = 1; pos <= u.length(); ++pos) {
    if (y.symbol(pos) != u.at(pos)) return false;
  }
  return true;
}

}  // namespace kmslab
