#include "kmslab/conformal_measure.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "kmslab/critical_temperature.hpp"
#include "kmslab/errors.hpp"
#include "kmslab/numeric.hpp"

namespace kmslab {

namespace {

std::size_t word_index(const Word& u) {
  std::size_t v = 0;
  for (std::size_t p = 1; p <= u.length(); ++p) v = (v << 1) | std::size_t(u.at(p));
  return v;
}

std::string word_text(std::size_t index, std::size_t length) {
  std::string s(length, '0');
  for (std::size_t i = 0; i < length; ++i) {
    if ((index >> (length - 1 - i)) & 1) s[i] = '1';
  }
  return s;
}

// First-0 position of the word encoded by (index, length); 0 if all ones.
std::size_t first_zero_of(std::size_t index, std::size_t length) {
  for (std::size_t i = 0; i < length; ++i) {
    if (((index >> (length - 1 - i)) & 1) == 0) return i + 1;
  }
  return 0;
}

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

double CylinderTable::mass(const Word& u) const {
  if (u.empty() || u.length() > depth()) {
    throw std::invalid_argument("cylinder mass: word length must be in [1, depth]");
  }
  return levels_[u.length() - 1][word_index(u)];
}

CylinderTable conformal_table(double beta, std::size_t depth) {
  if (depth == 0 || depth > kMaxTableDepth) {
    throw ResourceLimit("conformal table depth cap is " +
                        std::to_string(kMaxTableDepth));
  }
  CylinderTable t;
  t.beta_ = beta;
  const double e0 = std::exp(-beta);

  std::vector<double> cur{e0, 1.0 - e0};  // level 1: [0], [1]
  t.levels_.push_back(cur);
  t.residuals_.push_back(cur[1]);

  for (std::size_t n = 1; n < depth; ++n) {
    const std::vector<double>& prev = t.levels_.back();
    std::vector<double> next(std::size_t{1} << (n + 1), 0.0);
    KahanSum assigned;
    for (std::size_t w = 0; w < prev.size(); ++w) {
      // children by prepending: 0w always, 1w when w contains a 0
      next[w] = e0 * prev[w];
      assigned.add(next[w]);
      const std::size_t j = first_zero_of(w, n);
      if (j != 0) {
        const std::size_t one_w = (std::size_t{1} << n) | w;
        next[one_w] = std::exp(-beta / static_cast<double>(j + 1)) * prev[w];
        assigned.add(next[one_w]);
      }
    }
    const std::size_t all_ones = (std::size_t{1} << (n + 1)) - 1;
    next[all_ones] = 1.0 - assigned.value();

    // additivity defect against the parent level (children extend on the right)
    for (std::size_t w = 0; w < prev.size(); ++w) {
      const double d = std::abs(prev[w] - next[w << 1] - next[(w << 1) | 1]);
      t.additivity_defect_ = std::max(t.additivity_defect_, d);
    }

    t.residuals_.push_back(next[all_ones]);
    t.levels_.push_back(std::move(next));
  }
  return t;
}

double cylinder_mass_closed_form(double beta, const Word& u) {
  if (u.empty() || u.last() != 0) {
    throw std::invalid_argument(
        "closed form needs a nonempty terminal-0 word (the potential is not "
        "constant along the shifts of other cylinders)");
  }
  const TailPoint y{u};
  return std::exp(-beta * birkhoff_sum(y, u.length()));
}

NonexistenceReport detect_nonexistence(double beta, std::size_t probe_depth) {
  if (probe_depth == 0) {
    throw std::invalid_argument("detect_nonexistence: probe_depth must be >= 1");
  }
  NonexistenceReport rep;
  rep.beta = beta;
  rep.probe_depth = probe_depth;

  KahanSum s;   // harmonic prefix
  KahanSum p;   // partial sum of exp(-beta*s_k)
  for (std::size_t n = 1; n <= probe_depth; ++n) {
    s.add(1.0 / static_cast<double>(n));
    p.add(std::exp(-beta * s.value()));
    if (1.0 - p.value() < -1e-12) {
      rep.first_negative_depth = n;
      break;
    }
  }
  return rep;
}

void write_csv(const CylinderTable& table, std::ostream& os) {
  os << "word,mass\n";
  const std::size_t n = table.depth();
  const auto& top = table.level(n);
  for (std::size_t w = 0; w < top.size(); ++w) {
    os << word_text(w, n) << ',' << shortest(top[w]) << '\n';
  }
  os << "residual_1^" << n << ',' << shortest(table.residual_trace().back())
     << '\n';
}

std::string to_json(const CylinderTable& table) {
  nlohmann::json j;
  j["beta"] = table.beta();
  j["depth"] = table.depth();
  nlohmann::json masses = nlohmann::json::object();
  const std::size_t n = table.depth();
  const auto& top = table.level(n);
  for (std::size_t w = 0; w < top.size(); ++w) {
    masses[word_text(w, n)] = top[w];
  }
  j["masses"] = std::move(masses);
  j["residual_trace"] = table.residual_trace();
  return j.dump(2);
}

CsvCylinderRows read_csv(std::istream& is) {
  CsvCylinderRows out;
  std::string line;
  bool saw_residual = false;
  while (std::getline(is, line)) {
    if (line.empty() || line == "word,mass" || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("malformed cylinder CSV row: " + line);
    }
    const std::string key = line.substr(0, comma);
    const std::string valtext = line.substr(comma + 1);
    double value = 0.0;
    const auto res =
        std::from_chars(valtext.data(), valtext.data() + valtext.size(), value);
    if (res.ec != std::errc{}) {
      throw std::invalid_argument("malformed cylinder CSV value: " + valtext);
    }
    if (key.rfind("residual_", 0) == 0) {
      out.residual = value;
      saw_residual = true;
    } else {
      out.rows.emplace_back(key, value);
    }
  }
  if (!saw_residual) {
    throw std::invalid_argument("cylinder CSV missing trailing residual row");
  }
  return out;
}

}  // namespace kmslab
