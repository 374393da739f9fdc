#include "entropylab/inequality.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "entropylab/error.hpp"

namespace entropylab {

namespace {

struct Position {
  std::size_t line;
  std::size_t column;
};

class Scanner {
 public:
  explicit Scanner(std::string text) : text_(std::move(text)) {}

  Position position() const { return position_at(pos_); }
  Position position_at(std::size_t offset) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t offset) const {
    const Position p = position_at(offset);
    throw ParseError(what, p.line, p.column);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view s) {
    skip_space();
    if (text_.compare(pos_, s.size(), s) == 0) {
      pos_ += s.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view s, const char* what) {
    if (!accept(s)) fail(std::string("expected ") + what);
  }
  std::size_t offset() const { return pos_; }

  // Number literal: digits [. digits] [e [+-] digits]. Returns the text.
  std::optional<std::string> number() {
    skip_space();
    const std::size_t start = pos_;
    auto digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    std::size_t i = pos_;
    while (digit(i)) ++i;
    if (i < text_.size() && text_[i] == '.' && (digit(i + 1) || i > start)) {
      ++i;
      while (digit(i)) ++i;
    }
    if (i == start || (i == start + 1 && text_[start] == '.')) return std::nullopt;
    if (i < text_.size() && (text_[i] == 'e' || text_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
      if (digit(j)) {
        while (digit(j)) ++j;
        i = j;
      }
    }
    pos_ = i;
    return text_.substr(start, i - start);
  }

  std::optional<std::string> identifier() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    const char c = text_[pos_];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return std::nullopt;
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    while (pos_ < text_.size() && text_[pos_] == '\'') ++pos_;
    return text_.substr(start, pos_ - start);
  }

  // H or h immediately followed by '(' (spaces allowed).
  bool entropy_open() {
    skip_space();
    const std::size_t save = pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'H' || text_[pos_] == 'h')) {
      ++pos_;
      if (accept("(")) return true;
    }
    pos_ = save;
    return false;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

struct Blanked {
  std::string main;
  struct IidLine {
    std::string text;
    std::size_t line;
    std::size_t column;
  };
  std::vector<IidLine> iid;
};

// Strips comments and pulls out iid lines, keeping offsets of everything else.
Blanked split_lines(std::string_view text) {
  Blanked out;
  std::size_t line_no = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      std::fill(line.begin() + static_cast<std::ptrdiff_t>(hash), line.end(), ' ');
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string::npos && line.compare(first, 3, "iid") == 0) {
      auto rest = line.find_first_not_of(" \t", first + 3);
      if (rest != std::string::npos && line[rest] == ':') {
        out.iid.push_back({line.substr(rest + 1), line_no, rest + 2});
        std::fill(line.begin(), line.end(), ' ');
      }
    }
    out.main += line;
    if (end < text.size()) out.main += '\n';
    start = end + 1;
    ++line_no;
  }
  return out;
}

class SpecBuilder {
 public:
  std::size_t variable(const std::string& name) {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it != names_.end()) return static_cast<std::size_t>(it - names_.begin());
    names_.push_back(name);
    return names_.size() - 1;
  }

  struct RawRow {
    double alpha;
    std::vector<std::pair<std::size_t, std::int64_t>> terms;
    std::size_t offset;
  };

  std::vector<std::string> names_;
  std::vector<RawRow> rows_;
};

std::int64_t parse_int_coefficient(Scanner& s, const std::string& text, std::size_t at) {
  if (text.find_first_of(".eE") != std::string::npos) {
    s.fail_at("non-integer coefficient inside H(.)", at);
  }
  try {
    return std::stoll(text);
  } catch (const std::out_of_range&) {
    s.fail_at("coefficient out of range", at);
  }
}

void parse_lin(Scanner& s, SpecBuilder& b, SpecBuilder::RawRow& row) {
  bool first = true;
  while (true) {
    std::int64_t sign = 1;
    if (s.accept("+")) {
      sign = 1;
    } else if (s.accept("-")) {
      sign = -1;
    } else if (!first) {
      break;
    }
    first = false;
    std::int64_t coef = 1;
    const std::size_t at = (s.skip_space(), s.offset());
    if (auto num = s.number()) {
      coef = parse_int_coefficient(s, *num, at);
      s.accept("*");
    }
    const auto name = s.identifier();
    if (!name) s.fail("expected a variable name");
    row.terms.emplace_back(b.variable(*name), sign * coef);
  }
}

void parse_terms(Scanner& s, SpecBuilder& b, bool relation) {
  bool first = true;
  while (true) {
    double sign = 1.0;
    if (s.accept("+")) {
      sign = 1.0;
    } else if (s.accept("-")) {
      sign = -1.0;
    } else if (!first) {
      break;
    }
    first = false;
    const std::size_t at = (s.skip_space(), s.offset());
    double alpha = 1.0;
    if (auto num = s.number()) {
      alpha = std::stod(*num);
      s.accept("*");
    }
    if (!s.entropy_open()) s.fail("expected H(");
    SpecBuilder::RawRow row{sign * alpha, {}, at};
    parse_lin(s, b, row);
    s.expect(")", "')'");
    b.rows_.push_back(std::move(row));
  }
  const bool has_relation = s.accept("<=") || s.accept("\xE2\x89\xA4");
  if (relation && !has_relation) s.fail("expected '<='");
  if (has_relation) {
    const std::size_t at = (s.skip_space(), s.offset());
    const auto zero = s.number();
    if (!zero || std::stod(*zero) != 0.0) s.fail_at("expected 0 on the right-hand side", at);
  }
  if (!s.at_end()) s.fail("unexpected trailing input");
}

void parse_iid(const Blanked::IidLine& line, SpecBuilder& b,
               std::vector<std::vector<std::size_t>>& classes) {
  Scanner s(line.text);
  auto fail = [&](const std::string& what) {
    const Position p = s.position();
    throw ParseError(what, line.line, line.column + p.column - 1);
  };
  while (!s.at_end()) {
    if (!s.accept("{")) fail("expected '{'");
    std::vector<std::size_t> cls;
    do {
      const auto name = s.identifier();
      if (!name) fail("expected a variable name");
      const std::size_t v = b.variable(*name);
      bool dup = std::find(cls.begin(), cls.end(), v) != cls.end();
      for (const auto& other : classes) dup = dup || std::find(other.begin(), other.end(), v) != other.end();
      if (dup) fail("variable " + *name + " is in two iid classes");
      cls.push_back(v);
    } while (s.accept(","));
    if (!s.accept("}")) fail("expected '}'");
    classes.push_back(std::move(cls));
  }
}

InequalitySpec finish(SpecBuilder& b, std::vector<std::vector<std::size_t>> classes,
                      const Scanner* s) {
  InequalitySpec spec;
  spec.variables = b.names_;
  const std::size_t m = spec.variables.size();
  for (const auto& raw : b.rows_) {
    EntropyRow row{raw.alpha, std::vector<std::int64_t>(m, 0)};
    for (auto [var, c] : raw.terms) row.coeffs[var] += c;
    const std::int64_t g = gcd_of(row.coeffs);
    if (g == 0) {
      if (s) s->fail_at("empty row: coefficients inside H(.) cancel", raw.offset);
      throw std::invalid_argument("empty row");
    }
    for (auto& c : row.coeffs) c /= g;
    spec.rows.push_back(std::move(row));
  }
  std::vector<int> seen(m, 0);
  for (const auto& cls : classes) {
    for (auto v : cls) {
      if (seen[v]++) throw ParseError("variable " + spec.variables[v] + " is in two iid classes", 1, 1);
    }
  }
  for (std::size_t v = 0; v < m; ++v) {
    if (!seen[v]) classes.push_back({v});
  }
  std::sort(classes.begin(), classes.end(),
            [](const auto& x, const auto& y) { return *std::min_element(x.begin(), x.end()) < *std::min_element(y.begin(), y.end()); });
  for (auto& cls : classes) std::sort(cls.begin(), cls.end());
  spec.iid_classes = std::move(classes);
  return spec;
}

InequalitySpec parse(std::string_view text, bool relation) {
  Blanked blanked = split_lines(text);
  Scanner s(blanked.main);
  SpecBuilder b;
  if (s.at_end()) s.fail("empty specification");
  parse_terms(s, b, relation);
  std::vector<std::vector<std::size_t>> classes;
  for (const auto& line : blanked.iid) parse_iid(line, b, classes);
  return finish(b, std::move(classes), &s);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::stod(buf) == x) return buf;
  }
  return s;
}

template <typename T>
std::vector<const T*> resolve(const InequalitySpec& spec, const std::map<std::string, T>& assignment) {
  for (const auto& [name, _] : assignment) {
    if (std::find(spec.variables.begin(), spec.variables.end(), name) == spec.variables.end()) {
      throw std::invalid_argument("assignment names unknown variable " + name);
    }
  }
  std::vector<const T*> per_var(spec.variables.size(), nullptr);
  for (const auto& cls : spec.iid_classes) {
    const T* chosen = nullptr;
    std::string chosen_name;
    for (auto v : cls) {
      const auto it = assignment.find(spec.variables[v]);
      if (it == assignment.end()) continue;
      if (chosen) {
        throw std::invalid_argument("variables " + chosen_name + " and " + spec.variables[v] +
                                    " are iid; assign only one of them");
      }
      chosen = &it->second;
      chosen_name = spec.variables[v];
    }
    if (!chosen) {
      std::string members;
      for (auto v : cls) members += (members.empty() ? "" : ", ") + spec.variables[v];
      throw std::invalid_argument("missing variable: no distribution for {" + members + "}");
    }
    for (auto v : cls) per_var[v] = chosen;
  }
  return per_var;
}

EvalReport report(const InequalitySpec& spec, std::vector<Nats> entropies, double tolerance) {
  EvalReport r;
  CompensatedSum sum;
  double err = 0.0;
  for (std::size_t i = 0; i < spec.rows.size(); ++i) {
    sum += spec.rows[i].alpha * entropies[i].value;
    err += std::abs(spec.rows[i].alpha) * entropies[i].err;
  }
  r.row_entropies = std::move(entropies);
  r.weighted_sum = {sum.value(), err};
  r.slack = 0.0 - r.weighted_sum.value;
  r.tolerance = tolerance;
  r.satisfied = r.slack >= -tolerance;
  return r;
}

}  // namespace

std::size_t InequalitySpec::index_of(std::string_view name) const {
  const auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw std::invalid_argument("unknown variable " + std::string(name));
  return static_cast<std::size_t>(it - variables.begin());
}

std::size_t InequalitySpec::class_of(std::size_t variable) const {
  for (std::size_t c = 0; c < iid_classes.size(); ++c) {
    if (std::find(iid_classes[c].begin(), iid_classes[c].end(), variable) != iid_classes[c].end()) return c;
  }
  throw std::invalid_argument("variable has no iid class");
}

InequalitySpec parse_spec(std::string_view text) { return parse(text, true); }
InequalitySpec parse_form(std::string_view text) { return parse(text, false); }

InequalitySpec make_spec(std::vector<std::string> variables, std::vector<EntropyRow> rows,
                         std::vector<std::vector<std::string>> iid) {
  SpecBuilder b;
  for (const auto& v : variables) b.variable(v);
  for (auto& row : rows) {
    if (row.coeffs.size() != variables.size()) throw std::invalid_argument("make_spec: row width mismatch");
    SpecBuilder::RawRow raw{row.alpha, {}, 0};
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
      if (row.coeffs[j] != 0) raw.terms.emplace_back(j, row.coeffs[j]);
    }
    b.rows_.push_back(std::move(raw));
  }
  std::vector<std::vector<std::size_t>> classes;
  for (const auto& cls : iid) {
    std::vector<std::size_t> ids;
    for (const auto& name : cls) ids.push_back(b.variable(name));
    classes.push_back(std::move(ids));
  }
  return finish(b, std::move(classes), nullptr);
}

bool is_balanced(const InequalitySpec& spec) {
  CompensatedSum s;
  for (const auto& row : spec.rows) s += row.alpha;
  return std::abs(s.value()) <= kBalanceTolerance;
}

std::string to_string(const InequalitySpec& spec) {
  std::ostringstream out;
  bool first_row = true;
  for (const auto& row : spec.rows) {
    double a = row.alpha;
    if (!first_row) {
      out << (a < 0 ? " - " : " + ");
      a = std::abs(a);
    } else if (a < 0) {
      out << "-";
      a = -a;
    }
    first_row = false;
    if (a != 1.0) out << format_double(a) << "*";
    out << "H(";
    bool first = true;
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
      std::int64_t c = row.coeffs[j];
      if (c == 0) continue;
      if (!first) {
        out << (c < 0 ? "-" : "+");
        c = c < 0 ? -c : c;
      } else if (c < 0) {
        out << "-";
        c = -c;
      }
      first = false;
      if (c != 1) out << c << "*";
      out << spec.variables[j];
    }
    out << ")";
  }
  out << " <= 0";
  bool any = false;
  for (const auto& cls : spec.iid_classes) {
    if (cls.size() < 2) continue;
    out << (any ? " {" : "\niid: {");
    any = true;
    for (std::size_t i = 0; i < cls.size(); ++i) out << (i ? ", " : "") << spec.variables[cls[i]];
    out << "}";
  }
  return out.str();
}

EvalReport evaluate_discrete(const InequalitySpec& spec, const DiscreteAssignment& assignment) {
  const auto per_var = resolve(spec, assignment);
  std::vector<Nats> entropies;
  for (const auto& row : spec.rows) {
    std::vector<LatticePMF> ps;
    std::vector<std::int64_t> cs;
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
      if (row.coeffs[j] == 0) continue;
      ps.push_back(*per_var[j]);
      cs.push_back(row.coeffs[j]);
    }
    entropies.push_back(shannon_entropy(linear_combination(ps, cs)));
  }
  return report(spec, std::move(entropies), kDiscreteTolerance);
}

EvalReport evaluate_continuous(const InequalitySpec& spec, const ContinuousAssignment& assignment) {
  const auto per_var = resolve(spec, assignment);
  std::vector<Nats> entropies;
  for (const auto& row : spec.rows) {
    std::vector<GridDensity> fs;
    std::vector<double> cs;
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
      if (row.coeffs[j] == 0) continue;
      fs.push_back(*per_var[j]);
      cs.push_back(static_cast<double>(row.coeffs[j]));
    }
    entropies.push_back(differential_entropy(density_linear_combination(fs, cs)));
  }
  EvalReport r = report(spec, std::move(entropies), kContinuousTolerance);
  if (!is_balanced(spec)) {
    r.warnings.push_back("unbalanced specification: the continuous value depends on the scale of the variables");
  }
  return r;
}

namespace builtin {

InequalitySpec sum_difference() { return parse_spec("H(X+Y) - 3*H(X-Y) + H(X) + H(Y) <= 0"); }
InequalitySpec subadditivity() { return parse_spec("H(X+Y) - H(X) - H(Y) <= 0"); }
InequalitySpec sum_dominates_first() { return parse_spec("H(X) - H(X+Y) <= 0"); }
InequalitySpec sum_dominates_second() { return parse_spec("H(Y) - H(X+Y) <= 0"); }

std::int64_t dilation_constant(std::int64_t p, std::int64_t q, double log_base) {
  if (p == 0 || q == 0) throw std::invalid_argument("dilation: p and q must be nonzero");
  if (!(log_base > 1.0)) throw std::invalid_argument("dilation: log base must exceed 1");
  auto floor_log = [&](std::int64_t v) {
    const double x = static_cast<double>(v < 0 ? -v : v);
    std::int64_t e = 0;
    double power = log_base;
    while (power <= x * (1.0 + 1e-15)) {
      ++e;
      power *= log_base;
    }
    return e;
  };
  return 7 * floor_log(p) + 7 * floor_log(q) + 2;
}

InequalitySpec dilation(std::int64_t p, std::int64_t q, double log_base) {
  const auto c = static_cast<double>(dilation_constant(p, q, log_base));
  return make_spec({"X", "Y"},
                   {{1.0, {p, q}}, {-(1.0 + 2.0 * c), {1, 1}}, {c, {1, 0}}, {c, {0, 1}}});
}

InequalitySpec doubling_lower() {
  return parse_spec("H(U+U') - 2*H(U-U') + H(U) <= 0\niid: {U, U'}");
}
InequalitySpec doubling_upper() {
  return parse_spec("H(U-U') - 2*H(U+U') + H(U) <= 0\niid: {U, U'}");
}
InequalitySpec doubling_numerator() { return parse_form("H(U-U') - H(U)\niid: {U, U'}"); }
InequalitySpec doubling_denominator() { return parse_form("H(U+U') - H(U)\niid: {U, U'}"); }

}  // namespace builtin

Nats epi_gap(const GridDensity& f, const GridDensity& g) {
  const GridDensity fs[2] = {f, g};
  const double ones[2] = {1.0, 1.0};
  const Nats sum = differential_entropy(density_linear_combination(fs, ones));
  const Nats half = 0.5 * (differential_entropy(f) + differential_entropy(g));
  const double c = 0.5 * static_cast<double>(f.dim()) * kLn2;
  return {sum.value - half.value - c, sum.err + half.err};
}

}  // namespace entropylab
