#include "entropylab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "entropylab/error.hpp"
#include "entropylab/generators.hpp"

namespace entropylab::io {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> meaningful_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string line(text.substr(start, end - start));
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back({number, line});
    start = end + 1;
  }
  return out;
}

std::int64_t to_int(const Line& line, const std::string& tok, std::size_t offset) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) throw ParseError("expected an integer, got '" + tok + "'", line.number, offset + 1);
  return v;
}

double to_double(const Line& line, const std::string& tok, std::size_t offset) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) throw ParseError("expected a number, got '" + tok + "'", line.number, offset + 1);
  return v;
}

// Whitespace-separated tokens with their offsets.
std::vector<std::pair<std::string, std::size_t>> tokens(const std::string& s) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    out.emplace_back(s.substr(start, i - start), start);
  }
  return out;
}

// "x1 ... xd : value" into coordinates and value.
std::pair<Point, double> atom_line(const Line& line, std::size_t expected_dim) {
  const auto colon = line.text.find(':');
  if (colon == std::string::npos) throw ParseError("expected 'coordinates : value'", line.number, 1);
  Point x;
  for (const auto& [tok, off] : tokens(line.text.substr(0, colon))) x.push_back(to_int(line, tok, off));
  if (x.empty()) throw ParseError("missing coordinates", line.number, 1);
  if (expected_dim != 0 && x.size() != expected_dim) {
    throw ParseError("expected " + std::to_string(expected_dim) + " coordinates", line.number, 1);
  }
  const auto rest = tokens(line.text.substr(colon + 1));
  if (rest.size() != 1) throw ParseError("expected one value after ':'", line.number, colon + 2);
  return {std::move(x), to_double(line, rest[0].first, colon + 1 + rest[0].second)};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::map<std::string, std::string> key_values(const std::string& body, const std::string& spec) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("generator " + spec + ": expected key=value, got " + item);
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

double number(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& spec,
              std::optional<double> fallback = std::nullopt) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback) return *fallback;
    throw std::invalid_argument("generator " + spec + ": missing " + key);
  }
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size()) throw std::invalid_argument("generator " + spec + ": bad number for " + key);
  return v;
}

int integer(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& spec) {
  const double v = number(kv, key, spec);
  if (v != std::floor(v)) throw std::invalid_argument("generator " + spec + ": " + key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

LatticePMF parse_pmf(std::string_view text) {
  std::vector<std::pair<Point, double>> atoms;
  std::size_t dim = 0;
  for (const auto& line : meaningful_lines(text)) {
    auto atom = atom_line(line, dim);
    dim = atom.first.size();
    if (!(atom.second >= 0.0)) throw ParseError("masses must be nonnegative", line.number, 1);
    atoms.push_back(std::move(atom));
  }
  if (atoms.empty()) throw ParseError("empty pmf", 1, 1);
  return LatticePMF(dim, std::move(atoms));
}

CyclicPMF parse_cyclic(std::string_view text) {
  const auto lines = meaningful_lines(text);
  if (lines.empty()) throw ParseError("empty cyclic pmf", 1, 1);
  const auto head = tokens(lines[0].text);
  if (head.size() != 3 || head[0].first != "cyclic") {
    throw ParseError("expected header 'cyclic k n'", lines[0].number, 1);
  }
  const auto k = static_cast<int>(to_int(lines[0], head[1].first, head[1].second));
  const auto n = static_cast<std::size_t>(to_int(lines[0], head[2].first, head[2].second));
  if (k < 1 || n < 1 || static_cast<std::size_t>(k) * n > 30) {
    throw ParseError("unsupported cyclic shape", lines[0].number, 1);
  }
  std::vector<double> table(std::size_t{1} << (static_cast<std::size_t>(k) * n), 0.0);
  const std::int64_t m = std::int64_t{1} << k;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [r, mass] = atom_line(lines[i], n);
    std::size_t idx = 0;
    for (auto x : r) {
      if (x < 0 || x >= m) throw ParseError("residue out of range", lines[i].number, 1);
      idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(x);
    }
    table[idx] += mass;
  }
  return CyclicPMF(k, n, std::move(table));
}

GridDensity parse_density(std::string_view text) {
  const auto lines = meaningful_lines(text);
  if (lines.empty()) throw ParseError("empty density", 1, 1);
  const auto head = tokens(lines[0].text);
  if (head.size() < 3 || head[0].first != "grid") {
    throw ParseError("expected header 'grid d k lo1 hi1 ...'", lines[0].number, 1);
  }
  const auto d = static_cast<std::size_t>(to_int(lines[0], head[1].first, head[1].second));
  const auto k = static_cast<int>(to_int(lines[0], head[2].first, head[2].second));
  if (d < 1 || head.size() != 3 + 2 * d) throw ParseError("header needs lo and hi for each dimension", lines[0].number, 1);
  Point lo(d);
  Point extent(d);
  std::size_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = to_int(lines[0], head[3 + 2 * i].first, head[3 + 2 * i].second);
    const std::int64_t hi = to_int(lines[0], head[4 + 2 * i].first, head[4 + 2 * i].second);
    if (hi <= lo[i]) throw ParseError("empty cell range", lines[0].number, head[4 + 2 * i].second + 1);
    extent[i] = hi - lo[i];
    cells *= static_cast<std::size_t>(extent[i]);
    if (cells > kMaxGridCells) throw ResourceError("density header describes too many cells");
  }
  std::vector<double> values(cells, 0.0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [c, v] = atom_line(lines[i], d);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const std::int64_t off = c[j] - lo[j];
      if (off < 0 || off >= extent[j]) throw ParseError("cell outside the header range", lines[i].number, 1);
      idx = idx * static_cast<std::size_t>(extent[j]) + static_cast<std::size_t>(off);
    }
    values[idx] = v;
  }
  return GridDensity(k, std::move(lo), std::move(extent), std::move(values));
}

void write_pmf(std::ostream& out, const LatticePMF& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto x = p.point(i);
    for (std::size_t c = 0; c < x.size(); ++c) out << (c ? " " : "") << x[c];
    out << " : " << fmt(p.mass(i)) << '\n';
  }
}

void write_cyclic(std::ostream& out, const CyclicPMF& p) {
  out << "cyclic " << p.modulus_log2() << ' ' << p.dim() << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.table()[i] == 0.0) continue;
    const Point r = p.residues_of(i);
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? " " : "") << r[c];
    out << " : " << fmt(p.table()[i]) << '\n';
  }
}

void write_density(std::ostream& out, const GridDensity& f) {
  out << "grid " << f.dim() << ' ' << f.resolution();
  for (std::size_t i = 0; i < f.dim(); ++i) out << ' ' << f.lo_cell()[i] << ' ' << f.lo_cell()[i] + f.extent()[i];
  out << '\n';
  for (std::size_t flat = 0; flat < f.cell_count(); ++flat) {
    if (f.values()[flat] == 0.0) continue;
    const Point c = f.cell_at(flat);
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << c[i];
    out << " : " << fmt(f.values()[flat]) << '\n';
  }
}

Distribution parse_distribution(std::string_view text) {
  const auto lines = meaningful_lines(text);
  if (!lines.empty()) {
    const auto head = tokens(lines[0].text);
    if (!head.empty() && head[0].first == "grid") return parse_density(text);
    if (!head.empty() && head[0].first == "cyclic") return parse_cyclic(text);
  }
  return parse_pmf(text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path);
}

bool is_generator(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return false;
  const std::string name = spec.substr(0, colon);
  return name == "gaussian" || name == "uniform" || name == "power" || name == "triangular" || name == "pmf" ||
         name == "uniform-int";
}

Distribution load_distribution(const std::string& spec) {
  if (!is_generator(spec)) return parse_distribution(read_file(spec));
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  if (name == "pmf") {
    std::vector<double> masses;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) masses.push_back(std::stod(item));
    return LatticePMF::from_masses(0, masses);
  }
  const auto kv = key_values(body, spec);
  const std::map<std::string, std::vector<std::string>> allowed{
      {"uniform-int", {"n"}},          {"gaussian", {"mean", "var", "N", "k"}},
      {"uniform", {"lo", "hi", "k"}}, {"power", {"p", "k"}},
      {"triangular", {"lo", "hi", "k"}}};
  for (const auto& [key, value] : kv) {
    const auto& keys = allowed.at(name);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("generator " + spec + ": unknown parameter '" + key + "'");
    }
  }
  if (name == "uniform-int") {
    const int n = integer(kv, "n", spec);
    if (n < 1) throw std::invalid_argument("generator " + spec + ": n must be positive");
    return LatticePMF::from_masses(0, std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
  }
  const int k = integer(kv, "k", spec);
  if (name == "gaussian") {
    const double var = number(kv, "var", spec, 1.0);
    if (!(var > 0.0)) throw std::invalid_argument("generator " + spec + ": var must be positive");
    return gen::gaussian(number(kv, "mean", spec, 0.0), std::sqrt(var), number(kv, "N", spec, 8.0), k);
  }
  if (name == "uniform") return gen::uniform(number(kv, "lo", spec, 0.0), number(kv, "hi", spec, 1.0), k);
  if (name == "power") return gen::power(number(kv, "p", spec, 1.0), k);
  return gen::triangular(number(kv, "lo", spec, 0.0), number(kv, "hi", spec, 2.0), k);
}

}  // namespace entropylab::io
