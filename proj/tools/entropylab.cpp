// entropylab: command-line front end for the entropy inequality toolkit.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "entropylab/constructions.hpp"
#include "entropylab/error.hpp"
#include "entropylab/generators.hpp"
#include "entropylab/info_measures.hpp"
#include "entropylab/inequality.hpp"
#include "entropylab/io.hpp"
#include "entropylab/search.hpp"

#ifndef ENTROPYLAB_VERSION
#define ENTROPYLAB_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace entropylab;

namespace {

enum Exit { kOk = 0, kViolated = 1, kUsage = 2, kResource = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Everything a run writes goes through here so metadata is never forgotten.
struct Run {
  std::string command;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  json config = json::object();

  std::string config_hash() const {
    json c = config;
    c["command"] = command;
    c["seed"] = seed;
    return hex(fnv1a(c.dump()));
  }

  json meta() const {
    return {{"tool", "entropylab"}, {"version", ENTROPYLAB_VERSION}, {"seed", seed}, {"config_hash", config_hash()}};
  }

  std::string csv_header() const {
    return "# entropylab " + std::string(ENTROPYLAB_VERSION) + " seed=" + std::to_string(seed) +
           " config=" + config_hash() + "\n";
  }

  void emit(const std::string& text) const {
    if (out.empty() || out == "-") {
      std::cout << text;
      std::cout.flush();
    } else {
      io::write_file(out, text);
    }
  }
};

std::vector<std::int64_t> parse_int_list(const std::string& s, const char* what) {
  std::vector<std::int64_t> out;
  auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size()) throw UsageError(std::string("bad integer in ") + what + ": " + t);
    return static_cast<std::int64_t>(v);
  };
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const auto a = to_int(item.substr(0, dots));
      const auto b = to_int(item.substr(dots + 2));
      if (b < a || b - a > 100000) throw UsageError(std::string("bad range in ") + what + ": " + item);
      for (auto v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(to_int(item));
    }
  }
  if (out.empty()) throw UsageError(std::string("empty list for ") + what);
  return out;
}

// Numbers, optionally written as 2^e.
std::vector<double> parse_real_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      if (item.rfind("2^", 0) == 0) {
        const int e = std::stoi(item.substr(2), &used);
        used += 2;
        v = std::ldexp(1.0, e);
      } else {
        v = std::stod(item, &used);
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError(std::string("bad number in ") + what + ": " + item);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty list for ") + what);
  return out;
}

// A spec argument is a file path, or the spec text itself when no such file exists.
std::string spec_text(const std::string& arg) {
  if (!std::filesystem::exists(arg) && arg.find("H(") != std::string::npos) return arg;
  return io::read_file(arg);
}

InequalitySpec load_spec(const std::string& arg) {
  if (arg.rfind("builtin:", 0) == 0) {
    const std::string name = arg.substr(8);
    if (name == "sumdiff") return builtin::sum_difference();
    if (name == "subadditivity") return builtin::subadditivity();
    if (name == "sum-ge-x") return builtin::sum_dominates_first();
    if (name == "sum-ge-y") return builtin::sum_dominates_second();
    if (name == "doubling-lower") return builtin::doubling_lower();
    if (name == "doubling-upper") return builtin::doubling_upper();
    if (name.rfind("dilation:", 0) == 0) {
      const auto args = parse_real_list(name.substr(9), "dilation");
      if (args.size() < 2 || args.size() > 3) throw UsageError("dilation needs p,q[,log base]");
      return builtin::dilation(static_cast<std::int64_t>(args[0]), static_cast<std::int64_t>(args[1]),
                               args.size() == 3 ? args[2] : 2.0);
    }
    throw UsageError("unknown builtin spec " + name);
  }
  return parse_spec(spec_text(arg));
}

GridDensity as_density(const io::Distribution& d, const std::string& what) {
  if (const auto* f = std::get_if<GridDensity>(&d)) return *f;
  throw UsageError(what + " must be a density (grid file or continuous generator)");
}

LatticePMF as_pmf(const io::Distribution& d, const std::string& what) {
  if (const auto* p = std::get_if<LatticePMF>(&d)) return *p;
  throw UsageError(what + " must be a lattice pmf");
}

json pmf_json(const LatticePMF& p) {
  json atoms = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto x = p.point(i);
    atoms.push_back({{"x", std::vector<std::int64_t>(x.begin(), x.end())}, {"mass", p.mass(i)}});
  }
  return {{"type", "pmf"}, {"dim", p.dim()}, {"atoms", atoms}};
}

json density_json(const GridDensity& f) {
  json cells = json::array();
  for (std::size_t i = 0; i < f.cell_count(); ++i) {
    if (f.values()[i] == 0.0) continue;
    cells.push_back({{"cell", f.cell_at(i)}, {"value", f.values()[i]}});
  }
  return {{"type", "grid"}, {"dim", f.dim()}, {"resolution", f.resolution()}, {"cells", cells}};
}

// Writes witness files under dir and returns name -> path.
json write_witness(const SearchResult& r, const std::string& dir, const std::string& prefix) {
  json files = json::object();
  if (dir.empty()) return files;
  std::filesystem::create_directories(dir);
  for (const auto& [name, p] : r.discrete_witness) {
    std::ostringstream s;
    io::write_pmf(s, p);
    const std::string path = (std::filesystem::path(dir) / (prefix + name + ".pmf")).string();
    io::write_file(path, s.str());
    files[name] = path;
  }
  for (const auto& [name, f] : r.continuous_witness) {
    std::ostringstream s;
    io::write_density(s, f);
    const std::string path = (std::filesystem::path(dir) / (prefix + name + ".grid")).string();
    io::write_file(path, s.str());
    files[name] = path;
  }
  return files;
}

json result_json(const SearchResult& r) {
  json witness = json::object();
  for (const auto& [name, p] : r.discrete_witness) witness[name] = pmf_json(p);
  for (const auto& [name, f] : r.continuous_witness) witness[name] = density_json(f);
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({{"iteration", t.iteration}, {"move", t.move}, {"objective", t.objective}});
  return {{"objective", r.objective}, {"restart", r.restart}, {"evaluations", r.evaluations},
          {"witness", witness}, {"trace", trace}};
}

// ------------------------------------------------------------------- check

struct CheckOptions {
  std::string spec;
  std::vector<std::string> assign;
  std::string side = "discrete";
};

int cmd_check(Run& run, const CheckOptions& o) {
  const InequalitySpec spec = load_spec(o.spec);
  const Side side = parse_side(o.side);
  run.config = {{"spec", to_string(spec)}, {"side", o.side}, {"assign", o.assign}};
  EvalReport rep;
  if (side == Side::discrete) {
    DiscreteAssignment a;
    for (const auto& item : o.assign) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--assign expects NAME=SOURCE, got " + item);
      a.emplace(item.substr(0, eq), as_pmf(io::load_distribution(item.substr(eq + 1)), item));
    }
    rep = evaluate_discrete(spec, a);
  } else {
    ContinuousAssignment a;
    for (const auto& item : o.assign) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--assign expects NAME=SOURCE, got " + item);
      a.emplace(item.substr(0, eq), as_density(io::load_distribution(item.substr(eq + 1)), item));
    }
    rep = evaluate_continuous(spec, a);
  }
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

  if (run.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < spec.rows.size(); ++i) {
      rows.push_back({{"alpha", spec.rows[i].alpha}, {"coeffs", spec.rows[i].coeffs},
                      {"entropy", rep.row_entropies[i].value}, {"error_bound", rep.row_entropies[i].err}});
    }
    json j = run.meta();
    j["config"] = run.config;
    j["balanced"] = is_balanced(spec);
    j["rows"] = rows;
    j["weighted_sum"] = rep.weighted_sum.value;
    j["slack"] = rep.slack;
    j["tolerance"] = rep.tolerance;
    j["satisfied"] = rep.satisfied;
    j["warnings"] = rep.warnings;
    run.emit(j.dump(2) + "\n");
  } else {
    std::string s = run.csv_header();
    s += "quantity,alpha,coeffs,value\n";
    for (std::size_t i = 0; i < spec.rows.size(); ++i) {
      std::string coeffs;
      for (auto c : spec.rows[i].coeffs) coeffs += (coeffs.empty() ? "" : " ") + std::to_string(c);
      s += "entropy," + fmt(spec.rows[i].alpha) + "," + coeffs + "," + fmt(rep.row_entropies[i].value) + "\n";
    }
    s += "weighted_sum,,," + fmt(rep.weighted_sum.value) + "\n";
    s += "slack,,," + fmt(rep.slack) + "\n";
    s += std::string("satisfied,,,") + (rep.satisfied ? "true" : "false") + "\n";
    run.emit(s);
  }
  return rep.satisfied ? kOk : kViolated;
}

// ------------------------------------------------------------------- lemma

struct LemmaOptions {
  std::string name;
  std::vector<std::string> density;
  std::string pmf = "pmf:0.5,0.5";
  std::string coeffs;
  std::string k;
  std::string eps = "2^-1,2^-2,2^-3,2^-4,2^-5,2^-6,2^-7";
  std::string half_widths = "1,2,4,8";
  std::optional<double> reference_h;
};

int cmd_lemma(Run& run, const LemmaOptions& o) {
  static const std::map<std::string, std::pair<std::string, std::string>> defaults = {
      {"renyi", {"power:p=1,k=14", "1..12"}},
      {"quantgap", {"uniform:lo=0,hi=1,k=12", "0..10"}},
      {"truncate", {"gaussian:mean=0,var=1,N=8,k=6", ""}},
      {"intfrac", {"power:p=1,k=10", "0..9"}},
      {"smoothing", {"gaussian:mean=0,var=1,N=8,k=4", ""}},
      {"torus", {"uniform:lo=0,hi=1,k=12", "1..8"}},
  };
  const auto def = defaults.find(o.name);
  if (def == defaults.end()) {
    throw UsageError("unknown lemma " + o.name + " (renyi, quantgap, truncate, intfrac, smoothing, torus)");
  }
  std::vector<std::string> sources = o.density.empty() ? std::vector<std::string>{def->second.first} : o.density;
  const std::string krange = o.k.empty() ? def->second.second : o.k;
  run.config = {{"lemma", o.name}, {"density", sources}, {"k", krange}};

  std::vector<GridDensity> fs;
  for (const auto& s : sources) fs.push_back(as_density(io::load_distribution(s), s));
  const GridDensity& f = fs.front();
  std::string table;

  if (o.name == "renyi") {
    const auto ks = parse_int_list(krange, "--k");
    const double ref = o.reference_h ? *o.reference_h : differential_entropy(f).value;
    run.config["reference_h"] = ref;
    table = "k,H_quantized,dk_ln2,h,gap\n";
    for (auto k : ks) {
      const int ki = static_cast<int>(k);
      const double hq = shannon_entropy(quantize(f, ki)).value;
      const double dk = static_cast<double>(f.dim()) * static_cast<double>(k) * kLn2;
      table += std::to_string(k) + "," + fmt(hq) + "," + fmt(dk) + "," + fmt(ref) + "," +
               fmt(renyi_gap(f, ki, ref).value) + "\n";
    }
  } else if (o.name == "quantgap") {
    const auto coeffs = parse_int_list(o.coeffs.empty() ? "1,1" : o.coeffs, "--coeffs");
    run.config["coeffs"] = coeffs;
    std::vector<GridDensity> xs;
    for (std::size_t j = 0; j < coeffs.size(); ++j) xs.push_back(fs.size() == 1 ? f : fs.at(j));
    table = "k,gap\n";
    for (auto k : parse_int_list(krange, "--k")) {
      table += std::to_string(k) + "," + fmt(quantization_commutation_gap(xs, coeffs, static_cast<int>(k)).value) + "\n";
    }
  } else if (o.name == "truncate") {
    const auto ns = parse_real_list(o.half_widths, "--N");
    run.config["N"] = ns;
    const double h = differential_entropy(f).value;
    table = "N,mass_inside,h_truncated,h,gap\n";
    for (double n : ns) {
      const GridDensity t = truncate(f, n);
      double inside = 0.0;
      for (std::size_t i = 0; i < f.cell_count(); ++i) {
        const Point c = f.cell_at(i);
        bool in = true;
        for (std::size_t d = 0; d < c.size(); ++d) {
          const double lo = std::ldexp(static_cast<double>(c[d]), -f.resolution());
          const double hi = std::ldexp(static_cast<double>(c[d] + 1), -f.resolution());
          in = in && lo >= -n && hi <= n;
        }
        if (in) inside += f.mass(i);
      }
      const double ht = differential_entropy(t).value;
      table += fmt(n) + "," + fmt(inside) + "," + fmt(ht) + "," + fmt(h) + "," + fmt(ht - h) + "\n";
    }
  } else if (o.name == "intfrac") {
    table = "k,mutual_information\n";
    for (auto k : parse_int_list(krange, "--k")) {
      table += std::to_string(k) + "," + fmt(int_frac_mutual_information(f, static_cast<int>(k)).value) + "\n";
    }
  } else if (o.name == "smoothing") {
    const LatticePMF u = as_pmf(io::load_distribution(o.pmf), o.pmf);
    const auto eps = parse_real_list(o.eps, "--eps");
    run.config["pmf"] = o.pmf;
    run.config["eps"] = eps;
    table = "eps,gap\n";
    for (double e : eps) table += fmt(e) + "," + fmt(smoothing_gap(u, f, e).value) + "\n";
  } else {
    std::vector<std::int64_t> coeffs;
    if (!o.coeffs.empty()) coeffs = parse_int_list(o.coeffs, "--coeffs");
    run.config["coeffs"] = coeffs;
    const double h = differential_entropy(f).value;
    table = coeffs.empty() ? "k,H,kn_ln2,gap\n" : "k,H,kn_ln2,gap,commutation_gap\n";
    for (auto k : parse_int_list(krange, "--k")) {
      const int ki = static_cast<int>(k);
      const double hk = shannon_entropy(torus_quantize(f, ki)).value;
      const double kn = static_cast<double>(k) * static_cast<double>(f.dim()) * kLn2;
      table += std::to_string(k) + "," + fmt(hk) + "," + fmt(kn) + "," + fmt(hk - kn - h);
      if (!coeffs.empty()) {
        std::vector<GridDensity> xs;
        for (std::size_t j = 0; j < coeffs.size(); ++j) xs.push_back(fs.size() == 1 ? f : fs.at(j));
        table += "," + fmt(cyclic_commutation_gap(xs, coeffs, ki).value);
      }
      table += "\n";
    }
  }

  if (run.format == "json") {
    json j = run.meta();
    j["config"] = run.config;
    j["table"] = table;
    run.emit(j.dump(2) + "\n");
  } else {
    run.emit(run.csv_header() + table);
  }
  return kOk;
}

// ------------------------------------------------------- search and ratio

struct SearchOptions {
  std::string spec;
  std::string num;
  std::string den;
  std::string side = "discrete";
  std::size_t restarts = SearchConfig{}.restarts;
  std::size_t iterations = SearchConfig{}.iterations;
  std::size_t max_support = SearchConfig{}.max_support;
  int resolution = SearchConfig{}.resolution;
  std::string witness_dir;
};

SearchConfig search_config(const Run& run, const SearchOptions& o) {
  SearchConfig cfg;
  cfg.side = parse_side(o.side);
  cfg.seed = run.seed;
  cfg.restarts = o.restarts;
  cfg.iterations = o.iterations;
  cfg.max_support = o.max_support;
  cfg.resolution = o.resolution;
  if (o.max_support > 64) throw ResourceError("--max-support above 64 exceeds the search bound");
  if (o.restarts > 100000 || o.iterations > 1000000) throw ResourceError("search budget exceeds the configured bound");
  return cfg;
}

json search_config_json(const SearchOptions& o) {
  return {{"side", o.side}, {"restarts", o.restarts}, {"iterations", o.iterations},
          {"max_support", o.max_support}, {"resolution", o.resolution}};
}

int cmd_search(Run& run, const SearchOptions& o) {
  const InequalitySpec spec = load_spec(o.spec);
  run.config = search_config_json(o);
  run.config["spec"] = to_string(spec);
  const SearchConfig cfg = search_config(run, o);
  const SearchResult r = search_violation(spec, cfg);
  const double tol = cfg.side == Side::discrete ? kDiscreteTolerance : kContinuousTolerance;
  const bool violated = r.objective > tol;
  const json files = write_witness(r, o.witness_dir, "");

  if (run.format == "csv") {
    std::string s = run.csv_header() + "restart,evaluations,objective,slack,violated\n";
    s += std::to_string(r.restart) + "," + std::to_string(r.evaluations) + "," + fmt(r.objective) + "," +
         fmt(0.0 - r.objective) + "," + (violated ? "true" : "false") + "\n";
    run.emit(s);
  } else {
    json j = run.meta();
    j["config"] = run.config;
    j["result"] = result_json(r);
    j["slack"] = 0.0 - r.objective;
    j["violated"] = violated;
    j["witness_files"] = files;
    run.emit(j.dump(2) + "\n");
  }
  return violated ? kViolated : kOk;
}

int cmd_ratio(Run& run, const SearchOptions& o) {
  InequalitySpec num;
  InequalitySpec den;
  std::string name = o.num;
  if (o.num == "doubling") {
    num = builtin::doubling_numerator();
    den = builtin::doubling_denominator();
  } else {
    if (o.den.empty()) throw UsageError("ratio needs NUM and DEN forms, or 'doubling'");
    num = parse_form(spec_text(o.num));
    den = parse_form(spec_text(o.den));
  }
  run.config = search_config_json(o);
  run.config["numerator"] = to_string(num);
  run.config["denominator"] = to_string(den);
  const RatioBracket b = extremal_ratio(num, den, search_config(run, o));
  json files = json::object();
  files["inf"] = write_witness(b.inf, o.witness_dir, "inf_");
  files["sup"] = write_witness(b.sup, o.witness_dir, "sup_");

  if (run.format == "csv") {
    std::string s = run.csv_header() + "bound,ratio,restart,evaluations\n";
    s += "inf," + fmt(b.inf.objective) + "," + std::to_string(b.inf.restart) + "," + std::to_string(b.inf.evaluations) + "\n";
    s += "sup," + fmt(b.sup.objective) + "," + std::to_string(b.sup.restart) + "," + std::to_string(b.sup.evaluations) + "\n";
    s += "visited_min," + fmt(b.visited_min) + ",,\n";
    s += "visited_max," + fmt(b.visited_max) + ",,\n";
    run.emit(s);
  } else {
    json j = run.meta();
    j["config"] = run.config;
    j["inf"] = result_json(b.inf);
    j["sup"] = result_json(b.sup);
    j["visited"] = b.visited;
    j["rejected"] = b.rejected;
    j["visited_min"] = b.visited_min;
    j["visited_max"] = b.visited_max;
    j["witness_files"] = files;
    run.emit(j.dump(2) + "\n");
  }
  return kOk;
}

// ------------------------------------------------------------------- ruzsa

int cmd_ruzsa(Run& run, const std::string& n_range, const std::string& l_list) {
  const auto ns = parse_int_list(n_range, "--n");
  const auto ls = parse_int_list(l_list, "--L");
  run.config = {{"n", ns}, {"L", ls}};
  std::string s = "n,L,A,A_plus_A,A_minus_A,ratio,method\n";
  json rows = json::array();
  for (auto n : ns) {
    for (auto L : ls) {
      if (n < 1 || L < 1) throw UsageError("--n and --L must be positive");
      if (n > 12 || L > 4096) throw ResourceError("ruzsa table bound is n <= 12, L <= 4096");
      const SumsetCounts c = simplex_sumset_counts(static_cast<std::size_t>(n), L);
      const double a = static_cast<double>(c.a);
      const double ratio = std::log(static_cast<double>(c.diff) / a) / std::log(static_cast<double>(c.sum) / a);
      const char* method = c.enumerated ? "enumeration" : "halfspace";
      s += std::to_string(n) + "," + std::to_string(L) + "," + std::to_string(c.a) + "," + std::to_string(c.sum) +
           "," + std::to_string(c.diff) + "," + fmt(ratio) + "," + method + "\n";
      rows.push_back({{"n", n}, {"L", L}, {"A", c.a}, {"A_plus_A", c.sum}, {"A_minus_A", c.diff},
                      {"ratio", ratio}, {"method", method}});
    }
  }
  if (run.format == "json") {
    json j = run.meta();
    j["config"] = run.config;
    j["rows"] = rows;
    run.emit(j.dump(2) + "\n");
  } else {
    run.emit(run.csv_header() + s);
  }
  return kOk;
}

// ------------------------------------------------------------------- embed

struct EmbedOptions {
  std::vector<std::string> pmfs;
  std::string matrix;
  int k = 2;
  std::int64_t modulus = 0;
  std::string out_dir;
};

int cmd_embed(Run& run, const EmbedOptions& o) {
  if (o.pmfs.empty()) throw UsageError("embed needs at least one --pmf");
  std::vector<LatticePMF> ps;
  for (const auto& s : o.pmfs) ps.push_back(as_pmf(io::load_distribution(s), s));
  IntMatrix a;
  std::stringstream rows(o.matrix);
  std::string row;
  while (std::getline(rows, row, ';')) {
    const auto r = parse_int_list(row, "--matrix");
    a.push_back(r);
  }
  if (a.empty()) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      std::vector<std::int64_t> e(ps.size(), 0);
      e[j] = 1;
      a.push_back(e);
    }
  }
  const std::int64_t m = o.modulus > 0 ? o.modulus : std::max<std::int64_t>(2, default_embedding_modulus(ps, a));
  run.config = {{"pmfs", o.pmfs}, {"matrix", a}, {"k", o.k}, {"M", m}};
  const auto embedded = embed(ps, a, o.k, m);
  std::string s = "row,coeffs,H_before,H_after,ratio\n";
  json jrows = json::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double before = shannon_entropy(linear_combination(ps, a[i])).value;
    const double after = shannon_entropy(linear_combination(embedded, a[i])).value;
    std::string coeffs;
    for (auto c : a[i]) coeffs += (coeffs.empty() ? "" : " ") + std::to_string(c);
    const double ratio = before > 0.0 ? after / before : 0.0;
    s += std::to_string(i) + "," + coeffs + "," + fmt(before) + "," + fmt(after) + "," + fmt(ratio) + "\n";
    jrows.push_back({{"row", i}, {"coeffs", a[i]}, {"H_before", before}, {"H_after", after}, {"ratio", ratio}});
  }
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    for (std::size_t j = 0; j < embedded.size(); ++j) {
      std::ostringstream f;
      io::write_pmf(f, embedded[j]);
      io::write_file((std::filesystem::path(o.out_dir) / ("U" + std::to_string(j) + ".pmf")).string(), f.str());
    }
  }
  if (run.format == "json") {
    json j = run.meta();
    j["config"] = run.config;
    j["rows"] = jrows;
    run.emit(j.dump(2) + "\n");
  } else {
    run.emit(run.csv_header() + s);
  }
  return kOk;
}

void add_common(CLI::App* sub, Run& run) {
  sub->add_option("--seed", run.seed, "Random seed recorded in every output");
  sub->add_option("--out", run.out, "Output file (default: stdout)");
  sub->add_option("--format", run.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropylab: entropy inequalities for sums of independent variables"};
  app.set_version_flag("--version", ENTROPYLAB_VERSION);
  app.require_subcommand(1);

  Run run;
  CheckOptions check;
  LemmaOptions lemma;
  SearchOptions search;
  SearchOptions ratio;
  EmbedOptions emb;
  std::string n_range = "2..6";
  std::string l_list = "16,32,64,128";

  auto* c = app.add_subcommand("check", "Evaluate a spec on assigned distributions (exit 1 if violated)");
  add_common(c, run);
  c->add_option("spec", check.spec, "Spec file or builtin:NAME")->required();
  c->add_option("--assign", check.assign, "NAME=FILE or NAME=GENERATOR, one per iid class");
  c->add_option("--side", check.side, "discrete or continuous")->check(CLI::IsMember({"discrete", "continuous"}));

  auto* l = app.add_subcommand("lemma", "Tabulate a lemma-level gap");
  add_common(l, run);
  l->add_option("name", lemma.name, "renyi | quantgap | truncate | intfrac | smoothing | torus")->required();
  l->add_option("--density", lemma.density, "Density file or generator (repeat for several variables)");
  l->add_option("--pmf", lemma.pmf, "Lattice pmf for the smoothing lemma");
  l->add_option("--coeffs", lemma.coeffs, "Integer coefficients, comma separated");
  l->add_option("--k", lemma.k, "Resolutions, e.g. 0..10 or 2,4,6");
  l->add_option("--eps", lemma.eps, "Smoothing scales, e.g. 2^-3,2^-7");
  l->add_option("--N", lemma.half_widths, "Truncation half widths");
  l->add_option("--reference-h", lemma.reference_h, "Closed-form differential entropy for renyi");

  auto add_search_options = [&](CLI::App* s, SearchOptions& o) {
    add_common(s, run);
    s->add_option("--side", o.side, "discrete or continuous")->check(CLI::IsMember({"discrete", "continuous"}));
    s->add_option("--restarts", o.restarts, "Random restarts");
    s->add_option("--iterations", o.iterations, "Local moves per restart");
    s->add_option("--max-support", o.max_support, "Largest support per variable");
    s->add_option("--resolution,--k", o.resolution, "Grid resolution for continuous candidates");
    s->add_option("--witness-dir", o.witness_dir, "Directory for witness distribution files");
  };
  auto* s = app.add_subcommand("search", "Search for a violation of a spec");
  s->add_option("spec", search.spec, "Spec file or builtin:NAME")->required();
  add_search_options(s, search);

  auto* r = app.add_subcommand("ratio", "Bracket the extremes of a ratio of entropy forms");
  r->add_option("num", ratio.num, "'doubling' or a numerator form file")->required();
  r->add_option("den", ratio.den, "Denominator form file");
  add_search_options(r, ratio);

  auto* z = app.add_subcommand("ruzsa", "Sumset table for quantized simplices");
  z->alias("ruzsa-table");
  add_common(z, run);
  z->add_option("--n", n_range, "Dimensions, e.g. 2..6");
  z->add_option("--L", l_list, "Scales, e.g. 16,32,64,128");

  auto* e = app.add_subcommand("embed", "Entropy-multiplying embedding of k iid copies");
  add_common(e, run);
  e->add_option("--pmf", emb.pmfs, "Pmf file or generator, one per variable")->required();
  e->add_option("--matrix", emb.matrix, "Rows separated by ';', entries by ','");
  e->add_option("--k", emb.k, "Number of iid copies");
  e->add_option("--M", emb.modulus, "Modulus of f_M (default: smallest collision-free)");
  e->add_option("--out-dir", emb.out_dir, "Directory for the embedded pmfs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) {
      run.command = "check";
      if (run.format.empty()) run.format = "csv";
      return cmd_check(run, check);
    }
    if (l->parsed()) {
      run.command = "lemma";
      if (run.format.empty()) run.format = "csv";
      return cmd_lemma(run, lemma);
    }
    if (s->parsed()) {
      run.command = "search";
      if (run.format.empty()) run.format = "json";
      return cmd_search(run, search);
    }
    if (r->parsed()) {
      run.command = "ratio";
      if (run.format.empty()) run.format = "json";
      return cmd_ratio(run, ratio);
    }
    if (z->parsed()) {
      run.command = "ruzsa";
      if (run.format.empty()) run.format = "csv";
      return cmd_ruzsa(run, n_range, l_list);
    }
    if (e->parsed()) {
      run.command = "embed";
      if (run.format.empty()) run.format = "csv";
      return cmd_embed(run, emb);
    }
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const ResourceError& err) {
    std::cerr << "error: resource limit: " << err.what() << "\n";
    return kResource;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
