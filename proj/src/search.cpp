#include "entropylab/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>

#include "entropylab/generators.hpp"
#include "point_hash.hpp"

namespace entropylab {

namespace {

// SplitMix64 stream; bit-exact on every platform, unlike <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t restart) {
  return detail::mix64(seed ^ detail::mix64(stream * 0x100000001b3ULL + restart));
}

using Atoms = std::vector<std::pair<std::int64_t, double>>;
using Candidate = std::vector<Atoms>;

// Iid classes across one or more specs, keyed by variable name.
struct Universe {
  std::vector<std::vector<std::string>> classes;

  std::size_t find(const std::string& name) const {
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (std::find(classes[c].begin(), classes[c].end(), name) != classes[c].end()) return c;
    }
    return classes.size();
  }

  void add(const InequalitySpec& spec) {
    for (const auto& cls : spec.iid_classes) {
      std::vector<std::string> names;
      for (auto v : cls) names.push_back(spec.variables[v]);
      std::vector<std::size_t> hits;
      for (const auto& n : names) {
        const std::size_t c = find(n);
        if (c < classes.size() && std::find(hits.begin(), hits.end(), c) == hits.end()) hits.push_back(c);
      }
      std::sort(hits.begin(), hits.end());
      std::vector<std::string> merged;
      for (auto c : hits) merged.insert(merged.end(), classes[c].begin(), classes[c].end());
      for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
        classes.erase(classes.begin() + static_cast<std::ptrdiff_t>(*it));
      }
      for (const auto& n : names) {
        if (std::find(merged.begin(), merged.end(), n) == merged.end()) merged.push_back(n);
      }
      classes.push_back(std::move(merged));
    }
  }
};

LatticePMF to_pmf(const Atoms& atoms) {
  std::vector<std::pair<Point, double>> a;
  a.reserve(atoms.size());
  for (const auto& [x, m] : atoms) a.push_back({{x}, m});
  return LatticePMF(1, std::move(a));
}

template <typename T>
std::map<std::string, T> assignment_for(const InequalitySpec& spec, const Universe& u,
                                        const std::vector<T>& per_class) {
  std::map<std::string, T> out;
  for (const auto& cls : spec.iid_classes) {
    const std::string& name = spec.variables[cls.front()];
    out.emplace(name, per_class[u.find(name)]);
  }
  return out;
}

struct Evaluator {
  Side side;
  int resolution;
  const Universe* universe;

  std::vector<LatticePMF> pmfs(const Candidate& c) const {
    std::vector<LatticePMF> out;
    for (const auto& atoms : c) out.push_back(to_pmf(atoms));
    return out;
  }
  std::vector<GridDensity> densities(const Candidate& c) const {
    std::vector<GridDensity> out;
    for (const auto& atoms : c) out.push_back(GridDensity::from_cell_pmf(to_pmf(atoms), resolution));
    return out;
  }
  double weighted_sum(const InequalitySpec& spec, const Candidate& c) const {
    if (side == Side::discrete) {
      return evaluate_discrete(spec, assignment_for(spec, *universe, pmfs(c))).weighted_sum.value;
    }
    return evaluate_continuous(spec, assignment_for(spec, *universe, densities(c))).weighted_sum.value;
  }
};

// Objective of a candidate, or nullopt when it must be rejected.
using Objective = std::function<std::optional<double>(const Candidate&)>;

struct RestartOutcome {
  Candidate best;
  double objective = -std::numeric_limits<double>::infinity();
  bool valid = false;
  std::vector<TraceEntry> trace;
  std::size_t evaluations = 0;
  std::size_t rejected = 0;
  double visited_min = std::numeric_limits<double>::infinity();
  double visited_max = -std::numeric_limits<double>::infinity();
  std::size_t visited = 0;
};

void normalize(Atoms& atoms) {
  atoms.erase(std::remove_if(atoms.begin(), atoms.end(), [](const auto& a) { return a.second < 1e-12; }),
              atoms.end());
  double total = 0.0;
  for (const auto& a : atoms) total += a.second;
  for (auto& a : atoms) a.second /= total;
  std::sort(atoms.begin(), atoms.end());
}

Atoms random_atoms(Rng& rng, std::size_t max_support) {
  const std::size_t span = 2 * max_support;
  const std::size_t s = 1 + rng.below(max_support);
  std::vector<std::int64_t> pos;
  while (pos.size() < s) {
    const auto x = static_cast<std::int64_t>(rng.below(span));
    if (std::find(pos.begin(), pos.end(), x) == pos.end()) pos.push_back(x);
  }
  Atoms atoms;
  for (auto x : pos) atoms.emplace_back(x, -std::log(1.0 - rng.uniform()) + 1e-9);
  normalize(atoms);
  return atoms;
}

Atoms grid_atoms(const GridDensity& f) {
  Atoms atoms;
  const LatticePMF cells = f.cell_pmf();
  for (std::size_t i = 0; i < cells.size(); ++i) atoms.emplace_back(cells.point(i)[0], cells.mass(i));
  normalize(atoms);
  return atoms;
}

Candidate initial(std::size_t restart, std::size_t classes, const SearchConfig& cfg, Rng& rng) {
  Candidate c(classes);
  if (restart == 0) {
    for (auto& a : c) {
      a = cfg.side == Side::discrete ? Atoms{{0, 0.5}, {1, 0.5}} : grid_atoms(gen::uniform(0.0, 1.0, cfg.resolution));
    }
    return c;
  }
  if (restart == 1 && cfg.side == Side::continuous) {
    const double small = std::sqrt(1.0 / (2.0 * std::numbers::pi * std::numbers::e));
    for (std::size_t i = 0; i < classes; ++i) {
      c[i] = grid_atoms(gen::gaussian(0.0, i % 2 == 0 ? small : 1.0, 4.0, cfg.resolution));
    }
    return c;
  }
  for (auto& a : c) a = random_atoms(rng, cfg.max_support);
  return c;
}

std::int64_t free_position(Rng& rng, const Atoms& atoms) {
  const std::int64_t lo = atoms.front().first - 2;
  const std::int64_t hi = atoms.back().first + 2;
  for (int tries = 0; tries < 64; ++tries) {
    const std::int64_t x = lo + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
    if (std::none_of(atoms.begin(), atoms.end(), [&](const auto& a) { return a.first == x; })) return x;
  }
  return hi + 1;
}

// Applies one random move; returns its name.
std::string perturb(Candidate& c, Rng& rng, double step, const SearchConfig& cfg) {
  Atoms& atoms = c[rng.below(c.size())];
  std::size_t kind = rng.below(3);
  if (kind == 0 && atoms.size() < 2) kind = 1;
  if (kind == 1 && atoms.size() >= cfg.max_support) kind = atoms.size() >= 2 ? 0 : 2;
  std::string name;
  if (kind == 0) {
    const std::size_t i = rng.below(atoms.size());
    std::size_t j = rng.below(atoms.size() - 1);
    if (j >= i) ++j;
    const double delta = step * atoms[i].second;
    atoms[i].second -= delta;
    atoms[j].second += delta;
    name = "transfer";
  } else if (kind == 1) {
    const std::size_t i = rng.below(atoms.size());
    const double delta = step * atoms[i].second;
    atoms[i].second -= delta;
    atoms.emplace_back(free_position(rng, atoms), delta);
    name = "grow";
  } else {
    const std::size_t i = rng.below(atoms.size());
    atoms[i].first = free_position(rng, atoms);
    name = "relocate";
  }
  normalize(atoms);
  return name;
}

RestartOutcome run_restart(std::size_t restart, std::uint64_t stream, std::size_t classes,
                           const SearchConfig& cfg, const Objective& objective) {
  static constexpr double kSteps[3] = {0.5, 0.1, 0.02};
  Rng rng(stream_seed(cfg.seed, stream, restart));
  RestartOutcome out;
  auto score = [&](const Candidate& c) {
    ++out.evaluations;
    auto v = objective(c);
    if (!v) {
      ++out.rejected;
    } else {
      out.visited_min = std::min(out.visited_min, *v);
      out.visited_max = std::max(out.visited_max, *v);
    }
    return v;
  };
  Candidate current;
  std::optional<double> value;
  for (int attempt = 0; attempt < 16 && !value; ++attempt) {
    current = initial(attempt == 0 ? restart : 2, classes, cfg, rng);
    value = score(current);
  }
  if (!value) return out;
  out.valid = true;
  out.best = current;
  out.objective = *value;
  out.trace.push_back({0, "start", *value});
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const std::size_t phase = std::min<std::size_t>(2, 3 * (t - 1) / std::max<std::size_t>(1, cfg.iterations));
    Candidate next = out.best;
    const std::string move = perturb(next, rng, kSteps[phase], cfg);
    const auto v = score(next);
    if (v && *v > out.objective) {
      out.best = std::move(next);
      out.objective = *v;
      out.trace.push_back({t, move, *v});
    }
  }
  return out;
}

std::vector<RestartOutcome> run_all(std::uint64_t stream, std::size_t classes, const SearchConfig& cfg,
                                    const Objective& objective) {
  const std::size_t n = std::max<std::size_t>(1, cfg.restarts);
  std::vector<RestartOutcome> results(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < n;) {
      try {
        results[r] = run_restart(r, stream, classes, cfg, objective);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(worker_count(cfg), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

SearchResult merge(const std::vector<RestartOutcome>& results, const Universe& u, const Evaluator& ev,
                   const SearchConfig& cfg, double sign) {
  const RestartOutcome* best = nullptr;
  std::size_t index = 0;
  SearchResult out;
  out.seed = cfg.seed;
  for (std::size_t r = 0; r < results.size(); ++r) {
    out.evaluations += results[r].evaluations;
    if (!results[r].valid) continue;
    if (!best || results[r].objective > best->objective) {
      best = &results[r];
      index = r;
    }
  }
  if (!best) return out;
  out.objective = sign * best->objective;
  out.restart = index;
  out.trace = best->trace;
  for (auto& t : out.trace) t.objective *= sign;
  for (std::size_t c = 0; c < u.classes.size(); ++c) {
    const std::string& name = u.classes[c].front();
    if (cfg.side == Side::discrete) {
      out.discrete_witness.emplace(name, to_pmf(best->best[c]));
    } else {
      out.continuous_witness.emplace(name, GridDensity::from_cell_pmf(to_pmf(best->best[c]), ev.resolution));
    }
  }
  return out;
}

void check_config(const SearchConfig& cfg) {
  if (cfg.max_support < 1) throw std::invalid_argument("search: max support must be at least 1");
  if (cfg.side == Side::continuous && (cfg.resolution < 0 || cfg.resolution > 16)) {
    throw std::invalid_argument("search: continuous resolution must be in [0, 16]");
  }
}

}  // namespace

Side parse_side(const std::string& s) {
  if (s == "discrete") return Side::discrete;
  if (s == "continuous") return Side::continuous;
  throw std::invalid_argument("side must be discrete or continuous, got " + s);
}

const char* to_string(Side side) { return side == Side::discrete ? "discrete" : "continuous"; }

std::size_t worker_count(const SearchConfig& config) {
  std::size_t n = config.threads;
  if (n == 0) {
    if (const char* env = std::getenv("ENTROPYLAB_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && v > 0) n = static_cast<std::size_t>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, std::max<std::size_t>(1, config.restarts)));
}

SearchResult search_violation(const InequalitySpec& spec, const SearchConfig& config) {
  check_config(config);
  Universe u;
  u.add(spec);
  const Evaluator ev{config.side, config.resolution, &u};
  const Objective objective = [&](const Candidate& c) -> std::optional<double> {
    return ev.weighted_sum(spec, c);
  };
  return merge(run_all(0, u.classes.size(), config, objective), u, ev, config, 1.0);
}

RatioBracket extremal_ratio(const InequalitySpec& num, const InequalitySpec& den, const SearchConfig& config) {
  check_config(config);
  Universe u;
  u.add(num);
  u.add(den);
  const Evaluator ev{config.side, config.resolution, &u};
  RatioBracket out;
  out.visited_min = std::numeric_limits<double>::infinity();
  out.visited_max = -std::numeric_limits<double>::infinity();
  for (int dir = 0; dir < 2; ++dir) {
    const double sign = dir == 0 ? -1.0 : 1.0;
    const Objective objective = [&](const Candidate& c) -> std::optional<double> {
      const double d = ev.weighted_sum(den, c);
      if (std::abs(d) < kDegenerateDenominator) return std::nullopt;
      return sign * (ev.weighted_sum(num, c) / d);
    };
    const auto results = run_all(static_cast<std::uint64_t>(dir + 1), u.classes.size(), config, objective);
    for (const auto& r : results) {
      out.rejected += r.rejected;
      out.visited += r.evaluations - r.rejected;
      if (r.evaluations == r.rejected) continue;
      out.visited_min = std::min(out.visited_min, sign > 0 ? r.visited_min : -r.visited_max);
      out.visited_max = std::max(out.visited_max, sign > 0 ? r.visited_max : -r.visited_min);
    }
    SearchResult best = merge(results, u, ev, config, sign);
    bool any = false;
    for (const auto& r : results) any = any || r.valid;
    if (!any) throw std::invalid_argument("extremal_ratio: degenerate denominator on all candidates");
    (dir == 0 ? out.inf : out.sup) = std::move(best);
  }
  return out;
}

}  // namespace entropylab
