// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "entropylab/constructions.hpp"
#include "entropylab/generators.hpp"
#include "entropylab/grid_density.hpp"
#include "entropylab/inequality.hpp"
#include "entropylab/info_measures.hpp"

using namespace entropylab;

namespace {

constexpr double kRenyiCeiling = 5e-3;
constexpr double kQuantGapCeiling = 0.02;
constexpr double kDiscreteSlackFloor = -1e-9;
constexpr double kCounterexampleSlack = -0.02;
constexpr double kCounterexampleTolerance = 5e-3;
constexpr double kEpiTolerance = 1e-3;
constexpr double kEmbedTolerance = 1e-9;
constexpr double kSmoothingCeiling = 1e-3;
constexpr double kRuzsaTolerance = 0.02;
constexpr double kEqualityTolerance = 1e-9;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t s_;
};

std::vector<double> random_masses(Rng& rng, std::size_t n) {
  std::vector<double> m(n);
  double total = 0.0;
  for (auto& x : m) {
    x = -std::log(1.0 - rng.uniform()) + 1e-6;
    total += x;
  }
  for (auto& x : m) x /= total;
  return m;
}

LatticePMF random_pmf(Rng& rng, std::size_t max_support) {
  const auto n = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_support)));
  std::vector<std::pair<Point, double>> atoms;
  std::vector<std::int64_t> used;
  const auto m = random_masses(rng, n);
  while (atoms.size() < n) {
    const auto x = rng.between(-10, 10);
    bool dup = false;
    for (auto u : used) dup = dup || u == x;
    if (dup) continue;
    used.push_back(x);
    atoms.push_back({{x}, m[atoms.size()]});
  }
  return LatticePMF(1, std::move(atoms));
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string run_cli(const std::string& args, const std::string& env, int& status) {
  const std::string cmd = env + " " + ENTROPYLAB_CLI + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = ::pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

Verdict renyi() {
  const GridDensity f = gen::power(1.0, 14);
  const double h = 0.5 - std::log(2.0);
  const double g4 = std::abs(renyi_gap(f, 4, h).value);
  const double g12 = std::abs(renyi_gap(f, 12, h).value);
  return {g12 < g4 && g12 < kRenyiCeiling, "|gap(4)|=" + fmt(g4) + " |gap(12)|=" + fmt(g12)};
}

Verdict quantization_gap() {
  const GridDensity u = gen::uniform(0.0, 1.0, 12);
  const GridDensity fs[2] = {u, u};
  const std::int64_t a[2] = {1, 1};
  std::vector<double> gaps;
  for (int k = 0; k <= 10; k += 2) gaps.push_back(quantization_commutation_gap(fs, a, k).value);
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
  bool rejected = false;
  const std::int64_t b[2] = {2, 4};
  try {
    quantization_commutation_gap(fs, b, 2);
  } catch (const std::invalid_argument& e) {
    rejected = std::string(e.what()).find("relatively prime") != std::string::npos;
  }
  const bool pass = gaps[0] == std::log(2.0) && gaps.back() < kQuantGapCeiling && decreasing && rejected;
  return {pass, "gap(0)=" + fmt(gaps[0]) + " gap(10)=" + fmt(gaps.back()) +
                    (decreasing ? " decreasing" : " not decreasing") + (rejected ? " (2,4) rejected" : " (2,4) accepted")};
}

Verdict discrete_suite() {
  const std::vector<InequalitySpec> pairs{builtin::sum_difference(), builtin::subadditivity(),
                                          builtin::sum_dominates_first(), builtin::sum_dominates_second()};
  const std::vector<InequalitySpec> singles{builtin::doubling_lower(), builtin::doubling_upper()};
  Rng rng(20240601);
  double worst = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    const LatticePMF x = random_pmf(rng, 8);
    const LatticePMF y = random_pmf(rng, 8);
    for (const auto& s : pairs) worst = std::min(worst, evaluate_discrete(s, {{"X", x}, {"Y", y}}).slack);
    for (const auto& s : singles) worst = std::min(worst, evaluate_discrete(s, {{"U", x}}).slack);
  }
  return {worst >= kDiscreteSlackFloor, "min slack " + fmt(worst) + " over 6000 evaluations"};
}

Verdict counterexample() {
  const double two_pi_e = 2.0 * M_PI * std::exp(1.0);
  const GridDensity x = gen::gaussian(0.0, std::sqrt(1.0 / two_pi_e), 8.0, 10);
  const GridDensity y = gen::gaussian(0.0, 1.0, 8.0, 10);
  const double slack = evaluate_continuous(builtin::subadditivity(), {{"X", x}, {"Y", y}}).slack;
  const double closed = -0.5 * std::log1p(1.0 / two_pi_e);
  return {slack <= kCounterexampleSlack && std::abs(slack - closed) < kCounterexampleTolerance,
          "slack " + fmt(slack) + " vs closed form " + fmt(closed)};
}

Verdict epi() {
  const GridDensity g = gen::gaussian(0.0, 1.0, 8.0, 8);
  const double gap = epi_gap(g, g).value;
  return {std::abs(gap) < kEpiTolerance, "|h(X+X')-h(X)-ln2/2|=" + fmt(std::abs(gap))};
}

Verdict embedding() {
  Rng rng(31337);
  double worst = 0.0;
  std::size_t collisions = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<LatticePMF> pmfs{random_pmf(rng, 4), random_pmf(rng, 4)};
    IntMatrix a(3, std::vector<std::int64_t>(2));
    for (auto& row : a) {
      do {
        for (auto& c : row) c = rng.between(-3, 3);
      } while (row[0] == 0 && row[1] == 0);
    }
    std::vector<LatticePMF> emb;
    try {
      emb = embed(pmfs, a, 3);
    } catch (const std::exception&) {
      ++collisions;
      continue;
    }
    for (const auto& row : a) {
      const double before = shannon_entropy(linear_combination(pmfs, row)).value;
      const double after = shannon_entropy(linear_combination(emb, row)).value;
      worst = std::max(worst, std::abs(after - 3.0 * before));
    }
  }
  return {collisions == 0 && worst < kEmbedTolerance,
          "max |H_after - 3 H_before|=" + fmt(worst) + ", collisions " + std::to_string(collisions)};
}

Verdict smoothing() {
  const LatticePMF u = LatticePMF::uniform(1, {{0}, {1}});
  const GridDensity z = gen::gaussian(0.0, 1.0, 8.0, 4);
  const double coarse = std::abs(smoothing_gap(u, z, 0x1p-3).value);
  const double fine = std::abs(smoothing_gap(u, z, 0x1p-7).value);
  return {fine < kSmoothingCeiling && fine < coarse, "|gap(2^-3)|=" + fmt(coarse) + " |gap(2^-7)|=" + fmt(fine)};
}

Verdict ruzsa() {
  const double r = ruzsa_ratio(2, 128);
  const double limit = std::log(6.0) / std::log(4.0);
  bool increasing = true;
  bool bounded = r <= 2.0;
  double previous = 0.0;
  std::string row;
  for (std::size_t n = 1; n <= 5; ++n) {
    const double v = ruzsa_ratio(n, 64);
    increasing = increasing && v > previous;
    bounded = bounded && v <= 2.0;
    previous = v;
    row += (n == 1 ? "" : ",") + fmt(v);
  }
  const SumsetCounts c = simplex_sumset_counts(2, 4);
  const bool exact = c.a == 15 && c.sum == 45 && c.diff == 61;
  return {std::abs(r - limit) < kRuzsaTolerance && increasing && bounded && exact,
          "ratio(2,128)=" + fmt(r) + " ratio(n,64)=[" + row + "] counts " + std::to_string(c.a) + "/" +
              std::to_string(c.sum) + "/" + std::to_string(c.diff)};
}

Verdict t_bound_and_pinsker() {
  Rng rng(4242);
  std::size_t t_fail = 0;
  std::size_t p_fail = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto w = static_cast<std::size_t>(rng.between(2, 5));
    const auto ny = static_cast<std::size_t>(rng.between(1, 5));
    const auto m = random_masses(rng, w * ny);
    std::vector<JointPMF::Atom> atoms;
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        atoms.push_back({{static_cast<std::int64_t>(i)}, {static_cast<std::int64_t>(j)}, m[i * ny + j]});
      }
    }
    if (!t_information_bound(JointPMF(1, 1, std::move(atoms)), w).holds) ++t_fail;

    const LatticePMF p = random_pmf(rng, 8);
    const LatticePMF q = random_pmf(rng, 8);
    // Pinsker needs D(p||q) finite: mix q into p's support.
    std::vector<std::pair<Point, double>> mixed;
    for (std::size_t i = 0; i < p.size(); ++i) mixed.push_back({Point(p.point(i).begin(), p.point(i).end()), 0.5 * p.mass(i)});
    for (std::size_t i = 0; i < q.size(); ++i) mixed.push_back({Point(q.point(i).begin(), q.point(i).end()), 0.5 * q.mass(i)});
    const LatticePMF r(1, std::move(mixed));
    const double tv = total_variation(p, r).value;
    if (!(tv * tv <= 0.5 * kl_divergence(p, r).value + 1e-12)) ++p_fail;
  }
  const LatticePMF bit = LatticePMF::uniform(1, {{0}, {1}});
  const auto diag = t_information_bound(joint_of([](PointView x) { return Point{x[0]}; }, bit, 1), 2);
  const double slack = std::abs(diag.bound - diag.mutual_information.value);
  return {t_fail == 0 && p_fail == 0 && slack < kEqualityTolerance,
          "T-bound failures " + std::to_string(t_fail) + ", Pinsker failures " + std::to_string(p_fail) +
              ", diagonal |bound - I|=" + fmt(slack)};
}

Verdict torus() {
  const GridDensity angle = gen::uniform(0.0, 1.0, 12);
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    worst = std::max(worst, std::abs(shannon_entropy(torus_quantize(angle, k)).value - k * std::log(2.0)));
  }
  const GridDensity f = gen::power(1.0, 12);
  const GridDensity fs[2] = {f, f};
  const std::int64_t a[2] = {1, 1};
  bool decreasing = true;
  double previous = INFINITY;
  std::string row;
  for (int k = 2; k <= 8; ++k) {
    const double gap = std::abs(cyclic_commutation_gap(fs, a, k).value);
    decreasing = decreasing && gap < previous;
    previous = gap;
    row += (k == 2 ? "" : ",") + fmt(gap);
  }
  return {worst < 1e-12 && decreasing, "max |H - k ln2|=" + fmt(worst) + " cyclic gaps [" + row + "]"};
}

Verdict determinism() {
  const std::vector<std::string> runs{"search builtin:sumdiff --seed 7",
                                      "search builtin:subadditivity --side continuous --seed 7",
                                      "ratio doubling --seed 7", "ratio doubling --side continuous --seed 7 --restarts 4"};
  std::size_t mismatches = 0;
  for (const auto& args : runs) {
    int s1 = 0;
    int s2 = 0;
    int s3 = 0;
    const std::string a = run_cli(args, "ENTROPYLAB_THREADS=1", s1);
    const std::string b = run_cli(args, "ENTROPYLAB_THREADS=1", s2);
    const std::string c = run_cli(args, "ENTROPYLAB_THREADS=4", s3);
    if (a.empty() || a != b || a != c || s1 != s2 || s1 != s3 || s1 > 1) ++mismatches;
  }
  return {mismatches == 0, std::to_string(runs.size() - mismatches) + "/" + std::to_string(runs.size()) +
                               " runs byte-identical across replays and thread counts"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {1, "renyi gap", renyi, 10.0},
      {2, "quantization commutation gap", quantization_gap, 30.0},
      {3, "discrete inequality suite", discrete_suite, 60.0},
      {4, "continuous counterexample", counterexample, 0.0},
      {5, "entropy power equality", epi, 0.0},
      {6, "embedding", embedding, 0.0},
      {7, "smoothing", smoothing, 0.0},
      {8, "ruzsa sharpness", ruzsa, 120.0},
      {9, "T-information and Pinsker", t_bound_and_pinsker, 0.0},
      {10, "cyclic and torus", torus, 0.0},
      {11, "determinism", determinism, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      v.pass = false;
      v.detail += " (over the " + fmt(c.budget_s) + " s budget)";
    }
    if (!v.pass) ++failures;
    std::printf("criterion %2d %-30s %s  %s  [%.3f s]\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
