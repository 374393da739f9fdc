#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "entropylab/constructions.hpp"
#include "entropylab/error.hpp"
#include "entropylab/generators.hpp"
#include "entropylab/inequality.hpp"

using namespace entropylab;

namespace {

unsigned __int128 choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  unsigned __int128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<unsigned __int128>(n - k + i) / i;
  return r;
}

// Difference vectors with j positive and l negative coordinates: the
// positive parts form a j-composition of some value <= L, likewise the negative.
unsigned __int128 difference_closed_form(std::int64_t n, std::int64_t L) {
  unsigned __int128 total = 0;
  for (std::int64_t j = 0; j <= n; ++j) {
    for (std::int64_t l = 0; j + l <= n; ++l) total += choose(n, j) * choose(n - j, l) * choose(L, j) * choose(L, l);
  }
  return total;
}

}  // namespace

TEST_CASE("lattice sets") {
  CHECK_THROWS_AS(LatticeSet(1, {{0}, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSet(2, {{0}}), std::invalid_argument);
  const LatticeSet s(1, {{3}, {-1}});
  CHECK(s.points().front() == Point{-1});
  CHECK(s.contains({3}));
  CHECK_FALSE(s.contains({0}));
  const LatticeSet d = sumset(s, s, SumSign::minus);
  CHECK(d == LatticeSet(1, {{-4}, {0}, {4}}));
}

TEST_CASE("simplex sizes are binomial coefficients") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::int64_t L : {1, 2, 4, 8}) {
      CHECK(simplex_lattice(n, L).size() == static_cast<std::size_t>(choose(L + static_cast<std::int64_t>(n), static_cast<std::int64_t>(n))));
    }
  }
  CHECK_THROWS_AS(simplex_lattice(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(simplex_lattice(2, 0), std::invalid_argument);
}

TEST_CASE("simplex sumset counts against brute force") {
  struct Row {
    std::size_t n;
    std::int64_t L;
    std::uint64_t a, sum, diff;
  };
  for (const Row r : {Row{2, 6, 28, 91, 127}, Row{3, 4, 35, 165, 309}, Row{4, 3, 35, 210, 471}, Row{2, 4, 15, 45, 61}}) {
    const SumsetCounts c = simplex_sumset_counts(r.n, r.L);
    CHECK(c.enumerated);
    CHECK(c.a == r.a);
    CHECK(c.sum == r.sum);
    CHECK(c.diff == r.diff);
    CHECK(static_cast<std::uint64_t>(difference_closed_form(static_cast<std::int64_t>(r.n), r.L)) == r.diff);
  }
  for (std::size_t n = 1; n <= 3; ++n) {
    const LatticeSet a = simplex_lattice(n, 5);
    CHECK(sumset(a, a, SumSign::plus) == simplex_lattice(n, 10));
  }
}

TEST_CASE("large simplex counts use the half-space description") {
  for (std::size_t n : {4u, 5u, 6u}) {
    const std::int64_t L = 128;
    const SumsetCounts c = simplex_sumset_counts(n, L);
    CHECK_FALSE(c.enumerated);
    const auto ni = static_cast<std::int64_t>(n);
    CHECK(c.a == static_cast<std::uint64_t>(choose(L + ni, ni)));
    CHECK(c.sum == static_cast<std::uint64_t>(choose(2 * L + ni, ni)));
    CHECK(c.diff == static_cast<std::uint64_t>(difference_closed_form(ni, L)));
  }
}

TEST_CASE("ruzsa ratios") {
  CHECK(ruzsa_ratio(2, 4) == doctest::Approx(1.276905126167666).epsilon(1e-14));
  CHECK(std::abs(ruzsa_ratio(2, 128) - std::log(6.0) / std::log(4.0)) < 0.02);
  double previous = ruzsa_ratio(1, 64);
  CHECK(previous == doctest::Approx(1.0));
  for (std::size_t n = 2; n <= 5; ++n) {
    const double r = ruzsa_ratio(n, 64);
    CHECK(r > previous);
    CHECK(r <= 2.0);
    previous = r;
  }
}

TEST_CASE("tensor powers") {
  const std::vector<double> m{0.25, 0.75};
  const LatticePMF p = LatticePMF::from_masses(0, m);
  const LatticePMF t = tensor_iid(p, 2);
  CHECK(t.dim() == 2);
  std::vector<double> masses(t.masses().begin(), t.masses().end());
  std::sort(masses.begin(), masses.end());
  CHECK(masses == std::vector<double>{1.0 / 16, 3.0 / 16, 3.0 / 16, 9.0 / 16});
  CHECK(shannon_entropy(tensor_iid(p, 5)).value == doctest::Approx(5 * shannon_entropy(p).value).epsilon(1e-14));
  CHECK_THROWS_AS(tensor_iid(LatticePMF::uniform(1, {{0}, {1}, {2}, {3}}), 13), ResourceError);
}

TEST_CASE("embedding multiplies every row entropy by k") {
  const LatticePMF bit = LatticePMF::uniform(1, {{0}, {1}});
  const auto e = embed({bit}, {{1}}, 2, 10);
  CHECK(e[0] == LatticePMF::uniform(1, {{0}, {1}, {10}, {11}}));

  const std::vector<double> m{0.5, 0.3, 0.2};
  const LatticePMF x = LatticePMF::from_masses(-1, m);
  const LatticePMF y = LatticePMF::uniform(1, {{0}, {2}, {5}});
  const InequalitySpec spec = builtin::sum_difference();
  IntMatrix a;
  for (const auto& row : spec.rows) a.push_back(row.coeffs);
  const EvalReport base = evaluate_discrete(spec, {{"X", x}, {"Y", y}});
  for (int k : {1, 2, 3}) {
    const auto emb = embed({x, y}, a, k);
    const EvalReport r = evaluate_discrete(spec, {{"X", emb[0]}, {"Y", emb[1]}});
    for (std::size_t i = 0; i < r.row_entropies.size(); ++i) {
      CHECK(r.row_entropies[i].value == doctest::Approx(k * base.row_entropies[i].value).epsilon(1e-12));
    }
  }
  CHECK(default_embedding_modulus({x, y}, a) == 8);
  const std::vector<double> skewed{1e-6, 1.0 - 1e-6};
  const auto tiny = embed({LatticePMF::from_masses(0, skewed)}, {{1}}, 3);
  CHECK(tiny[0].size() == 8);
  CHECK_THROWS_AS(embed({x, y}, a, 2, 2), std::invalid_argument);
}

TEST_CASE("smoothing gap") {
  const GridDensity z = gen::gaussian(0.0, 1.0, 8.0, 4);
  CHECK(std::abs(smoothing_gap(LatticePMF::point_mass({3}), z, 0.25).value) < 1e-12);
  const LatticePMF u = LatticePMF::uniform(1, {{0}, {1}});
  double previous = std::abs(smoothing_gap(u, z, 1.0).value);
  for (int s = 1; s <= 7; ++s) {
    const double gap = std::abs(smoothing_gap(u, z, std::ldexp(1.0, -s)).value);
    CHECK((gap <= previous || gap < 1e-12));
    previous = gap;
  }
  CHECK(previous < 1e-12);
  CHECK_THROWS_WITH_AS(smoothing_gap(u, gen::uniform(0.0, 1.0, 3), 0.5), doctest::Contains("too coarse"),
                       std::invalid_argument);
}
