#include <doctest.h>

#include <cstdlib>
#include <stdexcept>

#include "entropylab/search.hpp"

using namespace entropylab;

namespace {

SearchConfig small(Side side, std::uint64_t seed) {
  SearchConfig c;
  c.side = side;
  c.seed = seed;
  c.restarts = 4;
  c.iterations = 60;
  c.max_support = 5;
  return c;
}

bool same(const SearchResult& a, const SearchResult& b) {
  if (a.objective != b.objective || a.restart != b.restart || a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    if (a.trace[i].objective != b.trace[i].objective || a.trace[i].move != b.trace[i].move) return false;
  }
  return a.discrete_witness == b.discrete_witness && a.continuous_witness == b.continuous_witness;
}

}  // namespace

TEST_CASE("sides") {
  CHECK(parse_side("discrete") == Side::discrete);
  CHECK(parse_side("continuous") == Side::continuous);
  CHECK(std::string(to_string(Side::continuous)) == "continuous");
  CHECK_THROWS_AS(parse_side("both"), std::invalid_argument);
}

TEST_CASE("worker count") {
  SearchConfig c;
  c.restarts = 3;
  c.threads = 8;
  CHECK(worker_count(c) == 3);
  c.threads = 2;
  CHECK(worker_count(c) == 2);
  c.threads = 0;
  ::setenv("ENTROPYLAB_THREADS", "1", 1);
  CHECK(worker_count(c) == 1);
  ::unsetenv("ENTROPYLAB_THREADS");
}

TEST_CASE("search is reproducible and independent of threads") {
  for (Side side : {Side::discrete, Side::continuous}) {
    SearchConfig c = small(side, 42);
    c.threads = 1;
    const SearchResult a = search_violation(builtin::sum_difference(), c);
    const SearchResult b = search_violation(builtin::sum_difference(), c);
    c.threads = 4;
    const SearchResult d = search_violation(builtin::sum_difference(), c);
    CHECK(same(a, b));
    CHECK(same(a, d));
    CHECK(a.seed == 42);
    c.seed = 43;
    CHECK(search_violation(builtin::subadditivity(), c).evaluations > 0);
  }
}

TEST_CASE("valid inequalities are never violated") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SearchResult r = search_violation(builtin::sum_difference(), small(Side::discrete, seed));
    CHECK(r.objective <= kDiscreteTolerance);
    const SearchResult d = search_violation(builtin::doubling_upper(), small(Side::discrete, seed));
    CHECK(d.objective <= kDiscreteTolerance);
  }
}

TEST_CASE("two hundred restarts find nothing above zero for the sum-difference spec") {
  SearchConfig c;
  c.restarts = 200;
  c.iterations = 100;
  c.seed = 11;
  CHECK(search_violation(builtin::sum_difference(), c).objective <= kDiscreteTolerance);
}

TEST_CASE("continuous subadditivity has violations") {
  const SearchResult r = search_violation(builtin::subadditivity(), small(Side::continuous, 5));
  CHECK(r.objective > kContinuousTolerance);
  CHECK(r.continuous_witness.size() == 2);
  const EvalReport check = evaluate_continuous(builtin::subadditivity(), r.continuous_witness);
  CHECK(-check.slack == doctest::Approx(r.objective).epsilon(1e-12));
}

TEST_CASE("doubling ratio bracket") {
  SearchConfig c = small(Side::discrete, 7);
  c.restarts = 1;
  c.iterations = 0;
  const RatioBracket first = extremal_ratio(builtin::doubling_numerator(), builtin::doubling_denominator(), c);
  CHECK(first.inf.objective == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(first.sup.objective == doctest::Approx(1.0).epsilon(1e-14));

  const RatioBracket b = extremal_ratio(builtin::doubling_numerator(), builtin::doubling_denominator(), small(Side::discrete, 7));
  CHECK(b.inf.objective <= 1.0);
  CHECK(b.sup.objective >= 1.0);
  CHECK(b.inf.objective >= 0.5);
  CHECK(b.sup.objective <= 2.0);
  CHECK(b.visited_min == b.inf.objective);
  CHECK(b.visited > 0);

  SearchConfig wide;
  wide.seed = 3;
  wide.max_support = 16;
  const RatioBracket w = extremal_ratio(builtin::doubling_numerator(), builtin::doubling_denominator(), wide);
  CHECK(w.visited >= 10000);
  CHECK(w.visited_min >= 0.5);
  CHECK(w.visited_max <= 2.0);

  const InequalitySpec zero = parse_form("H(U) - H(U')\niid: {U, U'}");
  CHECK_THROWS_WITH_AS(extremal_ratio(builtin::doubling_numerator(), zero, small(Side::discrete, 1)),
                       doctest::Contains("degenerate denominator"), std::invalid_argument);
}
