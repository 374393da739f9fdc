#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entropylab/generators.hpp"
#include "entropylab/info_measures.hpp"
#include "support.hpp"

using namespace entropylab;

TEST_CASE("total variation examples") {
  const LatticePMF a = LatticePMF::uniform(1, {{0}, {1}});
  const LatticePMF b = LatticePMF::uniform(1, {{1}, {2}});
  CHECK(total_variation(a, a).value == 0.0);
  CHECK(total_variation(a, b).value == doctest::Approx(0.5));
  CHECK(total_variation(LatticePMF::point_mass({0}), LatticePMF::point_mass({5})).value == doctest::Approx(1.0));
  CHECK(total_variation(CyclicPMF::uniform(2, 1), CyclicPMF::point_mass(2, {0})).value == doctest::Approx(0.75));
  CHECK(total_variation(gen::uniform(0.0, 1.0, 2), gen::uniform(0.0, 1.0, 5)).value < 1e-15);
}

TEST_CASE("kl divergence") {
  const LatticePMF a = LatticePMF::uniform(1, {{0}, {1}});
  const std::vector<double> m{0.25, 0.75};
  const LatticePMF b = LatticePMF::from_masses(0, m);
  CHECK(kl_divergence(a, a).value == doctest::Approx(0.0));
  CHECK(kl_divergence(a, b).value == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
  CHECK_THROWS_AS(kl_divergence(a, LatticePMF::point_mass({0})), std::invalid_argument);
}

TEST_CASE("pinsker inequality on random pairs") {
  testing::Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const LatticePMF p = testing::random_pmf(rng, 8, 0, 7);
    std::vector<double> full = testing::random_masses(rng, 8);
    const LatticePMF q = LatticePMF::from_masses(0, full);
    const double tv = total_variation(p, q).value;
    CHECK(tv * tv <= 0.5 * kl_divergence(p, q).value + 1e-12);
  }
}

TEST_CASE("total variation contracts under maps") {
  testing::Rng rng(7);
  const PointMap f = [](PointView x) { return Point{x[0] * x[0] % 5}; };
  for (int trial = 0; trial < 500; ++trial) {
    const LatticePMF p = testing::random_pmf(rng, 8);
    const LatticePMF q = testing::random_pmf(rng, 8);
    CHECK(total_variation(pushforward(p, f, 1), pushforward(q, f, 1)).value <=
          total_variation(p, q).value + 1e-15);
  }
}

TEST_CASE("shift total variation") {
  CHECK(shift_tv(gen::uniform(0.0, 1.0, 3), 0.125).value == doctest::Approx(0.125));
  const GridDensity f = gen::power(1.0, 8);
  CHECK(shift_tv(f, 0.125).value == doctest::Approx(0.234375).epsilon(1e-13));
  CHECK(shift_tv(f, 1.0 / 64.0).value == doctest::Approx(0.031005859375).epsilon(1e-13));
  CHECK(shift_tv(f, 0.0).value == 0.0);
  CHECK_THROWS_AS(shift_tv(f, 1.0 / 1024.0), std::invalid_argument);
}

TEST_CASE("conditional total variation bound") {
  const LatticePMF x = LatticePMF::uniform(1, {{0}, {1}, {2}, {3}});
  const std::vector<double> m{0.4, 0.1, 0.1, 0.4};
  const LatticePMF y = LatticePMF::from_masses(0, m);
  const PointMap parity = [](PointView v) { return Point{v[0] % 2}; };
  const auto r = conditional_tv_bound_check(x, y, parity, [](PointView z) { return z[0] == 0; });
  CHECK(r.event_probability == doctest::Approx(0.5));
  CHECK(r.lhs == doctest::Approx(0.3));
  CHECK(r.rhs == doctest::Approx(0.6));
  CHECK(r.holds);
  CHECK_THROWS_AS(conditional_tv_bound_check(x, y, parity, [](PointView z) { return z[0] == 7; }),
                  std::invalid_argument);
  const PointMap low = [](PointView v) { return Point{v[0] < 1 ? 0 : 1}; };
  CHECK_THROWS_AS(conditional_tv_bound_check(x, y, low, [](PointView z) { return z[0] == 0; }),
                  std::invalid_argument);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
  CHECK(binary_entropy(0.1) == doctest::Approx(binary_entropy(0.9)).epsilon(1e-15));
  CHECK(binary_entropy(1e-12) > 0.0);
}

TEST_CASE("T-information bound") {
  const LatticePMF bit = LatticePMF::uniform(1, {{0}, {1}});
  const auto indep = t_information_bound(JointPMF::product(bit, bit), 2);
  CHECK(indep.t_information == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(indep.holds);
  const JointPMF diag = joint_of([](PointView v) { return Point{v[0]}; }, bit, 1);
  const auto d = t_information_bound(diag, 2);
  CHECK(d.t_information == doctest::Approx(0.5));
  CHECK(d.mutual_information.value == doctest::Approx(std::log(2.0)));
  CHECK(d.holds);
  CHECK_THROWS_AS(t_information_bound(diag, 1), std::invalid_argument);

  testing::Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t w = static_cast<std::size_t>(rng.between(2, 4));
    const std::size_t ny = static_cast<std::size_t>(rng.between(1, 4));
    const auto m = testing::random_masses(rng, w * ny);
    std::vector<JointPMF::Atom> atoms;
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        atoms.push_back({{static_cast<std::int64_t>(i)}, {static_cast<std::int64_t>(j)}, m[i * ny + j]});
      }
    }
    CHECK(t_information_bound(JointPMF(1, 1, atoms), w).holds);
  }
}

TEST_CASE("integer and fractional parts share little information") {
  CHECK(int_frac_mutual_information(gen::uniform(0.0, 4.0, 6), 2).value == doctest::Approx(0.0).epsilon(1e-14));
  const GridDensity f = gen::power(1.0, 10);
  CHECK(int_frac_mutual_information(f, 2).value == doctest::Approx(0.008683164403425536).epsilon(1e-11));
  CHECK(int_frac_mutual_information(f, 6).value == doctest::Approx(8.99766485300546e-05).epsilon(1e-9));
  CHECK(int_frac_mutual_information(f, 0).value == doctest::Approx(0.0).epsilon(1e-14));
  double previous = int_frac_mutual_information(f, 1).value;
  for (int k = 2; k < 10; ++k) {
    const double v = int_frac_mutual_information(f, k).value;
    CHECK(v < previous);
    previous = v;
  }
  CHECK_THROWS_AS(int_frac_mutual_information(f, 10), std::invalid_argument);
}
