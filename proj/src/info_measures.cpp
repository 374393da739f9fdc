#include "entropylab/info_measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "point_hash.hpp"

namespace entropylab {

namespace {

TVValue clamp_tv(double twice) {
  return {std::clamp(0.5 * twice, 0.0, 1.0)};
}

bool lex_less(PointView a, PointView b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Merge-walks two sorted supports, calling fn(mass_p, mass_q) per union atom.
template <typename Fn>
void walk_union(const LatticePMF& p, const LatticePMF& q, Fn&& fn) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < p.size() || j < q.size()) {
    if (j == q.size() || (i < p.size() && lex_less(p.point(i), q.point(j)))) {
      fn(p.mass(i++), 0.0);
    } else if (i == p.size() || lex_less(q.point(j), p.point(i))) {
      fn(0.0, q.mass(j++));
    } else {
      fn(p.mass(i++), q.mass(j++));
    }
  }
}

LatticePMF conditioned(const LatticePMF& x, const PointMap& f, const EventPredicate& event,
                       double& probability) {
  std::vector<std::pair<Point, double>> atoms;
  CompensatedSum total;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!event(f(x.point(i)))) continue;
    atoms.emplace_back(Point(x.point(i).begin(), x.point(i).end()), x.mass(i));
    total += x.mass(i);
  }
  probability = total.value();
  if (!(probability > 0.0)) throw std::invalid_argument("conditional_tv_bound_check: P[Z in E] = 0");
  for (auto& a : atoms) a.second /= probability;
  return LatticePMF(x.dim(), std::move(atoms));
}

}  // namespace

TVValue total_variation(const LatticePMF& p, const LatticePMF& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("total_variation: dimension mismatch");
  CompensatedSum l1;
  walk_union(p, q, [&](double a, double b) { l1 += std::abs(a - b); });
  return clamp_tv(l1.value());
}

TVValue total_variation(const CyclicPMF& p, const CyclicPMF& q) {
  if (p.dim() != q.dim() || p.modulus_log2() != q.modulus_log2()) {
    throw std::invalid_argument("total_variation: group mismatch");
  }
  CompensatedSum l1;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p.table()[i] - q.table()[i]);
  return clamp_tv(l1.value());
}

TVValue total_variation(const GridDensity& f, const GridDensity& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("total_variation: dimension mismatch");
  const int r = std::max(f.resolution(), g.resolution());
  return total_variation(f.refined(r).cell_pmf(), g.refined(r).cell_pmf());
}

Nats kl_divergence(const LatticePMF& p, const LatticePMF& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("kl_divergence: dimension mismatch");
  CompensatedSum d;
  double magnitude = 0.0;
  std::size_t terms = 0;
  walk_union(p, q, [&](double a, double b) {
    if (a == 0.0) return;
    if (b == 0.0) throw std::invalid_argument("kl_divergence: p is not absolutely continuous w.r.t. q");
    const double t = a * std::log(a / b);
    d += t;
    magnitude += std::abs(t);
    ++terms;
  });
  return {std::max(0.0, d.value()), summation_error(terms, magnitude)};
}

TVValue shift_tv(const GridDensity& f, std::span<const double> shift) {
  return total_variation(f, translate(f, shift));
}

TVValue shift_tv(const GridDensity& f, double shift) {
  if (f.dim() != 1) throw std::invalid_argument("shift_tv: scalar shift needs a one-dimensional density");
  const double s[1] = {shift};
  return shift_tv(f, std::span<const double>(s));
}

ConditionalTV conditional_tv_bound_check(const LatticePMF& x, const LatticePMF& y, const PointMap& f,
                                         const EventPredicate& event) {
  double px = 0.0;
  double py = 0.0;
  const LatticePMF cx = conditioned(x, f, event, px);
  const LatticePMF cy = conditioned(y, f, event, py);
  if (std::abs(px - py) > kMassTolerance) {
    throw std::invalid_argument("conditional_tv_bound_check: f(X) and f(Y) differ in law on E (" +
                                std::to_string(px) + " vs " + std::to_string(py) + ")");
  }
  const double lhs = total_variation(cx, cy).value;
  const double rhs = total_variation(x, y).value / px;
  return {lhs, rhs, px, lhs <= rhs + 1e-12};
}

double binary_entropy(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("binary_entropy: argument outside [0,1]");
  const double u = std::min(t, 1.0 - t);
  if (u == 0.0) return 0.0;
  if (u < 1e-8) {
    // -u ln u + u - u^2/2 - u^3/6 from the expansion of -(1-u) ln(1-u).
    return -u * std::log(u) + u - u * u / 2.0;
  }
  return -u * std::log(u) - (1.0 - u) * std::log1p(-u);
}

TVValue t_information(const JointPMF& joint) {
  const LatticePMF w = joint.first_marginal();
  const LatticePMF y = joint.second_marginal();
  return total_variation(joint.flattened(), JointPMF::product(w, y).flattened());
}

TInformationBound t_information_bound(const JointPMF& joint, std::size_t wcard) {
  if (wcard < 2) throw std::invalid_argument("t_information_bound: |W| must be at least 2");
  if (joint.first_marginal().size() > wcard) {
    throw std::invalid_argument("t_information_bound: W has more than " + std::to_string(wcard) + " atoms");
  }
  const Nats mi = mutual_information(joint);
  const double t = t_information(joint).value;
  const double bound = std::log(static_cast<double>(wcard - 1)) * t + binary_entropy(t);
  return {mi, t, bound, mi.value <= bound + 1e-10};
}

Nats int_frac_mutual_information(const GridDensity& f, int k) {
  if (k >= f.resolution()) {
    throw std::invalid_argument("int_frac_mutual_information: need k < resolution");
  }
  const int shift = f.resolution() - k;
  const std::int64_t m = std::int64_t{1} << shift;
  const std::size_t d = f.dim();
  const LatticePMF cells = f.cell_pmf();
  std::vector<JointPMF::Atom> atoms;
  atoms.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Point q(d);
    Point s(d);
    for (std::size_t c = 0; c < d; ++c) {
      q[c] = cells.point(i)[c] >> shift;
      s[c] = cells.point(i)[c] & (m - 1);
    }
    atoms.push_back({std::move(q), std::move(s), cells.mass(i)});
  }
  return mutual_information(JointPMF(d, d, std::move(atoms)));
}

}  // namespace entropylab
