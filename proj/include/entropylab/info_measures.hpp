#pragma once

#include <functional>
#include <span>

#include "entropylab/grid_density.hpp"
#include "entropylab/lattice_pmf.hpp"
#include "entropylab/nats.hpp"

namespace entropylab {

/// A total variation distance, in [0, 1].
struct TVValue {
  double value = 0.0;
};

/// Half the L1 distance between mass functions.
TVValue total_variation(const LatticePMF& p, const LatticePMF& q);
TVValue total_variation(const CyclicPMF& p, const CyclicPMF& q);
/// Half the L1 distance between densities; the coarser one is refined first.
TVValue total_variation(const GridDensity& f, const GridDensity& g);

/// D(p || q) in nats. Throws when p puts mass where q has none.
Nats kl_divergence(const LatticePMF& p, const LatticePMF& q);

/// TV between f and the law of X + a. The shift must lie on f's grid.
TVValue shift_tv(const GridDensity& f, std::span<const double> shift);
TVValue shift_tv(const GridDensity& f, double shift);

struct ConditionalTV {
  double lhs;  ///< TV(P_{X|Z in E}, P_{Y|Z in E})
  double rhs;  ///< TV(P_X, P_Y) / P[Z in E]
  double event_probability;
  bool holds;
};

using EventPredicate = std::function<bool(PointView)>;

/// Checks the conditional TV bound for Z = f(X), f(Y) and the event {Z in E}.
/// f(X) and f(Y) must assign E the same probability.
ConditionalTV conditional_tv_bound_check(const LatticePMF& x, const LatticePMF& y, const PointMap& f,
                                         const EventPredicate& event);

/// h_b(t) = -t ln t - (1-t) ln(1-t), zero at both endpoints.
double binary_entropy(double t);

/// T(W;Y) = TV(P_WY, P_W x P_Y).
TVValue t_information(const JointPMF& joint);

struct TInformationBound {
  Nats mutual_information;
  double t_information;
  double bound;  ///< ln(wcard - 1) T + h_b(T)
  bool holds;    ///< I <= bound + 1e-10
};

TInformationBound t_information_bound(const JointPMF& joint, std::size_t wcard);

/// I(floor(2^k X); {2^k X}) from the exact joint over cells. Requires k < resolution.
Nats int_frac_mutual_information(const GridDensity& f, int k);

}  // namespace entropylab
