#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "entropylab/grid_density.hpp"
#include "entropylab/lattice_pmf.hpp"
#include "entropylab/nats.hpp"

namespace entropylab {

inline constexpr double kDiscreteTolerance = 1e-9;
inline constexpr double kContinuousTolerance = 1e-6;
inline constexpr double kBalanceTolerance = 1e-12;

/// One weighted entropy term alpha * H(sum_j coeffs[j] Z_j).
struct EntropyRow {
  double alpha = 0.0;
  std::vector<std::int64_t> coeffs;
};

/// A linear entropy inequality sum_i alpha_i H(sum_j a_ij Z_j) <= 0.
///
/// Variables in one iid class share a distribution; every variable belongs
/// to exactly one class (singletons unless declared otherwise).
struct InequalitySpec {
  std::vector<std::string> variables;
  std::vector<EntropyRow> rows;
  std::vector<std::vector<std::size_t>> iid_classes;

  std::size_t index_of(std::string_view name) const;
  std::size_t class_of(std::size_t variable) const;
};

/// Parses `term (('+'|'-') term)* '<=' '0'` with an optional `iid:` line.
/// Rows are divided by the gcd of their coefficients. Throws ParseError.
InequalitySpec parse_spec(std::string_view text);

/// Same grammar without the trailing relation, for ratio numerators and
/// denominators.
InequalitySpec parse_form(std::string_view text);

/// Builds a spec from rows directly (variables default to singleton classes).
InequalitySpec make_spec(std::vector<std::string> variables, std::vector<EntropyRow> rows,
                         std::vector<std::vector<std::string>> iid = {});

bool is_balanced(const InequalitySpec& spec);

/// Canonical one-line text of the spec that parses back to the same spec.
std::string to_string(const InequalitySpec& spec);

struct EvalReport {
  std::vector<Nats> row_entropies;
  Nats weighted_sum;
  double slack = 0.0;
  double tolerance = 0.0;
  bool satisfied = false;
  std::vector<std::string> warnings;
};

/// Variable name to distribution; exactly one member of each iid class is
/// assigned and stands for the whole class.
using DiscreteAssignment = std::map<std::string, LatticePMF>;
using ContinuousAssignment = std::map<std::string, GridDensity>;

EvalReport evaluate_discrete(const InequalitySpec& spec, const DiscreteAssignment& assignment);
EvalReport evaluate_continuous(const InequalitySpec& spec, const ContinuousAssignment& assignment);

/// Built-in specs over variables X, Y (or U, U' for iid ones).
namespace builtin {

/// H(X+Y) - 3 H(X-Y) + H(X) + H(Y) <= 0.
InequalitySpec sum_difference();
/// H(X+Y) - H(X) - H(Y) <= 0.
InequalitySpec subadditivity();
/// H(X) - H(X+Y) <= 0 and H(Y) - H(X+Y) <= 0.
InequalitySpec sum_dominates_first();
InequalitySpec sum_dominates_second();
/// H(pX+qY) - H(X+Y) <= c (2H(X+Y) - H(X) - H(Y)) with
/// c = 7 floor(log_b |p|) + 7 floor(log_b |q|) + 2.
InequalitySpec dilation(std::int64_t p, std::int64_t q, double log_base);
std::int64_t dilation_constant(std::int64_t p, std::int64_t q, double log_base);
/// Lower and upper doubling bounds for iid U, U':
/// H(U+U') - 2 H(U-U') + H(U) <= 0 and H(U-U') - 2 H(U+U') + H(U) <= 0.
InequalitySpec doubling_lower();
InequalitySpec doubling_upper();
/// H(U-U') - H(U) and H(U+U') - H(U) as forms for the doubling ratio.
InequalitySpec doubling_numerator();
InequalitySpec doubling_denominator();

}  // namespace builtin

/// h(X+Y) - (h(X) + h(Y))/2 - (d/2) ln 2, nonnegative with equality for iid
/// Gaussians.
Nats epi_gap(const GridDensity& f, const GridDensity& g);

}  // namespace entropylab
