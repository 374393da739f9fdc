#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "entropylab/inequality.hpp"

namespace entropylab {

enum class Side { discrete, continuous };

Side parse_side(const std::string& s);
const char* to_string(Side side);

struct SearchConfig {
  Side side = Side::discrete;
  std::uint64_t seed = 1;
  std::size_t restarts = 20;
  std::size_t iterations = 250;  ///< local moves per restart
  std::size_t max_support = 8;   ///< atoms (discrete) or occupied cells (continuous)
  int resolution = 4;            ///< continuous candidates live on the 2^-resolution grid
  std::size_t threads = 0;       ///< 0: ENTROPYLAB_THREADS or hardware concurrency
};

struct TraceEntry {
  std::size_t iteration;
  std::string move;
  double objective;
};

/// Best candidate of a search. Exactly one of the witness maps is filled,
/// keyed by the first member of each iid class.
struct SearchResult {
  DiscreteAssignment discrete_witness;
  ContinuousAssignment continuous_witness;
  double objective = 0.0;
  std::size_t restart = 0;
  std::vector<TraceEntry> trace;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;
};

/// Maximizes the weighted sum of `spec` (a positive value is a violation)
/// by random restarts and local moves on the probability simplex.
/// Deterministic given config.seed, independent of thread scheduling.
SearchResult search_violation(const InequalitySpec& spec, const SearchConfig& config);

/// Empirical inf and sup of num/den over searched distributions.
struct RatioBracket {
  SearchResult inf;  ///< objective is the smallest ratio found
  SearchResult sup;  ///< objective is the largest ratio found
  double visited_min = 0.0;
  double visited_max = 0.0;
  std::size_t visited = 0;
  std::size_t rejected = 0;  ///< candidates with |den| < 1e-6
};

inline constexpr double kDegenerateDenominator = 1e-6;

/// Searches num/den in both directions. Candidates with |den| below
/// kDegenerateDenominator are rejected; throws if every candidate is.
RatioBracket extremal_ratio(const InequalitySpec& num, const InequalitySpec& den,
                            const SearchConfig& config);

/// Threads used for restarts: config.threads, else ENTROPYLAB_THREADS, else
/// the hardware concurrency; never more than the number of restarts.
std::size_t worker_count(const SearchConfig& config);

}  // namespace entropylab
