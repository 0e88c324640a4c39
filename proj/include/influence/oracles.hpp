#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "influence/cascade.hpp"
#include "influence/graph.hpp"

namespace influence {

/// Raised when a brute-force enumeration would exceed its subset cap;
/// carries the offending count.
class EnumerationCapError : public std::runtime_error {
 public:
  EnumerationCapError(std::int64_t count, std::int64_t cap)
      : std::runtime_error("enumeration of " + std::to_string(count) +
                           " subsets exceeds cap " + std::to_string(cap)),
        count_(count) {}
  std::int64_t count() const { return count_; }

 private:
  std::int64_t count_;
};

struct OracleResult {
  std::vector<int> best_set;  // lexicographically smallest co-optimal set
  double best_value = 0.0;
  std::int64_t num_evaluated = 0;
  std::vector<std::vector<int>> ties;  // all co-optimal sets, incl. best_set
};

constexpr std::int64_t kDefaultEnumerationCap = 10'000'000;

/// Exhaustive maximum of reachable_count over all k-subsets of senders.
OracleResult brute_force_deterministic(const BipartiteGraph& g, int k,
                                       std::int64_t cap = kDefaultEnumerationCap);

/// Exhaustive maximum of expected_spread over all k-subsets.
OracleResult brute_force_cascade(const CascadeProblem& prob,
                                 std::int64_t cap = kDefaultEnumerationCap);

/// Greedy maximum-marginal-gain selection (lazy evaluation; ties broken by
/// lowest index; identical to naive greedy). Returns picks in pick order.
std::vector<int> greedy_deterministic(const BipartiteGraph& g, int k);
std::vector<int> greedy_cascade(const CascadeProblem& prob);

struct SpreadEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

/// Simulates arc realizations of the cascade and counts reached receivers.
SpreadEstimate monte_carlo_spread(const CascadeProblem& prob,
                                  std::span<const int> senders,
                                  std::int64_t trials, std::uint64_t seed);

}  // namespace influence
