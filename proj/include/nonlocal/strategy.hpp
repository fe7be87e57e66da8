#pragma once

#include <cstdint>
#include <vector>

#include "nonlocal/game.hpp"

namespace nonlocal {

// Ceiling on |A|^|X| * |B|^|Y| before exact enumeration refuses to run.
inline constexpr std::uint64_t kDefaultEnumBudget = 4'000'000'000'000ull;

// Local deterministic answer functions: alice[x] and bob[y] are answer
// indices.
struct DeterministicStrategy {
  std::vector<int> alice;
  std::vector<int> bob;
};

// Exact winning probability of a deterministic strategy pair.
Rational evaluate_deterministic(const Game& g, const DeterministicStrategy& s);

// Shared-randomness strategy: play strategies[i] with probability weights[i].
struct StrategyMixture {
  std::vector<Rational> weights;
  std::vector<DeterministicStrategy> strategies;
};

// Exact value of a mixture; by linearity this never exceeds the best
// deterministic value, which is why deterministic enumeration computes the
// classical value.
Rational evaluate_mixture(const Game& g, const StrategyMixture& mix);

struct ClassicalValueResult {
  Rational value;
  DeterministicStrategy witness;
};

// Exact classical value.  Enumerates Bob's answer functions (digit y of the
// strategy index is bob[y], least significant first) and collapses Alice
// analytically: for each x her best answer against the fixed Bob function.
// Deterministic regardless of how the scan is partitioned across workers:
// ties are broken toward the lowest Bob strategy index, and within a
// question toward the lowest answer index.
ClassicalValueResult classical_value_exact(
    const Game& g, std::uint64_t enum_budget = kDefaultEnumBudget);

struct BestResponseResult {
  Rational value;
  DeterministicStrategy strategy;
  int rounds = 0;
  bool converged = false;
};

// Alternating best-response ascent from a given start (or from a seeded
// uniformly random strategy).  The value never decreases from round to
// round; stops at a fixed point or after max_rounds.
BestResponseResult classical_value_best_response(const Game& g,
                                                 DeterministicStrategy init,
                                                 int max_rounds = 64);
BestResponseResult classical_value_best_response(const Game& g,
                                                 std::uint64_t seed,
                                                 int max_rounds = 64);

}  // namespace nonlocal
