#pragma once

#include <cstdint>
#include <vector>

#include "nonlocal/game.hpp"
#include "nonlocal/strategy.hpp"

namespace nonlocal {

// Shared-randomness strategy family for a game relation: the parties play
// the r-th deterministic pair with probability weights[r].  Whether a pair
// loses an input is exact, so per-input error probabilities are rational.
struct PublicCoinFamily {
  Game game;
  std::vector<Rational> weights;
  std::vector<DeterministicStrategy> strategies;
};

// Shape checks: matching nonempty weights/strategies, weights a distribution,
// answer tables shaped for the game.  Throws InvalidArgument and friends.
void validate_family(const PublicCoinFamily& f);

// Probability that the family loses the fixed input pair (x, y), exact.
Rational input_error(const PublicCoinFamily& f, int x, int y);

struct InputErrorReport {
  Rational error;  // largest per-input losing probability
  int x = 0;       // earliest input pair attaining it
  int y = 0;
};

InputErrorReport max_input_error(const PublicCoinFamily& f);

// Tail bound 2 exp(-2 delta^2 t) on a mean of t bounded samples deviating by
// more than delta.  Requires t >= 1, delta > 0.
double hoeffding_tail(int t, double delta);

struct NewmanResult {
  PublicCoinFamily family;  // uniform mixture over the t draws
  int randomness_bits = 0;  // ceil(log2 t) shared bits for the new family
};

// Randomness reduction by sampling: draws t strategies i.i.d. from the
// family's distribution (alias method on a seeded mt19937_64) and mixes the
// draws uniformly.  With exhaustive = true sampling is replaced by the full
// randomness set in order, which requires a uniform distribution and
// t == |R| and reproduces the family's per-input errors exactly.
NewmanResult newman_sample(const PublicCoinFamily& f, int t,
                           std::uint64_t seed, bool exhaustive = false);

// Verification families that meet the classical value on every input
// simultaneously: four uniformly mixed deterministic pairs whose worst-case
// input error is exactly 1/4.
PublicCoinFamily chsh_coin_family();
PublicCoinFamily magic_square_coin_family();

}  // namespace nonlocal
