#include "nonlocal/strategy.hpp"

#include <mutex>
#include <random>

#include "nonlocal/parallel.hpp"

namespace nonlocal {
namespace {

void check_shape(const Game& g, const DeterministicStrategy& s) {
  if (s.alice.size() != static_cast<std::size_t>(g.x_count()) ||
      s.bob.size() != static_cast<std::size_t>(g.y_count())) {
    fail(ErrorCode::StrategyShapeMismatch,
         "strategy must assign one answer per question");
  }
  for (int a : s.alice) {
    if (a < 0 || a >= g.a_count()) {
      fail(ErrorCode::StrategyShapeMismatch, "alice answer index out of range");
    }
  }
  for (int b : s.bob) {
    if (b < 0 || b >= g.b_count()) {
      fail(ErrorCode::StrategyShapeMismatch, "bob answer index out of range");
    }
  }
}

// Decodes digit y (least significant first) of a Bob strategy index.
int bob_digit(std::uint64_t index, int y, int radix) {
  for (int i = 0; i < y; ++i) index /= static_cast<unsigned>(radix);
  return static_cast<int>(index % static_cast<unsigned>(radix));
}

struct ScanBest {
  bool any = false;
  Rational value;
  std::uint64_t bob_index = 0;
  DeterministicStrategy witness;
};

// Alice's best response to a fixed Bob answer function, with the collapsed
// value Sum_x max_a Sum_y P(x,y) V(x,y,a,b(y)).  Lowest answer index wins
// ties.
ScanBest collapse_alice(const Game& g, std::uint64_t bob_index,
                        const std::vector<int>& bob) {
  ScanBest out;
  out.any = true;
  out.bob_index = bob_index;
  out.witness.bob = bob;
  out.witness.alice.resize(static_cast<std::size_t>(g.x_count()));
  out.value = 0;
  for (int x = 0; x < g.x_count(); ++x) {
    Rational best;
    int best_a = 0;
    for (int a = 0; a < g.a_count(); ++a) {
      Rational s = 0;
      for (int y = 0; y < g.y_count(); ++y) {
        if (g.prob(x, y) == 0) continue;
        if (g.accepts(x, y, a, bob[static_cast<std::size_t>(y)])) {
          s += g.prob(x, y);
        }
      }
      if (a == 0 || s > best) {
        best = std::move(s);
        best_a = a;
      }
    }
    out.witness.alice[static_cast<std::size_t>(x)] = best_a;
    out.value += best;
  }
  return out;
}

// Merge preferring higher value, then lower Bob index; associative and
// commutative, so the parallel reduction is order-independent.
void merge_best(ScanBest& into, ScanBest&& other) {
  if (!other.any) return;
  if (!into.any || other.value > into.value ||
      (other.value == into.value && other.bob_index < into.bob_index)) {
    into = std::move(other);
  }
}

}  // namespace

Rational evaluate_deterministic(const Game& g, const DeterministicStrategy& s) {
  check_shape(g, s);
  Rational value = 0;
  for (int x = 0; x < g.x_count(); ++x)
    for (int y = 0; y < g.y_count(); ++y) {
      const Rational& p = g.prob(x, y);
      if (p == 0) continue;
      if (g.accepts(x, y, s.alice[static_cast<std::size_t>(x)],
                    s.bob[static_cast<std::size_t>(y)])) {
        value += p;
      }
    }
  return value;
}

Rational evaluate_mixture(const Game& g, const StrategyMixture& mix) {
  if (mix.weights.size() != mix.strategies.size()) {
    fail(ErrorCode::StrategyShapeMismatch,
         "mixture needs one weight per strategy");
  }
  Rational total = 0;
  for (const Rational& w : mix.weights) {
    if (w < 0) fail(ErrorCode::NegativeProbability, "negative mixture weight");
    total += w;
  }
  if (total != 1) {
    fail(ErrorCode::NonNormalizedMixture,
         "mixture weights sum to " + to_string(total));
  }
  Rational value = 0;
  for (std::size_t i = 0; i < mix.strategies.size(); ++i) {
    if (mix.weights[i] == 0) continue;
    value += mix.weights[i] * evaluate_deterministic(g, mix.strategies[i]);
  }
  return value;
}

ClassicalValueResult classical_value_exact(const Game& g,
                                           std::uint64_t enum_budget) {
  BigInt space = 1;
  for (int i = 0; i < g.x_count(); ++i) space *= g.a_count();
  for (int i = 0; i < g.y_count(); ++i) space *= g.b_count();
  if (space > BigInt(enum_budget)) {
    fail(ErrorCode::EnumerationBudgetExceeded,
         "strategy space has " + space.str() + " pairs, budget is " +
             std::to_string(enum_budget));
  }

  std::uint64_t bob_count = 1;
  for (int i = 0; i < g.y_count(); ++i) {
    bob_count *= static_cast<unsigned>(g.b_count());
  }

  ScanBest best;
  std::mutex merge_lock;
  parallel_chunks(bob_count, [&](std::size_t, std::size_t begin,
                                 std::size_t end) {
    ScanBest local;
    std::vector<int> bob(static_cast<std::size_t>(g.y_count()));
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      for (int y = 0; y < g.y_count(); ++y) {
        bob[static_cast<std::size_t>(y)] = bob_digit(idx, y, g.b_count());
      }
      merge_best(local, collapse_alice(g, idx, bob));
    }
    std::lock_guard<std::mutex> hold(merge_lock);
    merge_best(best, std::move(local));
  });
  return {best.value, best.witness};
}

namespace {

std::vector<int> alice_best_response(const Game& g, const std::vector<int>& bob) {
  return collapse_alice(g, 0, bob).witness.alice;
}

std::vector<int> bob_best_response(const Game& g, const std::vector<int>& alice) {
  std::vector<int> bob(static_cast<std::size_t>(g.y_count()));
  for (int y = 0; y < g.y_count(); ++y) {
    Rational best;
    int best_b = 0;
    for (int b = 0; b < g.b_count(); ++b) {
      Rational s = 0;
      for (int x = 0; x < g.x_count(); ++x) {
        if (g.prob(x, y) == 0) continue;
        if (g.accepts(x, y, alice[static_cast<std::size_t>(x)], b)) {
          s += g.prob(x, y);
        }
      }
      if (b == 0 || s > best) {
        best = std::move(s);
        best_b = b;
      }
    }
    bob[static_cast<std::size_t>(y)] = best_b;
  }
  return bob;
}

}  // namespace

BestResponseResult classical_value_best_response(const Game& g,
                                                 DeterministicStrategy init,
                                                 int max_rounds) {
  check_shape(g, init);
  BestResponseResult out;
  out.strategy = std::move(init);
  out.value = evaluate_deterministic(g, out.strategy);
  for (int round = 0; round < max_rounds; ++round) {
    DeterministicStrategy next;
    next.alice = alice_best_response(g, out.strategy.bob);
    next.bob = bob_best_response(g, next.alice);
    Rational value = evaluate_deterministic(g, next);
    bool fixed =
        next.alice == out.strategy.alice && next.bob == out.strategy.bob;
    out.strategy = std::move(next);
    out.value = std::move(value);
    out.rounds = round + 1;
    if (fixed) {
      out.converged = true;
      break;
    }
  }
  return out;
}

BestResponseResult classical_value_best_response(const Game& g,
                                                 std::uint64_t seed,
                                                 int max_rounds) {
  std::mt19937_64 rng(seed);
  DeterministicStrategy init;
  init.alice.resize(static_cast<std::size_t>(g.x_count()));
  init.bob.resize(static_cast<std::size_t>(g.y_count()));
  for (int& a : init.alice) {
    a = static_cast<int>(rng() % static_cast<unsigned>(g.a_count()));
  }
  for (int& b : init.bob) {
    b = static_cast<int>(rng() % static_cast<unsigned>(g.b_count()));
  }
  return classical_value_best_response(g, std::move(init), max_rounds);
}

}  // namespace nonlocal
