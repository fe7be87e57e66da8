#include <cmath>
#include <random>

#include "nonlocal/derand.hpp"

namespace nonlocal {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Walker alias table; sampling is O(1) per draw and the table construction
// never leaves a bucket undefined even under roundoff.
struct AliasTable {
  std::vector<double> prob;
  std::vector<std::size_t> alias;
};

AliasTable build_alias(const std::vector<Rational>& weights) {
  const std::size_t n = weights.size();
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = to_double(weights[i]) * static_cast<double>(n);
  }
  AliasTable table{std::vector<double>(n, 1.0), std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) table.alias[i] = i;
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    large.pop_back();
    table.prob[s] = scaled[s];
    table.alias[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  // Leftovers are buckets whose residue is 1 up to roundoff.
  while (!small.empty()) {
    table.prob[small.back()] = 1.0;
    small.pop_back();
  }
  while (!large.empty()) {
    table.prob[large.back()] = 1.0;
    large.pop_back();
  }
  return table;
}

std::size_t draw(const AliasTable& table, std::mt19937_64& rng) {
  const std::size_t n = table.prob.size();
  std::size_t bucket = static_cast<std::size_t>(
      uniform01(rng) * static_cast<double>(n));
  if (bucket >= n) bucket = n - 1;
  return uniform01(rng) < table.prob[bucket] ? bucket : table.alias[bucket];
}

void check_answers(const std::vector<int>& answers, int questions, int limit,
                   const char* who) {
  if (static_cast<int>(answers.size()) != questions) {
    fail(ErrorCode::StrategyShapeMismatch,
         std::string(who) + " strategy has " +
             std::to_string(answers.size()) + " entries, expected " +
             std::to_string(questions));
  }
  for (int a : answers) {
    if (a < 0 || a >= limit) {
      fail(ErrorCode::StrategyShapeMismatch,
           std::string(who) + " answer " + std::to_string(a) +
               " out of range");
    }
  }
}

}  // namespace

void validate_family(const PublicCoinFamily& f) {
  if (f.strategies.empty() || f.strategies.size() != f.weights.size()) {
    fail(ErrorCode::InvalidArgument,
         "family needs matching, nonempty weights and strategies");
  }
  Rational total(0);
  for (const Rational& w : f.weights) {
    if (w < 0) fail(ErrorCode::NegativeProbability, "negative family weight");
    total += w;
  }
  if (total != 1) {
    fail(ErrorCode::NonNormalizedDistribution,
         "family weights must sum to one");
  }
  for (const DeterministicStrategy& s : f.strategies) {
    check_answers(s.alice, f.game.x_count(), f.game.a_count(), "alice");
    check_answers(s.bob, f.game.y_count(), f.game.b_count(), "bob");
  }
}

Rational input_error(const PublicCoinFamily& f, int x, int y) {
  Rational err(0);
  for (std::size_t r = 0; r < f.strategies.size(); ++r) {
    const DeterministicStrategy& s = f.strategies[r];
    if (!f.game.accepts(x, y, s.alice[static_cast<std::size_t>(x)],
                        s.bob[static_cast<std::size_t>(y)])) {
      err += f.weights[r];
    }
  }
  return err;
}

InputErrorReport max_input_error(const PublicCoinFamily& f) {
  validate_family(f);
  InputErrorReport report;
  report.error = Rational(0);
  for (int x = 0; x < f.game.x_count(); ++x)
    for (int y = 0; y < f.game.y_count(); ++y) {
      Rational err = input_error(f, x, y);
      if (err > report.error) {
        report.error = err;
        report.x = x;
        report.y = y;
      }
    }
  return report;
}

double hoeffding_tail(int t, double delta) {
  if (t < 1) fail(ErrorCode::InvalidArgument, "sample count must be >= 1");
  if (!(delta > 0)) {
    fail(ErrorCode::InvalidArgument, "deviation must be positive");
  }
  return 2.0 * std::exp(-2.0 * delta * delta * static_cast<double>(t));
}

NewmanResult newman_sample(const PublicCoinFamily& f, int t,
                           std::uint64_t seed, bool exhaustive) {
  validate_family(f);
  if (t < 1) fail(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const std::size_t n = f.strategies.size();

  std::vector<std::size_t> picks;
  picks.reserve(static_cast<std::size_t>(t));
  if (exhaustive) {
    if (static_cast<std::size_t>(t) != n) {
      fail(ErrorCode::InvalidArgument,
           "exhaustive mode needs exactly one sample per randomness value");
    }
    const Rational uniform = make_rational(1, static_cast<std::int64_t>(n));
    for (const Rational& w : f.weights) {
      if (w != uniform) {
        fail(ErrorCode::InvalidArgument,
             "exhaustive mode needs a uniform distribution");
      }
    }
    for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
  } else {
    AliasTable table = build_alias(f.weights);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < t; ++i) picks.push_back(draw(table, rng));
  }

  NewmanResult result{PublicCoinFamily{f.game, {}, {}}, 0};
  result.family.weights.assign(picks.size(), make_rational(1, t));
  result.family.strategies.reserve(picks.size());
  for (std::size_t pick : picks) {
    result.family.strategies.push_back(f.strategies[pick]);
  }
  while ((1 << result.randomness_bits) < t) ++result.randomness_bits;
  return result;
}

PublicCoinFamily chsh_coin_family() {
  // Four pairs, each losing exactly one input of the xor game, so the mixed
  // error is 1/4 on every input -- the classical value met simultaneously.
  PublicCoinFamily f{chsh_game(), {}, {}};
  f.strategies = {
      DeterministicStrategy{{0, 0}, {0, 0}},  // loses only (1, 1)
      DeterministicStrategy{{0, 1}, {0, 0}},  // loses only (1, 0)
      DeterministicStrategy{{0, 0}, {0, 1}},  // loses only (0, 1)
      DeterministicStrategy{{1, 0}, {0, 1}},  // loses only (0, 0)
  };
  f.weights.assign(4, make_rational(1, 4));
  return f;
}

PublicCoinFamily magic_square_coin_family() {
  // Each pair fills the grid from an all-zero matrix except that row 0 holds
  // ones at the two non-defect columns; Bob flips the defect cell to reach
  // odd column parity.  The pair then loses exactly the defect input, and
  // four distinct defects at uniform weight give worst-case error 1/4.
  const int defects[4][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}};
  PublicCoinFamily f{magic_square_game(), {}, {}};
  for (const auto& defect : defects) {
    const int dr = defect[0], dc = defect[1];
    int grid[3][3] = {};
    for (int c = 0; c < 3; ++c) {
      if (c != dc) grid[0][c] = 1;
    }
    DeterministicStrategy s;
    for (int r = 0; r < 3; ++r) {
      s.alice.push_back(grid[r][0] | grid[r][1] << 1 | grid[r][2] << 2);
    }
    for (int c = 0; c < 3; ++c) {
      int column[3] = {grid[0][c], grid[1][c], grid[2][c]};
      if (c == dc) column[dr] ^= 1;  // odd parity at the cost of one cell
      s.bob.push_back(column[0] | column[1] << 1 | column[2] << 2);
    }
    f.strategies.push_back(std::move(s));
  }
  f.weights.assign(4, make_rational(1, 4));
  return f;
}

}  // namespace nonlocal
