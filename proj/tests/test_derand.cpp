#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <optional>

#include "nonlocal/derand.hpp"

using namespace nonlocal;

namespace {

std::optional<ErrorCode> thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("hoeffding tail matches the closed form") {
  CHECK(hoeffding_tail(100, 0.1) ==
        doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(hoeffding_tail(1, 1.0) ==
        doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(hoeffding_tail(100, 1e-9) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(thrown_code([] { hoeffding_tail(0, 0.1); }) ==
        ErrorCode::InvalidArgument);
  CHECK(thrown_code([] { hoeffding_tail(10, 0.0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("xor-game family meets the classical value on every input") {
  PublicCoinFamily f = chsh_coin_family();
  validate_family(f);
  const Rational quarter = make_rational(1, 4);
  for (const DeterministicStrategy& s : f.strategies) {
    CHECK(evaluate_deterministic(f.game, s) == make_rational(3, 4));
  }
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) CHECK(input_error(f, x, y) == quarter);
  InputErrorReport report = max_input_error(f);
  CHECK(report.error == quarter);
  CHECK(report.x == 0);
  CHECK(report.y == 0);
}

TEST_CASE("parity-grid family loses only its four defect cells") {
  PublicCoinFamily f = magic_square_coin_family();
  validate_family(f);
  for (const DeterministicStrategy& s : f.strategies) {
    CHECK(evaluate_deterministic(f.game, s) == make_rational(8, 9));
  }
  const Rational quarter = make_rational(1, 4);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      const bool defect = (x == 0 && y == 0) || (x == 1 && y == 1) ||
                          (x == 2 && y == 2) || (x == 0 && y == 1);
      CHECK(input_error(f, x, y) == (defect ? quarter : Rational(0)));
    }
  CHECK(max_input_error(f).error == quarter);
}

TEST_CASE("sampling a single-strategy family changes nothing") {
  PublicCoinFamily f = chsh_coin_family();
  f.strategies.resize(1);
  f.weights = {Rational(1)};
  NewmanResult reduced = newman_sample(f, 7, 42);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      CHECK(input_error(reduced.family, x, y) == input_error(f, x, y));
    }
  CHECK(reduced.randomness_bits == 3);
}

TEST_CASE("exhaustive mode reproduces the family exactly") {
  PublicCoinFamily f = chsh_coin_family();
  NewmanResult reduced = newman_sample(f, 4, 1, /*exhaustive=*/true);
  REQUIRE(reduced.family.strategies.size() == 4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      CHECK(input_error(reduced.family, x, y) == input_error(f, x, y));
    }
  CHECK(reduced.randomness_bits == 2);

  CHECK(thrown_code([&] { newman_sample(f, 3, 1, true); }) ==
        ErrorCode::InvalidArgument);
  PublicCoinFamily skewed = chsh_coin_family();
  skewed.weights = {make_rational(1, 2), make_rational(1, 6),
                    make_rational(1, 6), make_rational(1, 6)};
  CHECK(thrown_code([&] { newman_sample(skewed, 4, 1, true); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("sampling is seed-deterministic and follows the distribution") {
  PublicCoinFamily f = chsh_coin_family();
  f.weights = {make_rational(9, 10), make_rational(1, 30),
               make_rational(1, 30), make_rational(1, 30)};
  NewmanResult a = newman_sample(f, 5000, 2024);
  NewmanResult b = newman_sample(f, 5000, 2024);
  int heavy = 0;
  for (std::size_t i = 0; i < a.family.strategies.size(); ++i) {
    CHECK(a.family.strategies[i].alice == b.family.strategies[i].alice);
    CHECK(a.family.strategies[i].bob == b.family.strategies[i].bob);
    if (a.family.strategies[i].alice == f.strategies[0].alice &&
        a.family.strategies[i].bob == f.strategies[0].bob) {
      ++heavy;
    }
  }
  // The 9/10-weight strategy should dominate the sample.
  CHECK(heavy > 4300);
  CHECK(heavy < 4700);
}

TEST_CASE("randomness accounting rounds the bit count up") {
  PublicCoinFamily f = chsh_coin_family();
  CHECK(newman_sample(f, 1, 0).randomness_bits == 0);
  CHECK(newman_sample(f, 2, 0).randomness_bits == 1);
  CHECK(newman_sample(f, 5, 0).randomness_bits == 3);
  CHECK(newman_sample(f, 1158, 0).randomness_bits == 11);
}

TEST_CASE("sampled families stay within epsilon plus delta: tail accounting") {
  PublicCoinFamily f = magic_square_coin_family();
  const double delta = 0.05;
  const int inputs = f.game.x_count() * f.game.y_count();
  const int t = 2 * static_cast<int>(std::ceil(
                        std::log(2.0 * inputs) / (2.0 * delta * delta)));
  CHECK(t == 1158);

  const Rational epsilon = max_input_error(f).error;
  const Rational threshold = epsilon + make_rational(1, 20);  // + delta
  const int draws = 200;
  int exceeded = 0;
  for (int i = 0; i < draws; ++i) {
    NewmanResult reduced =
        newman_sample(f, t, 20240601ull + static_cast<std::uint64_t>(i));
    CHECK(reduced.randomness_bits == 11);
    if (max_input_error(reduced.family).error > threshold) ++exceeded;
  }
  const double bound = inputs * hoeffding_tail(t, delta) + 0.05;
  CHECK(static_cast<double>(exceeded) / draws < bound);
}

TEST_CASE("family validation rejects malformed inputs") {
  PublicCoinFamily f = chsh_coin_family();
  f.weights[0] = make_rational(1, 2);
  CHECK(thrown_code([&] { validate_family(f); }) ==
        ErrorCode::NonNormalizedDistribution);

  PublicCoinFamily g = chsh_coin_family();
  g.strategies[2].bob = {0, 5};
  CHECK(thrown_code([&] { validate_family(g); }) ==
        ErrorCode::StrategyShapeMismatch);

  PublicCoinFamily h = chsh_coin_family();
  h.strategies.pop_back();
  CHECK(thrown_code([&] { validate_family(h); }) ==
        ErrorCode::InvalidArgument);

  PublicCoinFamily k = chsh_coin_family();
  k.weights[0] = make_rational(-1, 4);
  k.weights[1] = make_rational(3, 4);
  CHECK(thrown_code([&] { validate_family(k); }) ==
        ErrorCode::NegativeProbability);
}
