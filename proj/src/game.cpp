#include "nonlocal/game.hpp"

#include <bit>
#include <cstddef>

namespace nonlocal {
namespace {

std::string bit_label(int value, int bits) {
  std::string label(static_cast<std::size_t>(bits), '0');
  for (int j = 0; j < bits; ++j) {
    if ((value >> j) & 1) label[static_cast<std::size_t>(j)] = '1';
  }
  return label;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

int parity(unsigned v) { return std::popcount(v) & 1; }

}  // namespace

std::vector<ValidationIssue> validate(const GameData& data) {
  std::vector<ValidationIssue> issues;
  if (data.questions_a.empty() || data.questions_b.empty() ||
      data.answers_a.empty() || data.answers_b.empty()) {
    issues.push_back({ErrorCode::ShapeMismatch,
                      "question and answer sets must be nonempty"});
    return issues;
  }
  std::size_t nx = data.questions_a.size();
  std::size_t ny = data.questions_b.size();
  std::size_t na = data.answers_a.size();
  std::size_t nb = data.answers_b.size();
  if (data.distribution.size() != nx * ny) {
    issues.push_back({ErrorCode::ShapeMismatch,
                      "distribution has " +
                          std::to_string(data.distribution.size()) +
                          " entries, expected " + std::to_string(nx * ny)});
  }
  if (data.predicate.size() != nx * ny * na * nb) {
    issues.push_back({ErrorCode::IncompletePredicate,
                      "predicate has " + std::to_string(data.predicate.size()) +
                          " entries, expected " +
                          std::to_string(nx * ny * na * nb)});
  }
  if (!issues.empty()) return issues;

  for (std::size_t i = 0; i < data.distribution.size(); ++i) {
    if (data.distribution[i] < 0) {
      issues.push_back({ErrorCode::NegativeProbability,
                        "distribution entry " + std::to_string(i) + " is " +
                            to_string(data.distribution[i])});
      break;
    }
  }
  Rational sum = 0;
  for (const Rational& p : data.distribution) sum += p;
  if (sum != 1) {
    issues.push_back({ErrorCode::NonNormalizedDistribution,
                      "distribution sums to " + to_string(sum)});
  }
  for (std::size_t i = 0; i < data.predicate.size(); ++i) {
    if (data.predicate[i] > 1) {
      issues.push_back({ErrorCode::IncompletePredicate,
                        "predicate entry " + std::to_string(i) +
                            " must be 0 or 1"});
      break;
    }
  }
  return issues;
}

Game Game::make(GameData data) {
  auto issues = validate(data);
  if (!issues.empty()) fail(issues.front().code, issues.front().detail);
  return Game(std::move(data));
}

std::vector<ValidationIssue> validate(const Game& g) { return validate(g.data()); }

Game chsh_game() {
  GameData d;
  d.questions_a = d.questions_b = {"0", "1"};
  d.answers_a = d.answers_b = {"0", "1"};
  d.distribution.assign(4, make_rational(1, 4));
  d.predicate.assign(16, 0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          d.predicate[static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b)] =
              ((a ^ b) == (x & y)) ? 1 : 0;
  return Game::make(std::move(d));
}

Game magic_square_game() {
  // Alice fills row x, Bob fills column y; answers are bit triples where
  // label character j is entry j of the line.  Win: Alice's row has even
  // parity, Bob's column has odd parity, and they agree on the shared cell
  // (Alice's entry y against Bob's entry x).
  GameData d;
  d.questions_a = d.questions_b = {"1", "2", "3"};
  for (int a = 0; a < 8; ++a) d.answers_a.push_back(bit_label(a, 3));
  d.answers_b = d.answers_a;
  d.distribution.assign(9, make_rational(1, 9));
  d.predicate.assign(9 * 64, 0);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
          bool win = parity(static_cast<unsigned>(a)) == 0 &&
                     parity(static_cast<unsigned>(b)) == 1 &&
                     ((a >> y) & 1) == ((b >> x) & 1);
          d.predicate[static_cast<std::size_t>(((x * 3 + y) * 8 + a) * 8 + b)] =
              win ? 1 : 0;
        }
  return Game::make(std::move(d));
}

Game nonlocal_dj_game(int n) {
  if (!is_power_of_two(n) || n < 2 || n > 8) {
    fail(ErrorCode::InvalidSizeParameter,
         "nonlocal-dj size must be 2, 4 or 8, got " + std::to_string(n));
  }
  int m = log2_exact(n);
  int inputs = 1 << n;
  int answers = 1 << m;
  GameData d;
  for (int x = 0; x < inputs; ++x) d.questions_a.push_back(bit_label(x, n));
  d.questions_b = d.questions_a;
  for (int a = 0; a < answers; ++a) d.answers_a.push_back(bit_label(a, m));
  d.answers_b = d.answers_a;

  // Uniform over the promise pairs: x = y or Hamming distance exactly n/2.
  std::vector<std::pair<int, int>> support;
  for (int x = 0; x < inputs; ++x)
    for (int y = 0; y < inputs; ++y) {
      int dist = std::popcount(static_cast<unsigned>(x ^ y));
      if (x == y || dist == n / 2) support.emplace_back(x, y);
    }
  d.distribution.assign(static_cast<std::size_t>(inputs) * inputs, Rational(0));
  Rational w = make_rational(1, static_cast<std::int64_t>(support.size()));
  for (auto [x, y] : support)
    d.distribution[static_cast<std::size_t>(x) * inputs + y] = w;

  d.predicate.assign(static_cast<std::size_t>(inputs) * inputs * answers *
                         answers,
                     1);
  for (int x = 0; x < inputs; ++x)
    for (int y = 0; y < inputs; ++y) {
      int dist = std::popcount(static_cast<unsigned>(x ^ y));
      bool equal = x == y;
      if (!equal && dist != n / 2) continue;  // off-promise stays accepting
      for (int a = 0; a < answers; ++a)
        for (int b = 0; b < answers; ++b) {
          bool win = equal ? (a == b) : (a != b);
          std::size_t idx =
              ((static_cast<std::size_t>(x) * inputs + y) * answers + a) *
                  answers +
              b;
          d.predicate[idx] = win ? 1 : 0;
        }
    }
  return Game::make(std::move(d));
}

std::vector<std::vector<std::pair<int, int>>> perfect_matchings(int n) {
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> current;
  std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
  auto recurse = [&](auto&& self) -> void {
    int first = 0;
    for (int i = 1; i <= n; ++i) {
      if (!used[static_cast<std::size_t>(i)]) {
        first = i;
        break;
      }
    }
    if (first == 0) {
      out.push_back(current);
      return;
    }
    used[static_cast<std::size_t>(first)] = true;
    for (int j = first + 1; j <= n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      used[static_cast<std::size_t>(j)] = true;
      current.emplace_back(first, j);
      self(self);
      current.pop_back();
      used[static_cast<std::size_t>(j)] = false;
    }
    used[static_cast<std::size_t>(first)] = false;
  };
  recurse(recurse);
  return out;
}

Game hidden_matching_game(int n) {
  if (!is_power_of_two(n) || n < 2 || n > 8) {
    fail(ErrorCode::InvalidSizeParameter,
         "hidden-matching size must be 2, 4 or 8, got " + std::to_string(n));
  }
  int m = log2_exact(n);
  int inputs = 1 << n;
  auto matchings = perfect_matchings(n);
  int pairs = n / 2;
  int strings = 1 << m;  // = n

  GameData d;
  for (int x = 0; x < inputs; ++x) d.questions_a.push_back(bit_label(x, n));
  for (const auto& matching : matchings) {
    std::string label;
    for (auto [i, j] : matching) {
      label += "(" + std::to_string(i) + "," + std::to_string(j) + ")";
    }
    d.questions_b.push_back(label);
  }
  for (int k = 0; k < strings; ++k) d.answers_a.push_back(bit_label(k, m));
  // Bob's answer index is slot * n + l: a pair slot of his matching plus an
  // m-bit string l.  The pair meant by a slot depends on his question.
  for (int slot = 0; slot < pairs; ++slot)
    for (int l = 0; l < strings; ++l)
      d.answers_b.push_back("slot" + std::to_string(slot) + "," +
                            bit_label(l, m));

  std::size_t ny = matchings.size();
  d.distribution.assign(static_cast<std::size_t>(inputs) * ny,
                        make_rational(1, static_cast<std::int64_t>(
                                             static_cast<std::size_t>(inputs) *
                                             ny)));
  std::size_t nb = static_cast<std::size_t>(pairs) * strings;
  d.predicate.assign(static_cast<std::size_t>(inputs) * ny * strings * nb, 0);
  for (int x = 0; x < inputs; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      for (int k = 0; k < strings; ++k)
        for (int slot = 0; slot < pairs; ++slot)
          for (int l = 0; l < strings; ++l) {
            auto [i, j] = matchings[y][static_cast<std::size_t>(slot)];
            int diff = (i - 1) ^ (j - 1);
            int lhs = parity(static_cast<unsigned>(diff & (k ^ l)));
            int rhs = ((x >> (i - 1)) & 1) ^ ((x >> (j - 1)) & 1);
            std::size_t idx =
                ((static_cast<std::size_t>(x) * ny + y) * strings + k) * nb +
                static_cast<std::size_t>(slot) * strings + l;
            d.predicate[idx] = (lhs == rhs) ? 1 : 0;
          }
  return Game::make(std::move(d));
}

Game builtin_game(const std::string& spec) {
  std::string name = spec;
  int size = 0;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    try {
      size = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidSizeParameter,
           "bad size parameter in '" + spec + "'");
    }
  }
  if (name == "chsh") return chsh_game();
  if (name == "magic-square") return magic_square_game();
  if (name == "nonlocal-dj") return nonlocal_dj_game(size == 0 ? 4 : size);
  if (name == "hidden-matching")
    return hidden_matching_game(size == 0 ? 4 : size);
  fail(ErrorCode::UnknownGame, "no built-in game named '" + name + "'");
}

namespace {

// Decodes tuple digit `copy` (first copy most significant) of `index` over
// `copies` digits in base `radix`.
int tuple_digit(std::uint64_t index, int copy, int copies, int radix) {
  for (int i = copies - 1; i > copy; --i) index /= static_cast<unsigned>(radix);
  return static_cast<int>(index % static_cast<unsigned>(radix));
}

std::vector<std::string> tuple_labels(const std::vector<std::string>& base,
                                      int copies) {
  std::vector<std::string> out;
  std::uint64_t total = 1;
  for (int i = 0; i < copies; ++i) total *= base.size();
  out.reserve(total);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::string label;
    for (int c = 0; c < copies; ++c) {
      if (c) label += ",";
      label += base[static_cast<std::size_t>(
          tuple_digit(idx, c, copies, static_cast<int>(base.size())))];
    }
    out.push_back(std::move(label));
  }
  return out;
}

}  // namespace

Game parallel_repeat(const Game& g, int copies, std::uint64_t cell_budget) {
  if (copies < 1) {
    fail(ErrorCode::InvalidSizeParameter, "repetition count must be >= 1");
  }
  if (copies == 1) return g;

  BigInt cells = 1;
  for (int i = 0; i < copies; ++i) cells *= BigInt(g.cell_count());
  if (cells > BigInt(cell_budget)) {
    fail(ErrorCode::SizeBudgetExceeded,
         "repeated game needs " + cells.str() + " predicate cells, budget is " +
             std::to_string(cell_budget));
  }

  auto pow_int = [](int base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<unsigned>(base);
    return r;
  };
  std::uint64_t nx = pow_int(g.x_count(), copies);
  std::uint64_t ny = pow_int(g.y_count(), copies);
  std::uint64_t na = pow_int(g.a_count(), copies);
  std::uint64_t nb = pow_int(g.b_count(), copies);

  GameData d;
  d.questions_a = tuple_labels(g.data().questions_a, copies);
  d.questions_b = tuple_labels(g.data().questions_b, copies);
  d.answers_a = tuple_labels(g.data().answers_a, copies);
  d.answers_b = tuple_labels(g.data().answers_b, copies);

  d.distribution.reserve(nx * ny);
  for (std::uint64_t x = 0; x < nx; ++x)
    for (std::uint64_t y = 0; y < ny; ++y) {
      Rational p = 1;
      for (int c = 0; c < copies; ++c) {
        p *= g.prob(tuple_digit(x, c, copies, g.x_count()),
                    tuple_digit(y, c, copies, g.y_count()));
      }
      d.distribution.push_back(std::move(p));
    }

  d.predicate.assign(nx * ny * na * nb, 0);
  std::size_t idx = 0;
  for (std::uint64_t x = 0; x < nx; ++x)
    for (std::uint64_t y = 0; y < ny; ++y)
      for (std::uint64_t a = 0; a < na; ++a)
        for (std::uint64_t b = 0; b < nb; ++b) {
          bool win = true;
          for (int c = 0; c < copies && win; ++c) {
            win = g.accepts(tuple_digit(x, c, copies, g.x_count()),
                            tuple_digit(y, c, copies, g.y_count()),
                            tuple_digit(a, c, copies, g.a_count()),
                            tuple_digit(b, c, copies, g.b_count()));
          }
          d.predicate[idx++] = win ? 1 : 0;
        }
  return Game::make(std::move(d));
}

}  // namespace nonlocal
