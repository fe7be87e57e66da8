#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal/error.hpp"
#include "nonlocal/rational.hpp"

namespace nonlocal {

// Hard ceiling on |X|*|Y|*|A|*|B| for constructed games, mainly relevant for
// parallel repetition where the table grows exponentially in the number of
// copies.
inline constexpr std::uint64_t kDefaultCellBudget = 100'000'000;

struct ValidationIssue {
  ErrorCode code;
  std::string detail;
};

// Raw tables of a finite two-player game with one referee round:
//   * question pair (x, y) drawn with probability distribution[x*|Y|+y],
//   * players answer (a, b) without communicating,
//   * they win iff predicate[((x*|Y|+y)*|A|+a)*|B|+b] is 1.
// Question/answer sets are given by their label arrays; indices into them are
// what every other function works with.
struct GameData {
  std::vector<std::string> questions_a;
  std::vector<std::string> questions_b;
  std::vector<std::string> answers_a;
  std::vector<std::string> answers_b;
  std::vector<Rational> distribution;
  std::vector<std::uint8_t> predicate;
};

// All invariant violations in `data`, empty when the tables form a valid
// game: dense tables of the right shape, probabilities nonnegative and
// summing to exactly 1, predicate entries 0/1.
std::vector<ValidationIssue> validate(const GameData& data);

// Immutable validated game.  Construction rejects invalid tables, so any
// Game in flight satisfies the invariants and is safe for concurrent reads.
class Game {
 public:
  static Game make(GameData data);

  int x_count() const { return static_cast<int>(data_.questions_a.size()); }
  int y_count() const { return static_cast<int>(data_.questions_b.size()); }
  int a_count() const { return static_cast<int>(data_.answers_a.size()); }
  int b_count() const { return static_cast<int>(data_.answers_b.size()); }

  const Rational& prob(int x, int y) const {
    return data_.distribution[static_cast<std::size_t>(x) * y_count() + y];
  }
  bool accepts(int x, int y, int a, int b) const {
    std::size_t idx =
        ((static_cast<std::size_t>(x) * y_count() + y) * a_count() + a);
    return data_.predicate[idx * b_count() + b] != 0;
  }

  std::uint64_t cell_count() const {
    return static_cast<std::uint64_t>(x_count()) * y_count() * a_count() *
           b_count();
  }

  const GameData& data() const { return data_; }

 private:
  explicit Game(GameData data) : data_(std::move(data)) {}
  GameData data_;
};

std::vector<ValidationIssue> validate(const Game& g);

// Built-in games.  The binary-string answer labels use the convention that
// label character j is bit j of the answer index.
Game chsh_game();
Game magic_square_game();

// Promise version of the Deutsch-Jozsa problem: x and y are n-bit strings
// that are either equal or at Hamming distance n/2, answers are log2(n)-bit
// strings, equal inputs demand equal answers and far inputs demand distinct
// ones.  Pairs outside the promise have probability 0 and count as wins.
Game nonlocal_dj_game(int n);

// Hidden-matching game: x is an n-bit string, Bob's question is a perfect
// matching M on {1..n}, Alice answers k, Bob answers a pair slot of M plus a
// string l, and they win iff (i xor j) . (k xor l) = x_i xor x_j for Bob's
// chosen pair (i, j) (indices encoded as log2(n)-bit strings of value-1).
Game hidden_matching_game(int n);

// Parses "chsh", "magic-square", "nonlocal-dj:<n>" or "hidden-matching:<n>".
Game builtin_game(const std::string& spec);

// All perfect matchings of {1..n} as sorted pair lists, in a fixed
// deterministic order (smallest unmatched element first).
std::vector<std::vector<std::pair<int, int>>> perfect_matchings(int n);

// n-fold parallel repetition: product questions and answers (first copy most
// significant in the index), product distribution, win iff every copy wins.
Game parallel_repeat(const Game& g, int copies,
                     std::uint64_t cell_budget = kDefaultCellBudget);

// JSON round trip.  Serialization emits only nonzero distribution entries
// ([x, y, num, den] rows) and only accepted predicate quadruples.
std::string game_to_json(const Game& g);
Game game_from_json(const std::string& text);
Game load_game(const std::string& path);
void save_game(const Game& g, const std::string& path);

}  // namespace nonlocal
