#pragma once

#include <string>
#include <vector>

#include "nonlocal/game.hpp"

namespace nonlocal {

inline constexpr double kNonsignalingTol = 1e-9;

// Dense conditional probability table P(a,b|x,y), the common currency between
// quantum strategies, linear programs, and protocol outputs.
struct Box {
  int x_count = 0;
  int y_count = 0;
  int a_count = 0;
  int b_count = 0;
  std::vector<double> p;  // (((x*y_count)+y)*a_count+a)*b_count+b

  double& at(int x, int y, int a, int b) {
    return p[((static_cast<std::size_t>(x) * y_count + y) * a_count + a) *
                 b_count +
             b];
  }
  double at(int x, int y, int a, int b) const {
    return p[((static_cast<std::size_t>(x) * y_count + y) * a_count + a) *
                 b_count +
             b];
  }
};

Box make_box(int x_count, int y_count, int a_count, int b_count);

// The Popescu-Rohrlich correlations: binary inputs/outputs, P(a,b|x,y) = 1/2
// when a xor b = x and y, else 0.
Box pr_box();

struct NonsignalingReport {
  bool ok = false;
  double worst_deviation = 0.0;  // largest marginal mismatch found
};

// Checks normalization of every slice and independence of Alice's marginal
// from y and Bob's from x.
NonsignalingReport check_nonsignaling(const Box& box,
                                      double tol = kNonsignalingTol);

// Expected winning probability of the box against the game's distribution and
// predicate.  Table shapes must match the game.
double box_value(const Game& game, const Box& box);

// CSV with header x,y,a,b,p; one row per cell in lexicographic order, 17
// significant digits so a round trip preserves every double exactly.
std::string box_to_csv(const Box& box);
Box box_from_csv(const std::string& text);

void save_box(const Box& box, const std::string& path);
Box load_box(const std::string& path);

}  // namespace nonlocal
