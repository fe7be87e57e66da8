#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nonlocal/box.hpp"
#include "nonlocal/game.hpp"

namespace nonlocal {

// Absolute pivot tolerance: entries smaller than this are treated as zero
// when selecting pivots, and reduced costs within it count as optimal.
inline constexpr double kPivotTol = 1e-9;

inline constexpr int kDefaultLpIterationLimit = 200'000;

// Ceiling on |X|*|Y|*|A|*|B| LP variables for nonsignaling_value.
inline constexpr std::uint64_t kDefaultLpVariableBudget = 2000;

enum class Sense { kLessEqual, kEqual };

// maximize objective . x  subject to  constraints x (<= or =) bounds, x >= 0.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;  // one row per constraint
  Eigen::VectorXd bounds;
  std::vector<Sense> senses;
};

struct LpSolution {
  double value = 0.0;
  Eigen::VectorXd x;
};

// Two-phase primal simplex on a dense tableau with Bland's anti-cycling
// rule.  Throws InvalidArgument on inconsistent dimensions, LpInfeasible,
// LpUnbounded, or LpIterationLimit (total pivots across both phases).
LpSolution simplex_solve(const LinearProgram& lp,
                         int iteration_limit = kDefaultLpIterationLimit);

// Plain-text rendering: the objective row, then one constraint per line.
std::string lp_debug_dump(const LinearProgram& lp);

struct NonsignalingResult {
  double value = 0.0;
  Box box;
};

// Maximum of box_value(g, .) over the non-signaling polytope: variables
// P(a,b|x,y), per-question normalization equalities, and marginal
// independence constraints, solved with simplex_solve.  The returned box is
// the optimizer.  Throws SizeBudgetExceeded when the game needs more than
// variable_budget LP variables; simplex errors propagate.
NonsignalingResult nonsignaling_value(
    const Game& g, std::uint64_t variable_budget = kDefaultLpVariableBudget,
    int iteration_limit = kDefaultLpIterationLimit);

}  // namespace nonlocal
