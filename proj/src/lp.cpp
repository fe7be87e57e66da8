#include "nonlocal/lp.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace nonlocal {

namespace {

void validate_dimensions(const LinearProgram& lp) {
  const auto rows = lp.constraints.rows();
  if (lp.constraints.cols() != lp.objective.size()) {
    fail(ErrorCode::InvalidArgument,
         "constraint matrix has " + std::to_string(lp.constraints.cols()) +
             " columns but the objective has " +
             std::to_string(lp.objective.size()) + " entries");
  }
  if (lp.bounds.size() != rows ||
      lp.senses.size() != static_cast<std::size_t>(rows)) {
    fail(ErrorCode::InvalidArgument,
         "expected one bound and one sense per constraint row");
  }
}

// Dense tableau over columns [structural | slack, surplus | artificial]; the
// cost row holds reduced costs for minimization and is updated by the same
// row operations as the body, so basic columns keep cost zero.
struct Tableau {
  Eigen::MatrixXd body;
  Eigen::VectorXd rhs;
  Eigen::VectorXd cost;
  std::vector<Eigen::Index> basis;  // basic column of each row
  Eigen::Index artificial_begin = 0;
  int pivots_left = 0;
};

void pivot(Tableau& t, Eigen::Index row, Eigen::Index col) {
  const double p = t.body(row, col);
  t.body.row(row) /= p;
  t.rhs(row) /= p;
  for (Eigen::Index i = 0; i < t.body.rows(); ++i) {
    if (i == row) continue;
    const double f = t.body(i, col);
    if (f == 0.0) continue;
    t.body.row(i) -= f * t.body.row(row);
    t.rhs(i) -= f * t.rhs(row);
    // Minimum-ratio selection keeps the basis feasible in exact arithmetic;
    // shave off the roundoff so later ratio tests never see -1e-17.
    if (t.rhs(i) < 0.0 && t.rhs(i) > -kPivotTol) t.rhs(i) = 0.0;
  }
  const double f = t.cost(col);
  if (f != 0.0) t.cost -= f * t.body.row(row);
  t.basis[static_cast<std::size_t>(row)] = col;
}

enum class RunResult { kOptimal, kUnbounded };

// Bland's rule, minimization: entering column is the lowest-index eligible
// one with negative reduced cost; leaving row attains the minimum ratio,
// ties broken toward the smallest basic column index.  Anti-cycling needs
// exact tie comparisons; the kPivotTol window is the float stand-in, with
// the pivot budget as the backstop.
RunResult run_simplex(Tableau& t, Eigen::Index enterable_columns) {
  for (;;) {
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < enterable_columns; ++j) {
      if (t.cost(j) < -kPivotTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return RunResult::kOptimal;

    Eigen::Index leaving = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < t.body.rows(); ++i) {
      if (t.body(i, entering) <= kPivotTol) continue;
      const double ratio = t.rhs(i) / t.body(i, entering);
      if (leaving < 0 || ratio < best_ratio - kPivotTol) {
        leaving = i;
        best_ratio = ratio;
      } else if (ratio < best_ratio + kPivotTol &&
                 t.basis[static_cast<std::size_t>(i)] <
                     t.basis[static_cast<std::size_t>(leaving)]) {
        leaving = i;
      }
    }
    if (leaving < 0) return RunResult::kUnbounded;
    if (t.pivots_left <= 0) {
      fail(ErrorCode::LpIterationLimit, "simplex pivot budget exhausted");
    }
    --t.pivots_left;
    pivot(t, leaving, entering);
  }
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp, int iteration_limit) {
  validate_dimensions(lp);
  if (iteration_limit < 0) {
    fail(ErrorCode::InvalidArgument, "negative iteration limit");
  }

  const Eigen::Index n = lp.objective.size();
  const Eigen::Index m = lp.constraints.rows();

  // Sign-normalize rows to nonnegative right-hand sides.  A flipped
  // inequality needs a surplus column plus an artificial; a plain one only a
  // slack; equalities always an artificial.
  Eigen::MatrixXd a = lp.constraints;
  Eigen::VectorXd b = lp.bounds;
  std::vector<bool> flipped(static_cast<std::size_t>(m), false);
  Eigen::Index inequality_count = 0;
  Eigen::Index artificial_count = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      a.row(i) = -a.row(i);
      b(i) = -b(i);
      flipped[static_cast<std::size_t>(i)] = true;
    }
    const bool equality = lp.senses[static_cast<std::size_t>(i)] == Sense::kEqual;
    if (!equality) ++inequality_count;
    if (equality || flipped[static_cast<std::size_t>(i)]) ++artificial_count;
  }

  Tableau t;
  t.artificial_begin = n + inequality_count;
  const Eigen::Index total = t.artificial_begin + artificial_count;
  t.body = Eigen::MatrixXd::Zero(m, total);
  t.rhs = b;
  t.basis.assign(static_cast<std::size_t>(m), -1);
  t.pivots_left = iteration_limit;

  Eigen::Index next_slack = n;
  Eigen::Index next_artificial = t.artificial_begin;
  for (Eigen::Index i = 0; i < m; ++i) {
    t.body.row(i).head(n) = a.row(i);
    const bool equality = lp.senses[static_cast<std::size_t>(i)] == Sense::kEqual;
    if (!equality) {
      // Flipped rows model "original row >= bound", so the logical slack
      // enters negatively (a surplus) and cannot start basic.
      t.body(i, next_slack) = flipped[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
      if (!flipped[static_cast<std::size_t>(i)]) {
        t.basis[static_cast<std::size_t>(i)] = next_slack;
      }
      ++next_slack;
    }
    if (equality || flipped[static_cast<std::size_t>(i)]) {
      t.body(i, next_artificial) = 1.0;
      t.basis[static_cast<std::size_t>(i)] = next_artificial;
      ++next_artificial;
    }
  }

  // Phase one: minimize the artificial total.
  if (artificial_count > 0) {
    t.cost = Eigen::VectorXd::Zero(total);
    t.cost.tail(artificial_count).setOnes();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t.basis[static_cast<std::size_t>(i)] >= t.artificial_begin) {
        t.cost -= t.body.row(i);
      }
    }
    if (run_simplex(t, total) == RunResult::kUnbounded) {
      // The artificial total is bounded below by zero, so this cannot occur
      // for finite data; treat defensively as infeasibility evidence.
      fail(ErrorCode::LpInfeasible, "phase one terminated unbounded");
    }
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t.basis[static_cast<std::size_t>(i)] >= t.artificial_begin) {
        infeasibility += t.rhs(i);
      }
    }
    if (infeasibility > 1e-7) {
      fail(ErrorCode::LpInfeasible,
           "phase one left total infeasibility " + std::to_string(infeasibility));
    }
  }

  // Phase two: minimize -objective over structural, slack, and surplus
  // columns; artificial columns are barred from re-entering and any still
  // basic are stuck at value zero, which the ratio rule preserves.
  t.cost = Eigen::VectorXd::Zero(total);
  t.cost.head(n) = -lp.objective;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index basic = t.basis[static_cast<std::size_t>(i)];
    const double f = t.cost(basic);
    if (f != 0.0) t.cost -= f * t.body.row(i);
  }
  if (run_simplex(t, t.artificial_begin) == RunResult::kUnbounded) {
    fail(ErrorCode::LpUnbounded, "objective unbounded over the feasible set");
  }

  LpSolution solution;
  solution.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index basic = t.basis[static_cast<std::size_t>(i)];
    if (basic < n) solution.x(basic) = std::max(0.0, t.rhs(i));
  }
  solution.value = lp.objective.dot(solution.x);
  return solution;
}

std::string lp_debug_dump(const LinearProgram& lp) {
  validate_dimensions(lp);
  auto append_number = [](std::string& out, double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    out += buffer;
  };
  std::string out = "max";
  for (Eigen::Index j = 0; j < lp.objective.size(); ++j) {
    out += ' ';
    append_number(out, lp.objective(j));
  }
  out += '\n';
  for (Eigen::Index i = 0; i < lp.constraints.rows(); ++i) {
    std::string line;
    for (Eigen::Index j = 0; j < lp.constraints.cols(); ++j) {
      if (j > 0) line += ' ';
      append_number(line, lp.constraints(i, j));
    }
    line += lp.senses[static_cast<std::size_t>(i)] == Sense::kEqual ? " = "
                                                                    : " <= ";
    append_number(line, lp.bounds(i));
    out += line;
    out += '\n';
  }
  return out;
}

NonsignalingResult nonsignaling_value(const Game& g,
                                      std::uint64_t variable_budget,
                                      int iteration_limit) {
  if (g.cell_count() > variable_budget) {
    fail(ErrorCode::SizeBudgetExceeded,
         "non-signaling LP needs " + std::to_string(g.cell_count()) +
             " variables, over the budget of " +
             std::to_string(variable_budget));
  }
  const int X = g.x_count(), Y = g.y_count(), A = g.a_count(),
            B = g.b_count();
  const Eigen::Index n = static_cast<Eigen::Index>(g.cell_count());
  auto var = [&](int x, int y, int a, int b) {
    return static_cast<Eigen::Index>(
        ((static_cast<std::size_t>(x) * Y + y) * A + a) * B + b);
  };

  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      const double pi = to_double(g.prob(x, y));
      if (pi == 0.0) continue;
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b)
          if (g.accepts(x, y, a, b)) lp.objective(var(x, y, a, b)) = pi;
    }

  // Rows: per-question normalization equalities, then the two marginal
  // independence families, each equality split into a pair of <= rows and
  // anchored against the party's first question.
  const Eigen::Index normalization_rows = static_cast<Eigen::Index>(X) * Y;
  const Eigen::Index alice_rows =
      static_cast<Eigen::Index>(X) * A * (Y - 1) * 2;
  const Eigen::Index bob_rows = static_cast<Eigen::Index>(Y) * B * (X - 1) * 2;
  const Eigen::Index m = normalization_rows + alice_rows + bob_rows;
  lp.constraints = Eigen::MatrixXd::Zero(m, n);
  lp.bounds = Eigen::VectorXd::Zero(m);
  lp.senses.assign(static_cast<std::size_t>(m), Sense::kLessEqual);

  Eigen::Index row = 0;
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b) lp.constraints(row, var(x, y, a, b)) = 1.0;
      lp.bounds(row) = 1.0;
      lp.senses[static_cast<std::size_t>(row)] = Sense::kEqual;
      ++row;
    }
  for (int x = 0; x < X; ++x)
    for (int a = 0; a < A; ++a)
      for (int y = 1; y < Y; ++y)
        for (double sign : {1.0, -1.0}) {
          for (int b = 0; b < B; ++b) {
            lp.constraints(row, var(x, y, a, b)) = sign;
            lp.constraints(row, var(x, 0, a, b)) = -sign;
          }
          ++row;
        }
  for (int y = 0; y < Y; ++y)
    for (int b = 0; b < B; ++b)
      for (int x = 1; x < X; ++x)
        for (double sign : {1.0, -1.0}) {
          for (int a = 0; a < A; ++a) {
            lp.constraints(row, var(x, y, a, b)) = sign;
            lp.constraints(row, var(0, y, a, b)) = -sign;
          }
          ++row;
        }

  LpSolution solution = simplex_solve(lp, iteration_limit);

  NonsignalingResult result;
  result.value = solution.value;
  result.box = make_box(X, Y, A, B);
  for (Eigen::Index j = 0; j < n; ++j)
    result.box.p[static_cast<std::size_t>(j)] = solution.x(j);
  return result;
}

}  // namespace nonlocal
