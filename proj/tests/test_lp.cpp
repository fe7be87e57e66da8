#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "nonlocal/lp.hpp"
#include "nonlocal/quantum.hpp"

using namespace nonlocal;

namespace {

LinearProgram make_lp(int vars, const std::vector<double>& objective) {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(vars);
  for (int j = 0; j < vars; ++j) lp.objective(j) = objective[j];
  lp.constraints = Eigen::MatrixXd::Zero(0, vars);
  lp.bounds = Eigen::VectorXd::Zero(0);
  return lp;
}

void add_row(LinearProgram& lp, const std::vector<double>& row, Sense sense,
             double bound) {
  const Eigen::Index m = lp.constraints.rows();
  lp.constraints.conservativeResize(m + 1, Eigen::NoChange);
  lp.bounds.conservativeResize(m + 1);
  for (Eigen::Index j = 0; j < lp.constraints.cols(); ++j)
    lp.constraints(m, j) = row[static_cast<std::size_t>(j)];
  lp.bounds(m) = bound;
  lp.senses.push_back(sense);
}

// Brute-force oracle: the optimum of a feasible bounded LP sits at a vertex,
// i.e. at some choice of n linearly independent active constraints drawn
// from the rows and the nonnegativity planes (equality rows always active).
// Enumerate them all, keep the best feasible solution.
double vertex_enumeration_max(const LinearProgram& lp) {
  const Eigen::Index n = lp.objective.size();
  const Eigen::Index m = lp.constraints.rows();
  std::vector<Eigen::Index> equalities, planes;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lp.senses[static_cast<std::size_t>(i)] == Sense::kEqual)
      equalities.push_back(i);
    else
      planes.push_back(i);
  }
  // Plane index >= m encodes the hyperplane x_{index-m} = 0.
  for (Eigen::Index j = 0; j < n; ++j) planes.push_back(m + j);

  const Eigen::Index need = n - static_cast<Eigen::Index>(equalities.size());
  REQUIRE(need >= 0);
  REQUIRE(planes.size() <= 24);

  bool found = false;
  double best = 0.0;
  std::vector<Eigen::Index> chosen;
  auto try_vertex = [&]() {
    Eigen::MatrixXd active(n, n);
    Eigen::VectorXd rhs(n);
    Eigen::Index r = 0;
    for (Eigen::Index i : equalities) {
      active.row(r) = lp.constraints.row(i);
      rhs(r++) = lp.bounds(i);
    }
    for (Eigen::Index c : chosen) {
      if (c < m) {
        active.row(r) = lp.constraints.row(c);
        rhs(r++) = lp.bounds(c);
      } else {
        active.row(r).setZero();
        active(r, c - m) = 1.0;
        rhs(r++) = 0.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(active);
    if (lu.rank() < n) return;
    Eigen::VectorXd x = lu.solve(rhs);
    for (Eigen::Index j = 0; j < n; ++j)
      if (x(j) < -1e-9) return;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double lhs = lp.constraints.row(i).dot(x);
      if (lp.senses[static_cast<std::size_t>(i)] == Sense::kEqual) {
        if (std::abs(lhs - lp.bounds(i)) > 1e-8) return;
      } else if (lhs > lp.bounds(i) + 1e-9) {
        return;
      }
    }
    const double value = lp.objective.dot(x);
    if (!found || value > best) best = value;
    found = true;
  };
  auto recurse = [&](auto&& self, std::size_t from, Eigen::Index left) -> void {
    if (left == 0) {
      try_vertex();
      return;
    }
    for (std::size_t i = from; i + static_cast<std::size_t>(left) <= planes.size();
         ++i) {
      chosen.push_back(planes[i]);
      self(self, i + 1, left - 1);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0, need);
  REQUIRE(found);
  return best;
}

}  // namespace

TEST_CASE("one-variable ceiling is attained") {
  LinearProgram lp = make_lp(1, {1.0});
  add_row(lp, {1.0}, Sense::kLessEqual, 3.0);
  LpSolution s = simplex_solve(lp);
  CHECK(s.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.x(0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("contradictory bounds are reported infeasible") {
  LinearProgram lp = make_lp(1, {1.0});
  add_row(lp, {-1.0}, Sense::kLessEqual, -1.0);  // x >= 1
  add_row(lp, {1.0}, Sense::kLessEqual, 0.0);    // x <= 0
  try {
    simplex_solve(lp);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LpInfeasible);
  }
}

TEST_CASE("missing ceiling is reported unbounded") {
  LinearProgram lp = make_lp(2, {1.0, 0.0});
  add_row(lp, {0.0, 1.0}, Sense::kLessEqual, 1.0);
  try {
    simplex_solve(lp);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LpUnbounded);
  }
}

TEST_CASE("pivot budget exhaustion is reported") {
  LinearProgram lp = make_lp(1, {1.0});
  add_row(lp, {1.0}, Sense::kLessEqual, 3.0);
  try {
    simplex_solve(lp, 0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LpIterationLimit);
    CHECK(e.is_resource_limit());
  }
}

TEST_CASE("dimension validation") {
  LinearProgram lp = make_lp(2, {1.0, 1.0});
  add_row(lp, {1.0, 1.0}, Sense::kLessEqual, 1.0);
  lp.senses.push_back(Sense::kEqual);  // one sense too many
  try {
    simplex_solve(lp);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("solver matches vertex enumeration on a random corpus") {
  std::mt19937_64 rng(7791);
  std::uniform_int_distribution<int> var_count(2, 5);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> slack_bound(0.5, 3.0);
  for (int instance = 0; instance < 24; ++instance) {
    const int n = var_count(rng);
    std::vector<double> objective(static_cast<std::size_t>(n));
    for (auto& c : objective) c = coeff(rng);
    LinearProgram lp = make_lp(n, objective);
    // A few generic rows with nonnegative bounds keep the origin feasible;
    // per-variable ceilings keep the region bounded.  Every third instance
    // additionally pins the total mass to an equality row.
    std::uniform_int_distribution<int> row_count(1, 12 - n - 1);
    const int extra = row_count(rng);
    for (int r = 0; r < extra; ++r) {
      std::vector<double> row(static_cast<std::size_t>(n));
      for (auto& v : row) v = coeff(rng);
      add_row(lp, row, Sense::kLessEqual, slack_bound(rng));
    }
    {
      std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
      add_row(lp, ones, instance % 3 == 0 ? Sense::kEqual : Sense::kLessEqual,
              instance % 3 == 0 ? 1.0 : 2.5);
    }
    for (int j = 0; j < n && lp.constraints.rows() < 12; ++j) {
      std::vector<double> row(static_cast<std::size_t>(n), 0.0);
      row[static_cast<std::size_t>(j)] = 1.0;
      add_row(lp, row, Sense::kLessEqual, slack_bound(rng));
    }
    CAPTURE(instance);
    const double oracle = vertex_enumeration_max(lp);
    LpSolution s = simplex_solve(lp);
    CHECK(std::abs(s.value - oracle) < 1e-7);
  }
}

TEST_CASE("uniform correlations win half of the xor game") {
  Game g = chsh_game();
  Box uniform = make_box(2, 2, 2, 2);
  for (auto& v : uniform.p) v = 0.25;
  CHECK(box_value(g, uniform) == 0.5);
}

TEST_CASE("the perfect xor-game box wins exactly and signals nothing") {
  Game g = chsh_game();
  Box box = pr_box();
  CHECK(box_value(g, box) == 1.0);
  NonsignalingReport report = check_nonsignaling(box, 1e-15);
  CHECK(report.ok);
  // Output marginals are exactly uniform.
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      for (int y = 0; y < 2; ++y) {
        double marginal = box.at(x, y, a, 0) + box.at(x, y, a, 1);
        CHECK(marginal == 0.5);
      }
}

TEST_CASE("a constructed signaling box is flagged with its violation") {
  Box box = make_box(2, 1, 2, 2);
  // Every slice normalized, but Bob's marginal depends on x by exactly 0.2.
  for (int x = 0; x < 2; ++x) {
    double shift = x == 0 ? 0.0 : 0.2;
    box.at(x, 0, 0, 0) = 0.5 - shift;
    box.at(x, 0, 0, 1) = shift;
    box.at(x, 0, 1, 0) = 0.5;
    box.at(x, 0, 1, 1) = 0.0;
  }
  NonsignalingReport report = check_nonsignaling(box, 1e-9);
  CHECK_FALSE(report.ok);
  CHECK(report.worst_deviation == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("box table round-trips through csv") {
  std::mt19937_64 rng(404);
  Box box = make_box(2, 3, 2, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 3; ++y) {
      double total = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) total += (box.at(x, y, a, b) = u(rng));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) box.at(x, y, a, b) /= total;
    }
  Box back = box_from_csv(box_to_csv(box));
  REQUIRE(back.p.size() == box.p.size());
  for (std::size_t i = 0; i < box.p.size(); ++i) CHECK(back.p[i] == box.p[i]);
}

TEST_CASE("csv parser rejects truncated tables") {
  Box box = pr_box();
  std::string text = box_to_csv(box);
  text.resize(text.size() - 10);
  try {
    box_from_csv(text);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("lp debug dump lists the objective and every row") {
  LinearProgram lp = make_lp(2, {1.0, -0.5});
  add_row(lp, {1.0, 1.0}, Sense::kEqual, 1.0);
  add_row(lp, {1.0, 0.0}, Sense::kLessEqual, 0.75);
  std::string dump = lp_debug_dump(lp);
  CHECK(dump == "max 1 -0.5\n1 1 = 1\n1 0 <= 0.75\n");
}

TEST_CASE("xor game value over the non-signaling polytope is 1") {
  Game g = chsh_game();
  NonsignalingResult r = nonsignaling_value(g);
  CHECK(std::abs(r.value - 1.0) < 1e-7);
  CHECK(std::abs(box_value(g, r.box) - r.value) < 1e-7);
  CHECK(check_nonsignaling(r.box, 1e-7).ok);
}

TEST_CASE("parity game value over the non-signaling polytope is 1") {
  Game g = magic_square_game();
  NonsignalingResult r = nonsignaling_value(g);
  CHECK(std::abs(r.value - 1.0) < 1e-7);
  CHECK(std::abs(box_value(g, r.box) - r.value) < 1e-7);
  CHECK(check_nonsignaling(r.box, 1e-7).ok);
}

TEST_CASE("an always-rejecting game has non-signaling value 0") {
  GameData data;
  data.questions_a = {"0", "1"};
  data.questions_b = {"0"};
  data.answers_a = {"0", "1"};
  data.answers_b = {"0", "1"};
  data.distribution = {Rational(1, 2), Rational(1, 2)};
  data.predicate.assign(2 * 1 * 2 * 2, 0);
  Game g = Game::make(std::move(data));
  NonsignalingResult r = nonsignaling_value(g);
  CHECK(std::abs(r.value) < 1e-9);
}

TEST_CASE("oversized games are rejected up front") {
  Game g = nonlocal_dj_game(4);
  try {
    nonsignaling_value(g);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeBudgetExceeded);
    CHECK(e.is_resource_limit());
  }
}

TEST_CASE("quantum boxes sit inside the non-signaling polytope") {
  QuantumStrategy qs = mermin_peres_strategy();
  Game g = magic_square_game();
  Box box = correlation_table(qs, g);
  NonsignalingReport report = check_nonsignaling(box, 1e-9);
  CHECK(report.ok);
  CHECK(std::abs(box_value(g, box) - 1.0) < 1e-9);
}
