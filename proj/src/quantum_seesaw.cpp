#include <algorithm>
#include <mutex>

#include "nonlocal/parallel.hpp"
#include "nonlocal/quantum.hpp"

namespace nonlocal {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

CMat hermitize(const CMat& m) { return (m + m.adjoint().eval()) / 2.0; }

// Objective without validation: mid-ascent operators carry roundoff that the
// strict checks would reject.
double objective(const Game& game, const QuantumStrategy& s) {
  RowMajorMap psi(s.state.data(), s.d_a, s.d_b);
  double total = 0.0;
  for (int x = 0; x < game.x_count(); ++x) {
    for (int a = 0; a < game.a_count(); ++a) {
      CMat alice_side = psi.adjoint() * s.alice[static_cast<std::size_t>(x)]
                                            [static_cast<std::size_t>(a)] *
                        psi;
      for (int y = 0; y < game.y_count(); ++y) {
        double pi = to_double(game.prob(x, y));
        if (pi == 0.0) continue;
        for (int b = 0; b < game.b_count(); ++b) {
          if (!game.accepts(x, y, a, b)) continue;
          total += pi * alice_side
                            .cwiseProduct(s.bob[static_cast<std::size_t>(y)]
                                               [static_cast<std::size_t>(b)])
                            .sum()
                            .real();
        }
      }
    }
  }
  return total;
}

// Random full-rank POVM: Gram matrices of Gaussian blocks, jointly
// renormalized to completeness.  Generic interior starting points matter
// here: families built from projective or uniform pieces carry symmetries
// that coordinate ascent preserves, and those symmetric trajectories stall
// at exchange-stationary interior points well below the quantum value.
std::vector<CMat> random_family(int dim, int answers, std::mt19937_64& rng) {
  std::vector<CMat> family;
  family.reserve(static_cast<std::size_t>(answers));
  CMat sum = CMat::Zero(dim, dim);
  for (int a = 0; a < answers; ++a) {
    CMat block(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        block(i, j) = Complex(gaussian(rng), gaussian(rng));
    family.push_back(hermitize(block.adjoint() * block));
    sum += family.back();
  }
  Eigensystem es = eigh(hermitize(sum));
  CMat inv_root = CMat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    inv_root += es.vectors.col(i) * es.vectors.col(i).adjoint() /
                std::sqrt(es.values(i));
  }
  for (auto& m : family) m = hermitize(inv_root * m * inv_root);
  return family;
}

// Best exchange between two POVM elements with their sum held fixed:
// maximizing tr(M1 F1) + tr(M2 F2) over 0 <= M1 <= S, M2 = S - M1 puts M1 on
// the positive eigenspace of sqrt(S)(F1 - F2)sqrt(S).  Never decreases the
// objective, and for a two-answer family one exchange is globally optimal.
void exchange_pair(CMat& m1, CMat& m2, const CMat& f1, const CMat& f2) {
  CMat s = m1 + m2;
  CMat root = psd_sqrt(s);
  CMat pivot = hermitize(root * (f1 - f2) * root);
  CMat keep = positive_eigenspace_projector(pivot);
  CMat updated = hermitize(root * keep * root);
  m1 = updated;
  m2 = hermitize(s - updated);
}

// Effective operators F^x_a with tr(M^x_a F^x_a) summing to the objective for
// fixed Bob and state.
std::vector<std::vector<CMat>> alice_effective(const Game& game,
                                               const QuantumStrategy& s) {
  RowMajorMap psi(s.state.data(), s.d_a, s.d_b);
  std::vector<CMat> rho(
      static_cast<std::size_t>(game.y_count()) * game.b_count());
  for (int y = 0; y < game.y_count(); ++y)
    for (int b = 0; b < game.b_count(); ++b)
      rho[static_cast<std::size_t>(y) * game.b_count() + b] = hermitize(
          psi *
          s.bob[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)]
              .transpose() *
          psi.adjoint());
  std::vector<std::vector<CMat>> f(static_cast<std::size_t>(game.x_count()));
  for (int x = 0; x < game.x_count(); ++x) {
    f[static_cast<std::size_t>(x)].assign(
        static_cast<std::size_t>(game.a_count()), CMat::Zero(s.d_a, s.d_a));
    for (int y = 0; y < game.y_count(); ++y) {
      double pi = to_double(game.prob(x, y));
      if (pi == 0.0) continue;
      for (int a = 0; a < game.a_count(); ++a)
        for (int b = 0; b < game.b_count(); ++b)
          if (game.accepts(x, y, a, b))
            f[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)] +=
                pi * rho[static_cast<std::size_t>(y) * game.b_count() + b];
    }
  }
  return f;
}

std::vector<std::vector<CMat>> bob_effective(const Game& game,
                                             const QuantumStrategy& s) {
  RowMajorMap psi(s.state.data(), s.d_a, s.d_b);
  std::vector<CMat> sigma(
      static_cast<std::size_t>(game.x_count()) * game.a_count());
  for (int x = 0; x < game.x_count(); ++x)
    for (int a = 0; a < game.a_count(); ++a)
      sigma[static_cast<std::size_t>(x) * game.a_count() + a] =
          hermitize((psi.adjoint() *
                     s.alice[static_cast<std::size_t>(x)]
                            [static_cast<std::size_t>(a)] *
                     psi)
                        .transpose());
  std::vector<std::vector<CMat>> g(static_cast<std::size_t>(game.y_count()));
  for (int y = 0; y < game.y_count(); ++y) {
    g[static_cast<std::size_t>(y)].assign(
        static_cast<std::size_t>(game.b_count()), CMat::Zero(s.d_b, s.d_b));
    for (int x = 0; x < game.x_count(); ++x) {
      double pi = to_double(game.prob(x, y));
      if (pi == 0.0) continue;
      for (int a = 0; a < game.a_count(); ++a)
        for (int b = 0; b < game.b_count(); ++b)
          if (game.accepts(x, y, a, b))
            g[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)] +=
                pi * sigma[static_cast<std::size_t>(x) * game.a_count() + a];
    }
  }
  return g;
}

double family_score(const std::vector<CMat>& family,
                    const std::vector<CMat>& effective) {
  double s = 0.0;
  for (std::size_t a = 0; a < family.size(); ++a) {
    s += (family[a] * effective[a]).trace().real();
  }
  return s;
}

void exchange_passes(std::vector<CMat>& family,
                     const std::vector<CMat>& effective, int passes) {
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t a1 = 0; a1 + 1 < family.size(); ++a1) {
      for (std::size_t a2 = a1 + 1; a2 < family.size(); ++a2) {
        exchange_pair(family[a1], family[a2], effective[a1], effective[a2]);
      }
    }
  }
}

// Discrimination-style fixed-point candidate, started from the uniform POVM
// so it is independent of the current family: iterate
//   M_a <- L^{-1/2} F_a M_a F_a L^{-1/2},   L = sum_b F_b M_b F_b,
// whose fixed points satisfy the optimality conditions of the linear POVM
// subproblem.  The effective operators here are PSD, which the map needs.
std::vector<CMat> fixed_point_candidate(const std::vector<CMat>& effective,
                                        int dim, int iterations) {
  std::vector<CMat> family(effective.size(),
                           CMat::Identity(dim, dim) /
                               static_cast<double>(effective.size()));
  for (int it = 0; it < iterations; ++it) {
    CMat lambda = CMat::Zero(dim, dim);
    for (std::size_t a = 0; a < family.size(); ++a) {
      lambda += effective[a] * family[a] * effective[a];
    }
    // Inverse square root on the support; directions outside it get no mass
    // from any F_a M_a F_a, so renormalizing there is moot -- the leftover
    // identity block keeps the family complete.
    Eigensystem es = eigh(hermitize(lambda));
    CMat inv_root = CMat::Zero(dim, dim);
    CMat support = CMat::Zero(dim, dim);
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
      if (es.values(i) > 1e-14) {
        inv_root += es.vectors.col(i) * es.vectors.col(i).adjoint() /
                    std::sqrt(es.values(i));
        support += es.vectors.col(i) * es.vectors.col(i).adjoint();
      }
    }
    CMat kernel_share =
        (CMat::Identity(dim, dim) - support) / static_cast<double>(family.size());
    for (std::size_t a = 0; a < family.size(); ++a) {
      family[a] = hermitize(inv_root * effective[a] * family[a] * effective[a] *
                                inv_root +
                            kernel_share);
    }
  }
  return family;
}

// Projective candidate: diagonalize a generic fixed mixture of the effective
// operators and hand each eigendirection to the answer that values it most.
// Exact when the effective operators commute, and a strong escape hatch from
// the mixed fixed points pairwise exchange can stall at.
std::vector<CMat> assignment_candidate(const std::vector<CMat>& effective,
                                       int dim) {
  CMat mix = CMat::Zero(dim, dim);
  for (std::size_t a = 0; a < effective.size(); ++a) {
    mix += static_cast<double>(a + 1) * effective[a];
  }
  Eigensystem es = eigh(hermitize(mix));
  std::vector<CMat> family(effective.size(), CMat::Zero(dim, dim));
  for (Eigen::Index i = 0; i < es.vectors.cols(); ++i) {
    CVec v = es.vectors.col(i);
    std::size_t best = 0;
    double best_gain = (v.adjoint() * effective[0] * v)(0).real();
    for (std::size_t a = 1; a < effective.size(); ++a) {
      double gain = (v.adjoint() * effective[a] * v)(0).real();
      if (gain > best_gain) {
        best_gain = gain;
        best = a;
      }
    }
    family[best] += v * v.adjoint();
  }
  return family;
}

void improve_families(std::vector<std::vector<CMat>>& families,
                      const std::vector<std::vector<CMat>>& effective,
                      int dim) {
  constexpr int kPasses = 3;
  constexpr int kFixedPointIterations = 40;
  for (std::size_t q = 0; q < families.size(); ++q) {
    const auto& f = effective[q];
    std::vector<std::vector<CMat>> candidates;
    candidates.push_back(families[q]);
    candidates.push_back(assignment_candidate(f, dim));
    // Pairwise exchange alone is globally optimal for two-answer families,
    // so the discrimination fixed point only earns its cost beyond that.
    if (families[q].size() > 2) {
      candidates.push_back(fixed_point_candidate(f, dim, kFixedPointIterations));
    }
    for (auto& candidate : candidates) exchange_passes(candidate, f, kPasses);
    // Keep the best candidate; the current family staying a candidate makes
    // each update monotone by construction.
    double best = family_score(families[q], f);
    std::vector<CMat>* winner = nullptr;
    for (auto& candidate : candidates) {
      double score = family_score(candidate, f);
      if (score > best) {
        best = score;
        winner = &candidate;
      }
    }
    if (winner != nullptr) {
      families[q] = std::move(*winner);
    }
  }
}

struct RestartOutcome {
  double value = -1.0;
  QuantumStrategy strategy;
  bool converged = false;
  std::vector<double> history;
};

RestartOutcome run_restart(const Game& game, const SeesawOptions& opt,
                           std::uint64_t seed, bool entangled_start,
                           const QuantumStrategy* warm) {
  std::mt19937_64 rng(seed);
  QuantumStrategy s;
  if (warm != nullptr) {
    s = *warm;
  } else {
    s.d_a = opt.d_a;
    s.d_b = opt.d_b;
    if (entangled_start && opt.d_a == opt.d_b) {
      // Maximally entangled start: sits in the right basin for games whose
      // optimum needs entanglement; the plain Gaussian starts on the other
      // restarts cover the rest.  Measurement randomness alone already
      // diversifies these restarts, and the first state update moves the
      // state wherever the families point anyway.
      s.state = max_entangled_state(opt.d_a);
    } else {
      s.state = random_state(opt.d_a * opt.d_b, rng);
    }
    for (int x = 0; x < game.x_count(); ++x)
      s.alice.push_back(random_family(opt.d_a, game.a_count(), rng));
    for (int y = 0; y < game.y_count(); ++y)
      s.bob.push_back(random_family(opt.d_b, game.b_count(), rng));
  }

  RestartOutcome out;
  double value = objective(game, s);
  for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
    // Each stage is monotone in exact arithmetic; roundoff regressions are
    // undone so the reported history never decreases.
    auto saved_alice = s.alice;
    improve_families(s.alice, alice_effective(game, s), s.d_a);
    double after = objective(game, s);
    if (after < value) {
      s.alice = std::move(saved_alice);
    } else {
      value = after;
    }

    auto saved_bob = s.bob;
    improve_families(s.bob, bob_effective(game, s), s.d_b);
    after = objective(game, s);
    if (after < value) {
      s.bob = std::move(saved_bob);
    } else {
      value = after;
    }

    CMat op = CMat::Zero(static_cast<Eigen::Index>(s.d_a) * s.d_b,
                         static_cast<Eigen::Index>(s.d_a) * s.d_b);
    for (int x = 0; x < game.x_count(); ++x)
      for (int y = 0; y < game.y_count(); ++y) {
        double pi = to_double(game.prob(x, y));
        if (pi == 0.0) continue;
        for (int a = 0; a < game.a_count(); ++a)
          for (int b = 0; b < game.b_count(); ++b)
            if (game.accepts(x, y, a, b))
              op += pi * tensor(s.alice[static_cast<std::size_t>(x)]
                                       [static_cast<std::size_t>(a)],
                                s.bob[static_cast<std::size_t>(y)]
                                     [static_cast<std::size_t>(b)]);
      }
    Eigensystem es = eigh(hermitize(op));
    double top = es.values(es.values.size() - 1);
    if (top >= value) {
      s.state = es.vectors.col(es.vectors.cols() - 1);
      value = top;
    }

    double previous = out.history.empty() ? -1.0 : out.history.back();
    out.history.push_back(value);
    if (!out.history.empty() && sweep > 0 && value - previous < opt.tol) {
      out.converged = true;
      break;
    }
  }
  out.value = value;
  out.strategy = std::move(s);
  return out;
}

}  // namespace

SeesawResult seesaw_lower_bound(const Game& game, const SeesawOptions& options) {
  if (options.d_a < 1 || options.d_b < 1) {
    fail(ErrorCode::InvalidArgument, "local dimensions must be positive");
  }
  if (options.sweeps < 1 || options.restarts < 1) {
    fail(ErrorCode::InvalidArgument, "sweeps and restarts must be positive");
  }
  if (options.init) {
    if (options.init->d_a != options.d_a || options.init->d_b != options.d_b) {
      fail(ErrorCode::DimensionMismatch,
           "warm start dimensions must match the requested dimensions");
    }
    validate_strategy(*options.init, game);
  }
  std::vector<RestartOutcome> outcomes(
      static_cast<std::size_t>(options.restarts));
  parallel_chunks(options.restarts, [&](int, std::uint64_t begin,
                                        std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      const QuantumStrategy* warm =
          (r == 0 && options.init) ? &*options.init : nullptr;
      outcomes[static_cast<std::size_t>(r)] =
          run_restart(game, options, options.seed + r, r % 2 == 0, warm);
    }
  });
  // Best value wins; the earliest seed breaks exact ties so the result does
  // not depend on the worker count.
  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (outcomes[r].value > outcomes[best].value) best = r;
  }
  SeesawResult result;
  result.value = outcomes[best].value;
  result.strategy = std::move(outcomes[best].strategy);
  result.converged = outcomes[best].converged;
  result.history = std::move(outcomes[best].history);
  return result;
}

}  // namespace nonlocal
