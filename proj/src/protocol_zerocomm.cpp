#include <algorithm>
#include <utility>

#include "nonlocal/linalg.hpp"
#include "nonlocal/protocol.hpp"

namespace nonlocal {

namespace {

// Ties in the argmax rounding closer than this are reported as ambiguous.
constexpr double kTieTol = 1e-9;
// A party's output marginal may drift from question-independence by at most
// this much before the tables are rejected as inconsistent.
constexpr double kMarginalTol = 1e-10;
constexpr double kStateMatchTol = 1e-10;
constexpr int kMaxDepolarizePairs = 4;

CMat hermitize(const CMat& m) { return 0.5 * (m + m.adjoint().eval()); }

CMat hadamard() {
  CMat h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

CMat cnot() {
  CMat c = CMat::Zero(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1;
  return c;
}

CMat pauli_correction(int z, int x) {
  CMat corr = CMat::Identity(2, 2);
  if (x) {
    CMat flip(2, 2);
    flip << 0, 1, 1, 0;
    corr = flip * corr;
  }
  if (z) {
    CMat phase(2, 2);
    phase << 1, 0, 0, -1;
    corr = phase * corr;
  }
  return corr;
}

// Number of canonical EPR pairs a state represents, or -1.
int epr_structure(const CVec& state, int d_a, int d_b) {
  if (d_a != d_b || d_a < 1) return -1;
  int m = 0;
  while ((1 << m) < d_a) ++m;
  if ((1 << m) != d_a) return -1;
  if ((state - max_entangled_state(d_a)).cwiseAbs().maxCoeff() >
      kStateMatchTol) {
    return -1;
  }
  return m;
}

struct EnsembleShape {
  int x_count, y_count;
  int alice_outcomes, bob_outcomes;  // may include one trailing abort slot
};

EnsembleShape ensemble_shape(const ZeroCommProtocol& p) {
  const QuantumStrategy& first = p.parts.front();
  return {static_cast<int>(first.alice.size()),
          static_cast<int>(first.bob.size()),
          static_cast<int>(first.alice.front().size()),
          static_cast<int>(first.bob.front().size())};
}

// Weighted outcome table over the ensemble, on the full outcome sets,
// indexed ((x*y_count+y)*alice_outcomes+a)*bob_outcomes+b.
std::vector<double> ensemble_table(const ZeroCommProtocol& p,
                                   const EnsembleShape& shape) {
  std::vector<double> table(static_cast<std::size_t>(shape.x_count) *
                                shape.y_count * shape.alice_outcomes *
                                shape.bob_outcomes,
                            0.0);
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    const double w = to_double(p.weights[i]);
    Box t = correlation_table(p.parts[i]);
    for (std::size_t cell = 0; cell < table.size(); ++cell) {
      table[cell] += w * t.p[cell];
    }
  }
  return table;
}

// How many answers the game expects, given a family that may carry an abort
// element; anything else is a shape error.
int real_answers(int outcomes, int game_answers, const char* who) {
  if (outcomes != game_answers && outcomes != game_answers + 1) {
    fail(ErrorCode::ShapeMismatch,
         std::string(who) + " outcome count " + std::to_string(outcomes) +
             " matches neither the game's answer count nor answers+abort");
  }
  return game_answers;
}

}  // namespace

ZeroCommProtocol zerocomm_from_strategy(const QuantumStrategy& s) {
  validate_strategy(s);
  ZeroCommProtocol p;
  p.weights = {Rational(1)};
  p.parts = {s};
  p.epr_pairs = epr_structure(s.state, s.d_a, s.d_b);
  return p;
}

void validate_protocol(const ZeroCommProtocol& p) {
  if (p.parts.empty() || p.parts.size() != p.weights.size()) {
    fail(ErrorCode::InvalidArgument,
         "ensemble needs matching, nonempty weights and parts");
  }
  Rational total(0);
  for (const Rational& w : p.weights) {
    if (w < 0) fail(ErrorCode::NegativeProbability, "negative ensemble weight");
    total += w;
  }
  if (total != 1) {
    fail(ErrorCode::NonNormalizedDistribution,
         "ensemble weights must sum to one");
  }
  for (const QuantumStrategy& part : p.parts) {
    validate_strategy(part);
  }
  const EnsembleShape shape = ensemble_shape(p);
  for (const QuantumStrategy& part : p.parts) {
    if (static_cast<int>(part.alice.size()) != shape.x_count ||
        static_cast<int>(part.bob.size()) != shape.y_count) {
      fail(ErrorCode::ShapeMismatch,
           "all ensemble parts must share the question sets");
    }
    for (const auto& family : part.alice) {
      if (static_cast<int>(family.size()) != shape.alice_outcomes) {
        fail(ErrorCode::ShapeMismatch,
             "all alice families must share one outcome set");
      }
    }
    for (const auto& family : part.bob) {
      if (static_cast<int>(family.size()) != shape.bob_outcomes) {
        fail(ErrorCode::ShapeMismatch,
             "all bob families must share one outcome set");
      }
    }
    if (p.epr_pairs >= 0 &&
        epr_structure(part.state, part.d_a, part.d_b) != p.epr_pairs) {
      fail(ErrorCode::UnsupportedSharedState,
           "declared EPR pair count does not match a part's shared state");
    }
  }
}

ZeroCommRunResult run_protocol(const ZeroCommProtocol& p, const Game& g) {
  validate_protocol(p);
  const EnsembleShape shape = ensemble_shape(p);
  if (shape.x_count != g.x_count() || shape.y_count != g.y_count()) {
    fail(ErrorCode::ShapeMismatch,
         "protocol question sets do not match the game");
  }
  const int a_count = real_answers(shape.alice_outcomes, g.a_count(), "alice");
  const int b_count = real_answers(shape.bob_outcomes, g.b_count(), "bob");

  const std::vector<double> table = ensemble_table(p, shape);
  ZeroCommRunResult result;
  result.outcomes = make_box(shape.x_count, shape.y_count, a_count, b_count);
  std::size_t cell = 0;
  for (int x = 0; x < shape.x_count; ++x)
    for (int y = 0; y < shape.y_count; ++y) {
      const double pi = to_double(g.prob(x, y));
      for (int a = 0; a < shape.alice_outcomes; ++a)
        for (int b = 0; b < shape.bob_outcomes; ++b, ++cell) {
          const double value = table[cell];
          const bool aborted = a >= a_count || b >= b_count;
          result.outcomes.at(x, y, a >= a_count ? 0 : a,
                             b >= b_count ? 0 : b) += value;
          if (aborted) {
            result.abort_mass += pi * value;
          } else if (g.accepts(x, y, a, b)) {
            result.success += pi * value;
          }
        }
    }
  return result;
}

// ---------------------------------------------------------------------------
// Transcript guessing for teleported protocols
// ---------------------------------------------------------------------------

namespace {

// One party's view of the teleported register: the qubits it holds, shared
// (entangled-with-the-partner) halves first in pairing order, ancillas after.
// Pairing order is original EPR pairs by index, then one fresh pair per
// message round, so both parties' shared lists line up and the joint shared
// state is the canonical maximally entangled state on 2^shared dimensions.
struct PartyLayout {
  std::vector<int> qubits;  // global ids, shared halves then ancillas
  int shared = 0;
  std::vector<int> local;  // global id -> local index, -1 elsewhere

  int total() const { return static_cast<int>(qubits.size()); }
};

PartyLayout party_layout(const QuantumProtocol& p, int party) {
  const int rounds = static_cast<int>(p.rounds.size());
  const int slot0 = p.alice_qubits + p.bob_qubits;
  const int first_speaker = rounds == 0 ? 0 : p.rounds.front().speaker;
  const int base = party == 0 ? 0 : p.alice_qubits;
  const int locals = party == 0 ? p.alice_qubits : p.bob_qubits;

  PartyLayout lay;
  for (int k = 0; k < p.epr_pairs; ++k) lay.qubits.push_back(base + k);
  for (int k = 0; k < rounds; ++k) {
    const int speaker_half = slot0 + 1 + 2 * k;
    const int receiver_half = slot0 + 2 + 2 * k;
    lay.qubits.push_back(
        p.rounds[static_cast<std::size_t>(k)].speaker == party
            ? speaker_half
            : receiver_half);
  }
  lay.shared = static_cast<int>(lay.qubits.size());
  for (int k = p.epr_pairs; k < locals; ++k) lay.qubits.push_back(base + k);
  if (first_speaker == party) lay.qubits.push_back(slot0);

  lay.local.assign(static_cast<std::size_t>(slot0 + 1 + 2 * rounds), -1);
  for (int i = 0; i < lay.total(); ++i) {
    lay.local[static_cast<std::size_t>(lay.qubits[static_cast<std::size_t>(
        i)])] = i;
  }
  return lay;
}

// Measurement family (answers plus one trailing abort element) on the shared
// halves alone, for the party running its teleported-circuit side under
// guessed Bell outcomes `g` (two bits per round, round k at bits 2k and
// 2k+1).  Element (i,j) is <w_i| Pi |w_j> for circuit images w_i of the
// shared basis, making each element a Gram matrix and the family a POVM.
std::vector<CMat> compile_guess_family(const QuantumProtocol& p,
                                       const PartyLayout& lay, int party,
                                       int input, long g) {
  const int rounds = static_cast<int>(p.rounds.size());
  const int slot0 = p.alice_qubits + p.bob_qubits;
  const int first_speaker = rounds == 0 ? 0 : p.rounds.front().speaker;
  const int base = party == 0 ? 0 : p.alice_qubits;
  const int locals = party == 0 ? p.alice_qubits : p.bob_qubits;
  const int nloc = lay.total();
  const int ancillas = nloc - lay.shared;
  const Eigen::Index shared_dim = Eigen::Index{1} << lay.shared;

  struct Op {
    CMat op;
    std::vector<int> qubits;
  };
  std::vector<Op> ops;
  std::vector<int> measured;  // consumed gadget qubits, in order
  int expected_bits = 0;

  int slot = first_speaker == party ? lay.local[static_cast<std::size_t>(
                                          slot0)]
                                    : -1;
  for (int k = 0; k < rounds; ++k) {
    const QuantumRound& round = p.rounds[static_cast<std::size_t>(k)];
    const int z = static_cast<int>((g >> (2 * k)) & 1);
    const int xb = static_cast<int>((g >> (2 * k + 1)) & 1);
    if (round.speaker == party) {
      const int fresh = lay.local[static_cast<std::size_t>(slot0 + 1 + 2 * k)];
      std::vector<int> acted;
      for (int q = 0; q < locals; ++q) {
        acted.push_back(lay.local[static_cast<std::size_t>(base + q)]);
      }
      acted.push_back(slot);
      ops.push_back(
          {round.unitaries[static_cast<std::size_t>(input)], acted});
      ops.push_back({cnot(), {slot, fresh}});
      ops.push_back({hadamard(), {slot}});
      measured.push_back(slot);
      expected_bits = (expected_bits << 1) | z;
      measured.push_back(fresh);
      expected_bits = (expected_bits << 1) | xb;
      slot = -1;
    } else {
      const int mine = lay.local[static_cast<std::size_t>(slot0 + 2 + 2 * k)];
      ops.push_back({pauli_correction(z, xb), {mine}});
      slot = mine;
    }
  }

  const int holder = rounds == 0 ? -1 : 1 - p.rounds.back().speaker;
  std::vector<int> answer_qubits;
  for (int q = 0; q < locals; ++q) {
    answer_qubits.push_back(lay.local[static_cast<std::size_t>(base + q)]);
  }
  if (holder == party) answer_qubits.push_back(slot);

  std::vector<CVec> images(static_cast<std::size_t>(shared_dim));
  for (Eigen::Index s = 0; s < shared_dim; ++s) {
    CVec v = CVec::Zero(Eigen::Index{1} << nloc);
    v(s << ancillas) = 1.0;
    for (const Op& op : ops) apply_to_qubits(v, op.op, op.qubits, nloc);
    images[static_cast<std::size_t>(s)] = std::move(v);
  }

  const auto& source_family =
      party == 0 ? p.alice_measurement[static_cast<std::size_t>(input)]
                 : p.bob_measurement[static_cast<std::size_t>(input)];
  std::vector<CMat> family;
  family.reserve(source_family.size() + 1);
  CMat accumulated = CMat::Zero(shared_dim, shared_dim);
  std::vector<CVec> projected(static_cast<std::size_t>(shared_dim));
  for (const CMat& answer_projector : source_family) {
    for (Eigen::Index s = 0; s < shared_dim; ++s) {
      CVec v = images[static_cast<std::size_t>(s)];
      apply_to_qubits(v, answer_projector, answer_qubits, nloc);
      if (!measured.empty()) project_qubits(v, measured, expected_bits, nloc);
      projected[static_cast<std::size_t>(s)] = std::move(v);
    }
    CMat element(shared_dim, shared_dim);
    for (Eigen::Index i = 0; i < shared_dim; ++i)
      for (Eigen::Index j = 0; j < shared_dim; ++j) {
        element(i, j) = projected[static_cast<std::size_t>(i)].dot(
            projected[static_cast<std::size_t>(j)]);
      }
    element = hermitize(element);
    accumulated += element;
    family.push_back(std::move(element));
  }
  family.push_back(hermitize(
      CMat::Identity(shared_dim, shared_dim) - accumulated));
  return family;
}

}  // namespace

ZeroCommProtocol guess_transform(const TeleportedProtocol& tp) {
  const QuantumProtocol& p = tp.source;
  validate_protocol(p);
  const int rounds = static_cast<int>(p.rounds.size());
  const int m = p.epr_pairs + rounds;
  const long guesses = 1L << (2 * rounds);
  const PartyLayout alice = party_layout(p, 0);
  const PartyLayout bob = party_layout(p, 1);

  ZeroCommProtocol out;
  out.epr_pairs = m;
  out.weights.reserve(static_cast<std::size_t>(guesses));
  out.parts.reserve(static_cast<std::size_t>(guesses));
  for (long g = 0; g < guesses; ++g) {
    QuantumStrategy s;
    s.d_a = s.d_b = 1 << m;
    s.state = max_entangled_state(1 << m);
    s.alice.reserve(static_cast<std::size_t>(p.x_count));
    for (int x = 0; x < p.x_count; ++x) {
      s.alice.push_back(compile_guess_family(p, alice, 0, x, g));
    }
    s.bob.reserve(static_cast<std::size_t>(p.y_count));
    for (int y = 0; y < p.y_count; ++y) {
      s.bob.push_back(compile_guess_family(p, bob, 1, y, g));
    }
    out.weights.push_back(make_rational(1, guesses));
    out.parts.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entanglement removal
// ---------------------------------------------------------------------------

DepolarizeReport depolarize_entanglement(const ZeroCommProtocol& p) {
  validate_protocol(p);
  if (p.epr_pairs < 0) {
    fail(ErrorCode::UnsupportedSharedState,
         "entanglement removal needs a declared canonical EPR-pair state");
  }
  if (p.epr_pairs > kMaxDepolarizePairs) {
    fail(ErrorCode::InvalidSizeParameter,
         "entanglement removal supports at most " +
             std::to_string(kMaxDepolarizePairs) + " EPR pairs");
  }
  DepolarizeReport report;
  report.decomposition_residual = 0.0;
  if (p.epr_pairs == 0) {
    report.protocol = p;
    return report;
  }

  const int d = 1 << p.epr_pairs;
  const Eigen::Index joint = static_cast<Eigen::Index>(d) * d;
  const double inv = 1.0 / static_cast<double>(joint);

  // Self-check of the exact mixture the replacement realizes:
  //   I/d^2 = 4^-m |EPR><EPR| + (1 - 4^-m) rho,   rho = (I - proj)/(d^2 - 1).
  {
    const CVec epr = max_entangled_state(d);
    const CMat proj = epr * epr.adjoint();
    const CMat identity = CMat::Identity(joint, joint);
    const CMat rho = (identity - proj) / static_cast<double>(joint - 1);
    const CMat residual =
        identity * inv - inv * proj - (1.0 - inv) * rho;
    report.decomposition_residual = residual.cwiseAbs().maxCoeff();
  }

  ZeroCommProtocol out;
  out.epr_pairs = -1;  // product states left; no canonical pairs remain
  const Rational split = make_rational(1, joint);
  for (std::size_t part = 0; part < p.parts.size(); ++part) {
    for (Eigen::Index basis = 0; basis < joint; ++basis) {
      QuantumStrategy s = p.parts[part];
      s.state = CVec::Zero(joint);
      s.state(basis) = 1.0;
      out.weights.push_back(p.weights[part] * split);
      out.parts.push_back(std::move(s));
    }
  }
  report.protocol = std::move(out);
  return report;
}

// ---------------------------------------------------------------------------
// Deterministic rounding
// ---------------------------------------------------------------------------

ArgmaxSimulationResult argmax_function_simulation(const ZeroCommProtocol& p,
                                                  const Game& scoring) {
  validate_protocol(p);
  const EnsembleShape shape = ensemble_shape(p);
  if (shape.x_count != scoring.x_count() ||
      shape.y_count != scoring.y_count()) {
    fail(ErrorCode::ShapeMismatch,
         "protocol question sets do not match the game");
  }
  const int a_count = real_answers(shape.alice_outcomes, scoring.a_count(),
                                   "alice");
  const int b_count = real_answers(shape.bob_outcomes, scoring.b_count(),
                                   "bob");
  const std::vector<double> table = ensemble_table(p, shape);
  auto cell = [&](int x, int y, int a, int b) {
    return table[((static_cast<std::size_t>(x) * shape.y_count + y) *
                      shape.alice_outcomes +
                  a) *
                     shape.bob_outcomes +
                 b];
  };

  ArgmaxSimulationResult result;
  // Output marginals, checked against dependence on the partner's question.
  std::vector<double> alice_marginal(
      static_cast<std::size_t>(shape.x_count) * shape.alice_outcomes, 0.0);
  std::vector<double> bob_marginal(
      static_cast<std::size_t>(shape.y_count) * shape.bob_outcomes, 0.0);
  for (int x = 0; x < shape.x_count; ++x)
    for (int a = 0; a < shape.alice_outcomes; ++a) {
      double reference = 0.0;
      for (int b = 0; b < shape.bob_outcomes; ++b) reference += cell(x, 0, a, b);
      alice_marginal[static_cast<std::size_t>(x) * shape.alice_outcomes + a] =
          reference;
      for (int y = 1; y < shape.y_count; ++y) {
        double other = 0.0;
        for (int b = 0; b < shape.bob_outcomes; ++b) other += cell(x, y, a, b);
        result.worst_marginal_dependence = std::max(
            result.worst_marginal_dependence, std::abs(other - reference));
      }
    }
  for (int y = 0; y < shape.y_count; ++y)
    for (int b = 0; b < shape.bob_outcomes; ++b) {
      double reference = 0.0;
      for (int a = 0; a < shape.alice_outcomes; ++a) reference += cell(0, y, a, b);
      bob_marginal[static_cast<std::size_t>(y) * shape.bob_outcomes + b] =
          reference;
      for (int x = 1; x < shape.x_count; ++x) {
        double other = 0.0;
        for (int a = 0; a < shape.alice_outcomes; ++a) other += cell(x, y, a, b);
        result.worst_marginal_dependence = std::max(
            result.worst_marginal_dependence, std::abs(other - reference));
      }
    }
  if (result.worst_marginal_dependence > kMarginalTol) {
    fail(ErrorCode::InvalidArgument,
         "a party's output marginal depends on the partner's question");
  }

  // Mode of each party's marginal over real answers, lowest index on ties;
  // near-ties are additionally reported.
  auto pick_mode = [](const double* marginal, int count,
                      bool& ambiguous) {
    int best = 0;
    for (int i = 1; i < count; ++i) {
      if (marginal[i] > marginal[best] + kTieTol) best = i;
    }
    ambiguous = false;
    for (int i = 0; i < count; ++i) {
      if (i != best && marginal[i] >= marginal[best] - kTieTol) {
        ambiguous = true;
      }
    }
    return best;
  };
  result.strategy.alice.resize(static_cast<std::size_t>(shape.x_count));
  for (int x = 0; x < shape.x_count; ++x) {
    bool ambiguous = false;
    result.strategy.alice[static_cast<std::size_t>(x)] = pick_mode(
        &alice_marginal[static_cast<std::size_t>(x) * shape.alice_outcomes],
        a_count, ambiguous);
    if (ambiguous) result.ambiguous_alice.push_back(x);
  }
  result.strategy.bob.resize(static_cast<std::size_t>(shape.y_count));
  for (int y = 0; y < shape.y_count; ++y) {
    bool ambiguous = false;
    result.strategy.bob[static_cast<std::size_t>(y)] = pick_mode(
        &bob_marginal[static_cast<std::size_t>(y) * shape.bob_outcomes],
        b_count, ambiguous);
    if (ambiguous) result.ambiguous_bob.push_back(y);
  }
  result.success = to_double(evaluate_deterministic(scoring, result.strategy));
  return result;
}

}  // namespace nonlocal
