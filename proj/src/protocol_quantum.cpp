#include "nonlocal/linalg.hpp"
#include "nonlocal/protocol.hpp"

namespace nonlocal {

namespace {

// Dense-state cap for protocol simulation, including the two extra qubits
// the teleportation gadget adds per message round.
constexpr int kMaxProtocolQubits = 16;

std::vector<int> index_range(int from, int count) {
  std::vector<int> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = from + i;
  return out;
}

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

// Entangles qubit pairs (a_k, b_k) of an all-zero register state.
void entangle_pairs(CVec& state, const std::vector<int>& a,
                    const std::vector<int>& b, int total) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    apply_to_qubits(state, hadamard(), {a[k]}, total);
    apply_to_qubits(state, cnot(), {a[k], b[k]}, total);
  }
}

int final_holder(const QuantumProtocol& p) {
  return p.rounds.empty() ? -1 : 1 - p.rounds.back().speaker;
}

void check_projective_family(const std::vector<CMat>& family, int answers,
                             Eigen::Index dim, const char* who) {
  if (family.size() != static_cast<std::size_t>(answers)) {
    fail(ErrorCode::InvalidArgument,
         std::string(who) + " measurement family has " +
             std::to_string(family.size()) + " outcomes, expected " +
             std::to_string(answers));
  }
  CMat sum = CMat::Zero(dim, dim);
  for (const CMat& m : family) {
    if (m.rows() != dim || m.cols() != dim) {
      fail(ErrorCode::InvalidArgument,
           std::string(who) + " projector is " + std::to_string(m.rows()) +
               "x" + std::to_string(m.cols()) + ", expected dimension " +
               std::to_string(dim));
    }
    if (!is_hermitian(m, kMeasurementTol) ||
        (m * m - m).cwiseAbs().maxCoeff() > kMeasurementTol) {
      fail(ErrorCode::InvalidMeasurement,
           std::string(who) + " measurement element is not a projector");
    }
    sum += m;
  }
  if ((sum - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff() >
      kMeasurementTol) {
    fail(ErrorCode::InvalidMeasurement,
         std::string(who) + " measurement family does not sum to identity");
  }
}

// Accumulates the joint answer distribution of local projective families
// applied to `state`, adding each cell's probability into `slice` (row-major
// a*b_count+b), and returns nothing; the state is untouched.
void accumulate_outcomes(const CVec& state,
                         const std::vector<CMat>& alice_family,
                         const std::vector<int>& alice_qubits,
                         const std::vector<CMat>& bob_family,
                         const std::vector<int>& bob_qubits, int total,
                         std::vector<double>& slice) {
  const std::size_t b_count = bob_family.size();
  for (std::size_t a = 0; a < alice_family.size(); ++a) {
    CVec after_alice = state;
    apply_to_qubits(after_alice, alice_family[a], alice_qubits, total);
    if (after_alice.squaredNorm() < 1e-30) continue;
    for (std::size_t b = 0; b < b_count; ++b) {
      CVec after_bob = after_alice;
      apply_to_qubits(after_bob, bob_family[b], bob_qubits, total);
      slice[a * b_count + b] += after_bob.squaredNorm();
    }
  }
}

void check_game_shape(int x_count, int y_count, int a_count, int b_count,
                      const Game& g) {
  if (x_count != g.x_count() || y_count != g.y_count() ||
      a_count != g.a_count() || b_count != g.b_count()) {
    fail(ErrorCode::ShapeMismatch,
         "protocol question/answer sets do not match the game");
  }
}

QuantumRunResult tabulate(int x_count, int y_count, int a_count, int b_count,
                          const Game& g,
                          const std::vector<std::vector<double>>& slices) {
  QuantumRunResult result;
  result.outcomes = make_box(x_count, y_count, a_count, b_count);
  for (int x = 0; x < x_count; ++x)
    for (int y = 0; y < y_count; ++y) {
      const auto& slice =
          slices[static_cast<std::size_t>(x) * y_count + y];
      const double pi = to_double(g.prob(x, y));
      for (int a = 0; a < a_count; ++a)
        for (int b = 0; b < b_count; ++b) {
          const double cell =
              slice[static_cast<std::size_t>(a) * b_count + b];
          result.outcomes.at(x, y, a, b) = cell;
          if (g.accepts(x, y, a, b)) result.success += pi * cell;
        }
    }
  return result;
}

}  // namespace

void validate_protocol(const QuantumProtocol& p) {
  if (p.x_count < 1 || p.y_count < 1 || p.a_count < 1 || p.b_count < 1) {
    fail(ErrorCode::InvalidArgument, "empty question or answer set");
  }
  if (p.alice_qubits < 1 || p.bob_qubits < 1) {
    fail(ErrorCode::InvalidArgument,
         "each party needs at least one local qubit");
  }
  if (p.epr_pairs < 0 || p.epr_pairs > std::min(p.alice_qubits, p.bob_qubits)) {
    fail(ErrorCode::InvalidArgument,
         "epr_pairs must fit inside both local registers");
  }
  const int rounds = static_cast<int>(p.rounds.size());
  if (p.qubit_budget != rounds) {
    fail(ErrorCode::BudgetViolation,
         "declared qubit budget " + std::to_string(p.qubit_budget) +
             " but " + std::to_string(rounds) + " message rounds");
  }
  if (p.alice_qubits + p.bob_qubits + 1 + 2 * rounds > kMaxProtocolQubits) {
    fail(ErrorCode::InvalidSizeParameter,
         "protocol register layout exceeds the simulation qubit cap");
  }
  for (int k = 0; k < rounds; ++k) {
    const QuantumRound& round = p.rounds[static_cast<std::size_t>(k)];
    if (round.speaker != 0 && round.speaker != 1) {
      fail(ErrorCode::InvalidArgument, "round speaker must be 0 or 1");
    }
    if (k > 0 &&
        round.speaker == p.rounds[static_cast<std::size_t>(k - 1)].speaker) {
      fail(ErrorCode::InvalidArgument,
           "message rounds must alternate speakers");
    }
    const int inputs = round.speaker == 0 ? p.x_count : p.y_count;
    const int locals = round.speaker == 0 ? p.alice_qubits : p.bob_qubits;
    const Eigen::Index dim = Eigen::Index{1} << (locals + 1);
    if (round.unitaries.size() != static_cast<std::size_t>(inputs)) {
      fail(ErrorCode::InvalidArgument,
           "round " + std::to_string(k) + " needs one unitary per input");
    }
    for (const CMat& u : round.unitaries) {
      if (u.rows() != dim || u.cols() != dim) {
        fail(ErrorCode::InvalidArgument,
             "round " + std::to_string(k) + " unitary has dimension " +
                 std::to_string(u.rows()) + ", expected " +
                 std::to_string(dim));
      }
      require_unitary(u, "message round unitary");
    }
  }
  const int holder = final_holder(p);
  const Eigen::Index alice_dim = Eigen::Index{1}
                                 << (p.alice_qubits + (holder == 0 ? 1 : 0));
  const Eigen::Index bob_dim = Eigen::Index{1}
                               << (p.bob_qubits + (holder == 1 ? 1 : 0));
  if (p.alice_measurement.size() != static_cast<std::size_t>(p.x_count) ||
      p.bob_measurement.size() != static_cast<std::size_t>(p.y_count)) {
    fail(ErrorCode::InvalidArgument,
         "expected one measurement family per question");
  }
  for (const auto& family : p.alice_measurement) {
    check_projective_family(family, p.a_count, alice_dim, "alice");
  }
  for (const auto& family : p.bob_measurement) {
    check_projective_family(family, p.b_count, bob_dim, "bob");
  }
}

QuantumRunResult run_protocol(const QuantumProtocol& p, const Game& g) {
  validate_protocol(p);
  check_game_shape(p.x_count, p.y_count, p.a_count, p.b_count, g);

  const int total = p.alice_qubits + p.bob_qubits + 1;
  const int message = total - 1;
  const std::vector<int> alice_locals = index_range(0, p.alice_qubits);
  const std::vector<int> bob_locals =
      index_range(p.alice_qubits, p.bob_qubits);
  const int holder = final_holder(p);
  std::vector<int> alice_measured = alice_locals;
  if (holder == 0) alice_measured.push_back(message);
  std::vector<int> bob_measured = bob_locals;
  if (holder == 1) bob_measured.push_back(message);

  CVec initial = CVec::Zero(Eigen::Index{1} << total);
  initial(0) = 1.0;
  entangle_pairs(initial, index_range(0, p.epr_pairs),
                 index_range(p.alice_qubits, p.epr_pairs), total);

  std::vector<std::vector<double>> slices(
      static_cast<std::size_t>(p.x_count) * p.y_count,
      std::vector<double>(static_cast<std::size_t>(p.a_count) * p.b_count,
                          0.0));
  for (int x = 0; x < p.x_count; ++x) {
    for (int y = 0; y < p.y_count; ++y) {
      CVec state = initial;
      for (const QuantumRound& round : p.rounds) {
        std::vector<int> acted =
            round.speaker == 0 ? alice_locals : bob_locals;
        acted.push_back(message);
        apply_to_qubits(
            state,
            round.unitaries[static_cast<std::size_t>(round.speaker == 0 ? x
                                                                        : y)],
            acted, total);
      }
      accumulate_outcomes(
          state, p.alice_measurement[static_cast<std::size_t>(x)],
          alice_measured, p.bob_measurement[static_cast<std::size_t>(y)],
          bob_measured, total,
          slices[static_cast<std::size_t>(x) * p.y_count + y]);
    }
  }
  return tabulate(p.x_count, p.y_count, p.a_count, p.b_count, g, slices);
}

TeleportedProtocol teleport_transform(const QuantumProtocol& p) {
  validate_protocol(p);
  TeleportedProtocol out;
  out.source = p;
  out.classical_bits = 2 * static_cast<int>(p.rounds.size());
  out.epr_pairs = p.epr_pairs + static_cast<int>(p.rounds.size());
  return out;
}

QuantumRunResult run_protocol(const TeleportedProtocol& tp, const Game& g) {
  const QuantumProtocol& p = tp.source;
  validate_protocol(p);
  check_game_shape(p.x_count, p.y_count, p.a_count, p.b_count, g);

  const int rounds = static_cast<int>(p.rounds.size());
  // Layout: Alice locals, Bob locals, the first speaker's initial message
  // slot, then one fresh pair (speaker half, receiver half) per round.
  const int slot0 = p.alice_qubits + p.bob_qubits;
  const int total = slot0 + 1 + 2 * rounds;
  const std::vector<int> alice_locals = index_range(0, p.alice_qubits);
  const std::vector<int> bob_locals =
      index_range(p.alice_qubits, p.bob_qubits);
  const int holder = final_holder(p);

  CVec initial = CVec::Zero(Eigen::Index{1} << total);
  initial(0) = 1.0;
  entangle_pairs(initial, index_range(0, p.epr_pairs),
                 index_range(p.alice_qubits, p.epr_pairs), total);
  {
    std::vector<int> speaker_halves, receiver_halves;
    for (int k = 0; k < rounds; ++k) {
      speaker_halves.push_back(slot0 + 1 + 2 * k);
      receiver_halves.push_back(slot0 + 2 + 2 * k);
    }
    entangle_pairs(initial, speaker_halves, receiver_halves, total);
  }

  std::vector<std::vector<double>> slices(
      static_cast<std::size_t>(p.x_count) * p.y_count,
      std::vector<double>(static_cast<std::size_t>(p.a_count) * p.b_count,
                          0.0));
  for (int x = 0; x < p.x_count; ++x) {
    for (int y = 0; y < p.y_count; ++y) {
      auto& slice = slices[static_cast<std::size_t>(x) * p.y_count + y];
      // Depth-first over the 4^rounds unnormalized measurement branches.
      auto descend = [&](auto&& self, const CVec& state, int k, int slot_alice,
                         int slot_bob) -> void {
        if (k == rounds) {
          std::vector<int> alice_measured = alice_locals;
          if (holder == 0) alice_measured.push_back(slot_alice);
          std::vector<int> bob_measured = bob_locals;
          if (holder == 1) bob_measured.push_back(slot_bob);
          accumulate_outcomes(
              state, p.alice_measurement[static_cast<std::size_t>(x)],
              alice_measured, p.bob_measurement[static_cast<std::size_t>(y)],
              bob_measured, total, slice);
          return;
        }
        const QuantumRound& round = p.rounds[static_cast<std::size_t>(k)];
        const bool alice_speaks = round.speaker == 0;
        const int slot = alice_speaks ? slot_alice : slot_bob;
        const int speaker_half = slot0 + 1 + 2 * k;
        const int receiver_half = slot0 + 2 + 2 * k;

        CVec state_sent = state;
        std::vector<int> acted = alice_speaks ? alice_locals : bob_locals;
        acted.push_back(slot);
        apply_to_qubits(
            state_sent,
            round.unitaries[static_cast<std::size_t>(alice_speaks ? x : y)],
            acted, total);
        // Bell measurement of (slot, fresh speaker half).
        apply_to_qubits(state_sent, cnot(), {slot, speaker_half}, total);
        apply_to_qubits(state_sent, hadamard(), {slot}, total);
        for (int z = 0; z < 2; ++z) {
          for (int xb = 0; xb < 2; ++xb) {
            CVec branch = state_sent;
            project_qubits(branch, {slot, speaker_half}, (z << 1) | xb,
                           total);
            if (branch.squaredNorm() < 1e-30) continue;
            apply_to_qubits(branch, pauli_correction(z, xb), {receiver_half},
                            total);
            self(self, branch, k + 1,
                 alice_speaks ? -1 : receiver_half,
                 alice_speaks ? receiver_half : -1);
          }
        }
      };
      const int first_speaker = rounds == 0 ? 0 : p.rounds.front().speaker;
      descend(descend, initial, 0, first_speaker == 0 ? slot0 : -1,
              first_speaker == 1 ? slot0 : -1);
    }
  }
  return tabulate(p.x_count, p.y_count, p.a_count, p.b_count, g, slices);
}

QuantumProtocol chsh_send_x_quantum_protocol() {
  QuantumProtocol p;
  p.x_count = p.y_count = p.a_count = p.b_count = 2;
  p.alice_qubits = p.bob_qubits = 1;
  p.epr_pairs = 0;
  p.qubit_budget = 1;

  CMat flip_message = CMat::Zero(4, 4);
  flip_message(0, 1) = flip_message(1, 0) = 1;
  flip_message(2, 3) = flip_message(3, 2) = 1;
  QuantumRound round;
  round.speaker = 0;
  round.unitaries = {CMat::Identity(4, 4), flip_message};
  p.rounds.push_back(std::move(round));

  // Alice always answers 0; Bob reads the message out only when y = 1.
  p.alice_measurement.assign(
      2, {CMat::Identity(2, 2), CMat::Zero(2, 2)});
  CMat read0 = CMat::Zero(4, 4), read1 = CMat::Zero(4, 4);
  read0(0, 0) = read0(2, 2) = 1;
  read1(1, 1) = read1(3, 3) = 1;
  p.bob_measurement = {{CMat::Identity(4, 4), CMat::Zero(4, 4)},
                       {read0, read1}};
  return p;
}

}  // namespace nonlocal
