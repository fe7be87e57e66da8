#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nonlocal/box.hpp"
#include "nonlocal/game.hpp"
#include "nonlocal/quantum.hpp"
#include "nonlocal/strategy.hpp"

namespace nonlocal {

// ---------------------------------------------------------------------------
// Classical interactive protocols
// ---------------------------------------------------------------------------

// Fixed-schedule two-party protocol with shared randomness.  Exactly one bit
// is sent per round; transcripts are encoded with the round-t bit at bit
// position t, so "transcript so far" before round t is an integer below 2^t.
struct ClassicalProtocol {
  int x_count = 0, y_count = 0;  // question set sizes
  int a_count = 0, b_count = 0;  // answer set sizes
  std::vector<Rational> randomness;  // shared distribution over r
  std::vector<int> speakers;         // per round: 0 = Alice, 1 = Bob
  // next_bit[t] belongs to the round-t speaker and is indexed
  // (input * |R| + r) * 2^t + transcript_prefix; entries are 0/1.
  std::vector<std::vector<std::uint8_t>> next_bit;
  // Answer tables indexed (input * |R| + r) * 2^c + transcript; -1 aborts
  // (the aborting party then emits answer 0 and the run counts as a loss).
  std::vector<int> alice_output;
  std::vector<int> bob_output;

  int bits() const { return static_cast<int>(speakers.size()); }
};

// Structural checks; throws InvalidArgument / BudgetViolation.
void validate_protocol(const ClassicalProtocol& p);

struct ClassicalRunResult {
  Rational success;     // Pr[win and nobody aborted]
  Rational abort_mass;  // Pr[at least one party aborted]
  Box outcomes;         // P(a, b | x, y) with abort answers folded to 0
};

// Exact execution against a game (rational arithmetic throughout); answer
// set sizes must match the game's.
ClassicalRunResult run_protocol(const ClassicalProtocol& p, const Game& g);

// Communication removal by transcript guessing: the parties share c extra
// uniform bits read as a guessed transcript, each verifies the rounds it
// would have spoken and aborts on any mismatch.  The result is a 0-bit
// protocol satisfying, exactly, Pr[no abort] = 2^-c and
// Pr[win and no abort] = 2^-c * success(p).
ClassicalProtocol transcript_guess_transform(const ClassicalProtocol& p);

// Two-bit protocol winning the xor game with certainty: Alice announces x,
// Bob pads the second round, Alice answers 0, Bob answers x AND y.
ClassicalProtocol chsh_send_x_protocol();

// ---------------------------------------------------------------------------
// Quantum protocols with a one-qubit message register
// ---------------------------------------------------------------------------

struct QuantumRound {
  int speaker = 0;              // 0 = Alice, 1 = Bob
  std::vector<CMat> unitaries;  // one per speaker input, acting on the
                                // speaker's local qubits plus the message
};

// One-qubit-message interactive protocol.  Qubit layout of the simulation:
// Alice's locals, then Bob's locals, then the message qubit; Alice local k
// is entangled with Bob local k for k < epr_pairs, everything else starts
// |0>.  Speakers must strictly alternate and the declared qubit budget must
// equal the round count.  The final holder of the message register is the
// recipient of the last round; that party's measurement families act on its
// locals plus the message, the other party's on its locals alone.
struct QuantumProtocol {
  int x_count = 0, y_count = 0;
  int a_count = 0, b_count = 0;
  int alice_qubits = 1, bob_qubits = 1;
  int epr_pairs = 0;
  int qubit_budget = 0;
  std::vector<QuantumRound> rounds;
  std::vector<std::vector<CMat>> alice_measurement;  // [x][answer] projectors
  std::vector<std::vector<CMat>> bob_measurement;    // [y][answer] projectors
};

// Structural checks; throws InvalidArgument / NonUnitary / InvalidMeasurement
// / BudgetViolation.
void validate_protocol(const QuantumProtocol& p);

struct QuantumRunResult {
  double success = 0.0;
  Box outcomes;
};

QuantumRunResult run_protocol(const QuantumProtocol& p, const Game& g);

// Teleportation replacement of every qubit message: the message round's
// qubit is consumed by a Bell measurement against a fresh shared pair, two
// classical bits travel instead, and the receiver applies the conditional
// Pauli correction.  Outcome distributions are preserved exactly (up to
// simulation roundoff) while communication becomes classical.
struct TeleportedProtocol {
  QuantumProtocol source;  // drives the gadget; not run as-is
  int classical_bits = 0;  // 2 per original qubit message
  int epr_pairs = 0;       // source pairs plus one per message
};

TeleportedProtocol teleport_transform(const QuantumProtocol& p);

QuantumRunResult run_protocol(const TeleportedProtocol& p, const Game& g);

// ---------------------------------------------------------------------------
// Zero-communication protocols
// ---------------------------------------------------------------------------

// Ensemble of quantum strategies played under shared classical randomness.
// A measurement family may carry one extra trailing element: the abort
// outcome, which counts as a loss (and is reported as answer 0 in tables).
struct ZeroCommProtocol {
  std::vector<Rational> weights;
  std::vector<QuantumStrategy> parts;
  // >= 0 when every part's shared state is exactly that many canonical EPR
  // pairs (coefficient matrix proportional to the identity); -1 otherwise.
  int epr_pairs = -1;
};

// Wraps a plain strategy, detecting the EPR-pair structure of its state.
ZeroCommProtocol zerocomm_from_strategy(const QuantumStrategy& s);

void validate_protocol(const ZeroCommProtocol& p);

struct ZeroCommRunResult {
  double success = 0.0;
  double abort_mass = 0.0;
  Box outcomes;  // abort outcomes folded into answer 0
};

ZeroCommRunResult run_protocol(const ZeroCommProtocol& p, const Game& g);

// Communication removal for a teleported protocol: the 2c classical bits are
// guessed from shared randomness; each party runs its local circuit under
// the guess, verifying its own Bell-measurement outcomes and aborting on
// mismatch.  Everything each party does is local, so each guess compiles to
// measurement families (with an abort element) on the shared EPR pairs, and
// the result is an exact zero-communication ensemble with
// Pr[win and no abort] = 2^-2c * success(p).
ZeroCommProtocol guess_transform(const TeleportedProtocol& p);

// Entanglement removal: the declared EPR pairs are replaced by independent
// maximally mixed registers, realized exactly as the uniform ensemble of
// computational product states.  Guarantees
//   success_new >= 4^-m * success_old,
// with equality exactly when the EPR-orthogonal residual never wins.
struct DepolarizeReport {
  ZeroCommProtocol protocol;      // product-state ensemble; no canonical
                                  // pairs remain, so epr_pairs = -1
  double decomposition_residual;  // max-norm self-check of the identity
                                  // I/4^m = 4^-m EPR + (1-4^-m) rho
};

DepolarizeReport depolarize_entanglement(const ZeroCommProtocol& p);

// Deterministic rounding of a zero-communication protocol: each party
// answers the mode of its own output marginal (which cannot depend on the
// other party's question; this is verified).  Near-ties within 1e-9 are
// reported and broken toward the lowest answer index.
struct ArgmaxSimulationResult {
  DeterministicStrategy strategy;
  double success = 0.0;  // of the rounded strategy under `scoring`
  double worst_marginal_dependence = 0.0;
  std::vector<int> ambiguous_alice;
  std::vector<int> ambiguous_bob;
};

ArgmaxSimulationResult argmax_function_simulation(const ZeroCommProtocol& p,
                                                  const Game& scoring);

// One-qubit protocol winning the xor game with certainty: Alice encodes x
// into the message qubit, Bob reads it out only when y = 1.
QuantumProtocol chsh_send_x_quantum_protocol();

// ---------------------------------------------------------------------------
// Reduction pipeline
// ---------------------------------------------------------------------------

using ProtocolVariant = std::variant<ClassicalProtocol, QuantumProtocol,
                                     TeleportedProtocol, ZeroCommProtocol>;

struct PipelineStage {
  std::string name;           // "initial" or the stage that produced the row
  std::string communication;  // human-readable budget, e.g. "1 qubit"
  int epr_pairs = 0;          // -1 when the shared state is unstructured
  double success = 0.0;
  double abort_mass = 0.0;
};

// Applies the named stages ("teleport", "guess", "depolarize", "argmax") in
// order, re-running the protocol against the game after each, and returns
// one row per stage plus the initial row.  Invalid stage/kind combinations
// throw InvalidArgument.
std::vector<PipelineStage> run_reduction_pipeline(
    const ProtocolVariant& start, const Game& g,
    const std::vector<std::string>& stages);

// ---------------------------------------------------------------------------
// Protocol files
// ---------------------------------------------------------------------------

// JSON with a "kind" discriminator: classical, quantum, or zerocomm
// (teleported protocols are derived, not stored).
std::string protocol_to_json(const ProtocolVariant& p);
ProtocolVariant protocol_from_json(const std::string& text);
ProtocolVariant load_protocol(const std::string& path);
void save_protocol(const ProtocolVariant& p, const std::string& path);

// Parses "chsh-send-x" or "chsh-send-x-quantum"; used by the CLI alongside
// protocol files.
ProtocolVariant builtin_protocol(const std::string& spec);

}  // namespace nonlocal
