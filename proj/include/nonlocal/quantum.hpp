#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nonlocal/box.hpp"
#include "nonlocal/game.hpp"
#include "nonlocal/linalg.hpp"
#include "nonlocal/strategy.hpp"

namespace nonlocal {

inline constexpr int kMaxRepeatDimension = 1 << 12;

// Finite-dimensional entangled strategy: a shared pure state on d_a * d_b
// (Alice's factor most significant) plus one measurement family per question.
// alice[x][a] is Alice's POVM element for answer a to question x; bob[y][b]
// likewise.  Zero operators are fine, so answer sets may exceed the local
// dimension.
struct QuantumStrategy {
  CVec state;
  int d_a = 0;
  int d_b = 0;
  std::vector<std::vector<CMat>> alice;
  std::vector<std::vector<CMat>> bob;
};

// Shape and sanity checks: unit state, operator dimensions, PSD elements,
// each family summing to the identity.  Throws on the first violation.
void validate_strategy(const QuantumStrategy& s, double tol = kMeasurementTol);

// Same, plus question/answer counts must match the game.
void validate_strategy(const QuantumStrategy& s, const Game& game,
                       double tol = kMeasurementTol);

// <psi| M_a^x tensor N_b^y |psi> for every cell.
Box correlation_table(const QuantumStrategy& s);
// Same table, with the strategy's shape checked against the game first.
Box correlation_table(const QuantumStrategy& s, const Game& game);

// Expected winning probability of the strategy; validates first.
double winning_probability(const Game& game, const QuantumStrategy& s);

// A deterministic strategy embedded in dimension 1 (every measurement element
// is the scalar 1 or 0); winning_probability then equals the exact classical
// payoff of the underlying strategy.
QuantumStrategy embed_deterministic(const Game& game,
                                    const DeterministicStrategy& s);

// Optimal entangled strategy for the binary xor game on two questions per
// side: measurements Z, X against (Z+X)/sqrt2, (Z-X)/sqrt2 on a singlet-free
// maximally entangled pair; wins with probability (2+sqrt2)/4.
QuantumStrategy chsh_optimal_strategy();

// The 3x3 operator-grid strategy on two maximally entangled qubit pairs that
// wins the parity game perfectly.  Alice measures the joint eigenbasis of a
// row's commuting observables, Bob of a column's.
QuantumStrategy mermin_peres_strategy();

// Tensor-power strategy for the repeated game: product state, product
// measurements, first copy most significant.  Rejects composite local
// dimensions above dim_cap.
QuantumStrategy strategy_parallel_repeat(const QuantumStrategy& s, int copies,
                                         int dim_cap = kMaxRepeatDimension);

// ---- one-way communication protocols and their entangled simulation -------

// Prover-to-verifier protocol: Alice prepares q qubits via alice_unitaries[x]
// acting on |0...0>, sends them, Bob applies bob_unitaries[y] and measures in
// the computational basis.
struct OneWayProtocol {
  int qubits = 0;
  std::vector<CMat> alice_unitaries;
  std::vector<CMat> bob_unitaries;
};

void validate_oneway(const OneWayProtocol& p);

// Entanglement-for-communication trade: with a maximally entangled state in
// place of the channel, Alice measures her half in the basis carrying her
// unitary and Bob measures his in the basis carrying his.  The resulting
// table is P(k,l|x,y) = |(U_B(y) U_A(x))_{l,k}|^2 / 2^q: Bob's outcome l is
// distributed exactly as his protocol measurement conditioned on Alice's
// outcome k, and k is uniform.
Box ricochet_box(const OneWayProtocol& p);

// The same correlations as an explicit entangled strategy.  bob_output_map,
// when given, post-processes Bob's raw outcome l into the answer
// bob_output_map[y][l] (answers then range over b_count); Alice's answer is
// her raw outcome k.
QuantumStrategy ricochet_strategy(const OneWayProtocol& p);
QuantumStrategy ricochet_strategy(
    const OneWayProtocol& p, const std::vector<std::vector<int>>& bob_output_map,
    int b_count);

// One-way protocols for the built-in communication games.  Both send
// log2(n) qubits: the balanced-function protocol wins its promise game with
// certainty, the matching protocol (paired with hm_bob_output_map) wins the
// matching game with certainty.
OneWayProtocol dj_oneway_protocol(int n);
OneWayProtocol hm_oneway_protocol(int n);
std::vector<std::vector<int>> hm_bob_output_map(int n);

// ---- variational lower bound ----------------------------------------------

struct SeesawOptions {
  int d_a = 2;
  int d_b = 2;
  int sweeps = 200;
  int restarts = 10;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-12;  // sweep-to-sweep improvement below this means converged
  // Warm start: the first restart ascends from here instead of from a random
  // strategy (dimensions must then match d_a/d_b).
  std::optional<QuantumStrategy> init;
};

struct SeesawResult {
  double value = 0.0;
  QuantumStrategy strategy;
  bool converged = false;
  std::vector<double> history;  // value after each sweep of the best restart
};

// Alternating ascent over Alice's measurements, Bob's measurements, and the
// shared state.  Measurement updates do pairwise-exchange improvements that
// never decrease the objective; the state update jumps to the top eigenvector
// of the game operator.  Deterministic for a fixed seed; the best restart
// wins, earlier seed on ties.
SeesawResult seesaw_lower_bound(const Game& game, const SeesawOptions& options = {});

}  // namespace nonlocal
