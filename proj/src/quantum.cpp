#include "nonlocal/quantum.hpp"

#include <cmath>
#include <string>

namespace nonlocal {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

// View of the state as the d_a x d_b coefficient matrix Psi (row index =
// Alice's factor).  Then <psi| M tensor N |psi> = tr(Psi^dag M Psi N^T),
// and because N is Hermitian that trace is sum_ij (Psi^dag M Psi)_ij N_ij.
RowMajorMap coefficient_matrix(const QuantumStrategy& s) {
  return RowMajorMap(s.state.data(), s.d_a, s.d_b);
}

double cell_probability(const CMat& alice_side, const CMat& bob_op) {
  return alice_side.cwiseProduct(bob_op).sum().real();
}

void validate_family(const std::vector<CMat>& family, int dim, double tol,
                     const char* who, int question) {
  CMat sum = CMat::Zero(dim, dim);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const CMat& op = family[i];
    if (op.rows() != dim || op.cols() != dim) {
      fail(ErrorCode::DimensionMismatch,
           std::string(who) + " operator for question " +
               std::to_string(question) + ", answer " + std::to_string(i) +
               " has the wrong dimension");
    }
    if (!is_hermitian(op, tol) || min_eigenvalue(op) < -tol) {
      fail(ErrorCode::InvalidMeasurement,
           std::string(who) + " operator for question " +
               std::to_string(question) + ", answer " + std::to_string(i) +
               " is not positive semidefinite");
    }
    sum += op;
  }
  CMat delta = sum - CMat::Identity(dim, dim);
  if (delta.cwiseAbs().maxCoeff() > tol) {
    fail(ErrorCode::InvalidMeasurement,
         std::string(who) + " family for question " + std::to_string(question) +
             " does not sum to the identity");
  }
}

}  // namespace

void validate_strategy(const QuantumStrategy& s, double tol) {
  if (s.d_a < 1 || s.d_b < 1) {
    fail(ErrorCode::DimensionMismatch, "local dimensions must be positive");
  }
  if (s.state.size() != static_cast<Eigen::Index>(s.d_a) * s.d_b) {
    fail(ErrorCode::DimensionMismatch,
         "state length " + std::to_string(s.state.size()) +
             " does not equal d_a * d_b");
  }
  if (std::abs(s.state.norm() - 1.0) > tol) {
    fail(ErrorCode::InvalidMeasurement, "shared state is not normalized");
  }
  if (s.alice.empty() || s.bob.empty()) {
    fail(ErrorCode::ShapeMismatch, "strategy needs at least one question per side");
  }
  for (std::size_t x = 0; x < s.alice.size(); ++x) {
    validate_family(s.alice[x], s.d_a, tol, "alice", static_cast<int>(x));
  }
  for (std::size_t y = 0; y < s.bob.size(); ++y) {
    validate_family(s.bob[y], s.d_b, tol, "bob", static_cast<int>(y));
  }
}

void validate_strategy(const QuantumStrategy& s, const Game& game, double tol) {
  validate_strategy(s, tol);
  if (static_cast<int>(s.alice.size()) != game.x_count() ||
      static_cast<int>(s.bob.size()) != game.y_count()) {
    fail(ErrorCode::ShapeMismatch, "question counts do not match the game");
  }
  for (const auto& family : s.alice) {
    if (static_cast<int>(family.size()) != game.a_count()) {
      fail(ErrorCode::ShapeMismatch, "alice answer counts do not match the game");
    }
  }
  for (const auto& family : s.bob) {
    if (static_cast<int>(family.size()) != game.b_count()) {
      fail(ErrorCode::ShapeMismatch, "bob answer counts do not match the game");
    }
  }
}

Box correlation_table(const QuantumStrategy& s) {
  validate_strategy(s);
  int x_count = static_cast<int>(s.alice.size());
  int y_count = static_cast<int>(s.bob.size());
  int a_count = static_cast<int>(s.alice[0].size());
  int b_count = static_cast<int>(s.bob[0].size());
  Box box = make_box(x_count, y_count, a_count, b_count);
  auto psi = coefficient_matrix(s);
  for (int x = 0; x < x_count; ++x) {
    for (int a = 0; a < a_count; ++a) {
      CMat alice_side = psi.adjoint() * s.alice[x][a] * psi;
      for (int y = 0; y < y_count; ++y)
        for (int b = 0; b < b_count; ++b)
          box.at(x, y, a, b) = cell_probability(alice_side, s.bob[y][b]);
    }
  }
  return box;
}

Box correlation_table(const QuantumStrategy& s, const Game& game) {
  validate_strategy(s, game);
  return correlation_table(s);
}

double winning_probability(const Game& game, const QuantumStrategy& s) {
  validate_strategy(s, game);
  auto psi = coefficient_matrix(s);
  double total = 0.0;
  for (int x = 0; x < game.x_count(); ++x) {
    for (int a = 0; a < game.a_count(); ++a) {
      CMat alice_side = psi.adjoint() * s.alice[x][a] * psi;
      for (int y = 0; y < game.y_count(); ++y) {
        double pi = to_double(game.prob(x, y));
        if (pi == 0.0) continue;
        for (int b = 0; b < game.b_count(); ++b) {
          if (!game.accepts(x, y, a, b)) continue;
          total += pi * cell_probability(alice_side, s.bob[y][b]);
        }
      }
    }
  }
  // Roundoff may push the sum a hair outside [0, 1]; anything further out
  // would be a real bug, so only tiny excursions are clamped.
  if (total > 1.0 && total < 1.0 + 1e-9) total = 1.0;
  if (total < 0.0 && total > -1e-9) total = 0.0;
  return total;
}

QuantumStrategy embed_deterministic(const Game& game,
                                    const DeterministicStrategy& s) {
  if (static_cast<int>(s.alice.size()) != game.x_count() ||
      static_cast<int>(s.bob.size()) != game.y_count()) {
    fail(ErrorCode::StrategyShapeMismatch,
         "deterministic strategy shape does not match the game");
  }
  QuantumStrategy q;
  q.d_a = q.d_b = 1;
  q.state = CVec::Ones(1);
  q.alice.resize(s.alice.size());
  for (std::size_t x = 0; x < s.alice.size(); ++x) {
    q.alice[x].assign(static_cast<std::size_t>(game.a_count()),
                      CMat::Zero(1, 1));
    q.alice[x][static_cast<std::size_t>(s.alice[x])](0, 0) = 1.0;
  }
  q.bob.resize(s.bob.size());
  for (std::size_t y = 0; y < s.bob.size(); ++y) {
    q.bob[y].assign(static_cast<std::size_t>(game.b_count()), CMat::Zero(1, 1));
    q.bob[y][static_cast<std::size_t>(s.bob[y])](0, 0) = 1.0;
  }
  return q;
}

namespace {

CMat pauli_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMat pauli_y() {
  CMat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

CMat pauli_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Binary observable O with eigenvalues +-1: outcome bit m gets the projector
// (I + (1-2m) O) / 2.
CMat outcome_projector(const CMat& obs, int bit) {
  double sign = bit ? -1.0 : 1.0;
  return (CMat::Identity(obs.rows(), obs.cols()) + sign * obs) / 2.0;
}

}  // namespace

QuantumStrategy chsh_optimal_strategy() {
  const double invsqrt2 = 1.0 / std::sqrt(2.0);
  CMat z = pauli_z(), x = pauli_x();
  std::vector<CMat> alice_obs = {z, x};
  std::vector<CMat> bob_obs = {(z + x) * invsqrt2, (z - x) * invsqrt2};
  QuantumStrategy s;
  s.d_a = s.d_b = 2;
  s.state = max_entangled_state(2);
  for (const CMat& obs : alice_obs) {
    s.alice.push_back({outcome_projector(obs, 0), outcome_projector(obs, 1)});
  }
  for (const CMat& obs : bob_obs) {
    s.bob.push_back({outcome_projector(obs, 0), outcome_projector(obs, 1)});
  }
  return s;
}

QuantumStrategy mermin_peres_strategy() {
  CMat i2 = CMat::Identity(2, 2);
  CMat x = pauli_x(), y = pauli_y(), z = pauli_z();
  // grid[r][c]: observables of a 3x3 square where every row multiplies to +I,
  // every column to -I, and all entries are real symmetric -- so measuring a
  // shared entry on the canonical maximally entangled state gives perfectly
  // agreeing outcomes.
  CMat grid[3][3] = {
      {tensor(i2, z), tensor(z, i2), tensor(z, z)},
      {tensor(x, i2), tensor(i2, x), tensor(x, x)},
      {-tensor(x, z), -tensor(z, x), tensor(y, y)},
  };
  QuantumStrategy s;
  s.d_a = s.d_b = 4;
  s.state = max_entangled_state(4);
  s.alice.resize(3);
  s.bob.resize(3);
  for (int q = 0; q < 3; ++q) {
    s.alice[q].assign(8, CMat::Zero(4, 4));
    s.bob[q].assign(8, CMat::Zero(4, 4));
    for (int m0 = 0; m0 < 2; ++m0) {
      for (int m1 = 0; m1 < 2; ++m1) {
        // Alice's third entry is forced by the row product +I, Bob's by the
        // column product -I; the other answer indices keep zero operators.
        int alice_answer = m0 | (m1 << 1) | ((m0 ^ m1) << 2);
        int bob_answer = m0 | (m1 << 1) | ((1 ^ m0 ^ m1) << 2);
        s.alice[q][static_cast<std::size_t>(alice_answer)] =
            outcome_projector(grid[q][0], m0) * outcome_projector(grid[q][1], m1);
        s.bob[q][static_cast<std::size_t>(bob_answer)] =
            outcome_projector(grid[0][q], m0) * outcome_projector(grid[1][q], m1);
      }
    }
  }
  return s;
}

QuantumStrategy strategy_parallel_repeat(const QuantumStrategy& s, int copies,
                                         int dim_cap) {
  validate_strategy(s);
  if (copies < 1) {
    fail(ErrorCode::InvalidArgument, "copies must be at least 1");
  }
  double log_dim = copies * std::log2(static_cast<double>(
                                std::max(s.d_a, s.d_b)));
  if (log_dim > std::log2(static_cast<double>(dim_cap)) + 1e-9) {
    fail(ErrorCode::SizeBudgetExceeded,
         "repeated strategy dimension exceeds the cap of " +
             std::to_string(dim_cap));
  }
  QuantumStrategy out = s;
  for (int c = 1; c < copies; ++c) {
    QuantumStrategy next;
    next.d_a = out.d_a * s.d_a;
    next.d_b = out.d_b * s.d_b;
    // Tensoring the coefficient matrices keeps the index convention (Alice's
    // factors most significant on her side, likewise for Bob).
    RowMajorMap psi_out(out.state.data(), out.d_a, out.d_b);
    RowMajorMap psi_s(s.state.data(), s.d_a, s.d_b);
    CMat psi = tensor(psi_out, psi_s);
    next.state.resize(static_cast<Eigen::Index>(next.d_a) * next.d_b);
    for (int i = 0; i < next.d_a; ++i)
      for (int j = 0; j < next.d_b; ++j)
        next.state(static_cast<Eigen::Index>(i) * next.d_b + j) = psi(i, j);
    for (const auto& f1 : out.alice)
      for (const auto& f2 : s.alice) {
        std::vector<CMat> family;
        family.reserve(f1.size() * f2.size());
        for (const CMat& m1 : f1)
          for (const CMat& m2 : f2) family.push_back(tensor(m1, m2));
        next.alice.push_back(std::move(family));
      }
    for (const auto& f1 : out.bob)
      for (const auto& f2 : s.bob) {
        std::vector<CMat> family;
        family.reserve(f1.size() * f2.size());
        for (const CMat& n1 : f1)
          for (const CMat& n2 : f2) family.push_back(tensor(n1, n2));
        next.bob.push_back(std::move(family));
      }
    out = std::move(next);
  }
  return out;
}

// ---- one-way protocols ------------------------------------------------------

void validate_oneway(const OneWayProtocol& p) {
  if (p.qubits < 1 || p.qubits > 10) {
    fail(ErrorCode::InvalidSizeParameter,
         "one-way protocol must send between 1 and 10 qubits");
  }
  if (p.alice_unitaries.empty() || p.bob_unitaries.empty()) {
    fail(ErrorCode::ShapeMismatch, "protocol needs at least one input per side");
  }
  Eigen::Index dim = 1LL << p.qubits;
  for (const CMat& u : p.alice_unitaries) {
    if (u.rows() != dim || u.cols() != dim) {
      fail(ErrorCode::DimensionMismatch, "sender unitary has the wrong dimension");
    }
    require_unitary(u, "sender unitary");
  }
  for (const CMat& u : p.bob_unitaries) {
    if (u.rows() != dim || u.cols() != dim) {
      fail(ErrorCode::DimensionMismatch, "receiver unitary has the wrong dimension");
    }
    require_unitary(u, "receiver unitary");
  }
}

Box ricochet_box(const OneWayProtocol& p) {
  validate_oneway(p);
  int dim = 1 << p.qubits;
  Box box = make_box(static_cast<int>(p.alice_unitaries.size()),
                     static_cast<int>(p.bob_unitaries.size()), dim, dim);
  CVec shared = max_entangled_state(dim);
  for (int x = 0; x < box.x_count; ++x) {
    for (int y = 0; y < box.y_count; ++y) {
      // Alice rotates her half by U_A(x)^T (her measurement basis), Bob his
      // by U_B(y); computational-basis amplitudes of the rotated state are
      // the joint outcome amplitudes.
      CVec rotated =
          tensor(p.alice_unitaries[static_cast<std::size_t>(x)].transpose(),
                 p.bob_unitaries[static_cast<std::size_t>(y)]) *
          shared;
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          box.at(x, y, k, l) =
              std::norm(rotated(static_cast<Eigen::Index>(k) * dim + l));
    }
  }
  return box;
}

QuantumStrategy ricochet_strategy(const OneWayProtocol& p) {
  return ricochet_strategy(p, {}, 0);
}

QuantumStrategy ricochet_strategy(
    const OneWayProtocol& p, const std::vector<std::vector<int>>& bob_output_map,
    int b_count) {
  validate_oneway(p);
  int dim = 1 << p.qubits;
  bool mapped = !bob_output_map.empty();
  if (mapped) {
    if (bob_output_map.size() != p.bob_unitaries.size()) {
      fail(ErrorCode::ShapeMismatch,
           "output map must cover every receiver input");
    }
    for (const auto& row : bob_output_map) {
      if (static_cast<int>(row.size()) != dim) {
        fail(ErrorCode::ShapeMismatch,
             "output map row must cover every raw outcome");
      }
      for (int b : row) {
        if (b < 0 || b >= b_count) {
          fail(ErrorCode::InvalidArgument, "output map entry out of range");
        }
      }
    }
  } else {
    b_count = dim;
  }

  QuantumStrategy s;
  s.d_a = s.d_b = dim;
  s.state = max_entangled_state(dim);
  for (const CMat& u : p.alice_unitaries) {
    // Alice's outcome k corresponds to the vector conj(U_A)|k>: measuring it
    // against Bob's protocol measurement reproduces the channel statistics.
    CMat basis = u.conjugate();
    std::vector<CMat> family;
    family.reserve(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
      family.push_back(basis.col(k) * basis.col(k).adjoint());
    }
    s.alice.push_back(std::move(family));
  }
  for (std::size_t y = 0; y < p.bob_unitaries.size(); ++y) {
    CMat basis = p.bob_unitaries[y].adjoint();
    std::vector<CMat> family(static_cast<std::size_t>(b_count),
                             CMat::Zero(dim, dim));
    for (int l = 0; l < dim; ++l) {
      int answer = mapped ? bob_output_map[y][static_cast<std::size_t>(l)] : l;
      family[static_cast<std::size_t>(answer)] +=
          basis.col(l) * basis.col(l).adjoint();
    }
    s.bob.push_back(std::move(family));
  }
  return s;
}

namespace {

int log2_size(int n, const char* what) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  if ((1 << bits) != n || n < 2 || n > 8) {
    fail(ErrorCode::InvalidSizeParameter,
         std::string(what) + " size must be 2, 4 or 8, got " + std::to_string(n));
  }
  return bits;
}

CMat hadamard_power(int m) {
  CMat h1(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  h1 << s, s, s, -s;
  CMat h = CMat::Identity(1, 1);
  for (int i = 0; i < m; ++i) h = tensor(h, h1);
  return h;
}

// diag over basis b of (-1)^{bit b of x}.
CMat phase_oracle(int x, int n) {
  CMat d = CMat::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    d(b, b) = ((x >> b) & 1) ? -1.0 : 1.0;
  }
  return d;
}

}  // namespace

OneWayProtocol dj_oneway_protocol(int n) {
  int m = log2_size(n, "balanced-function protocol");
  CMat h = hadamard_power(m);
  OneWayProtocol p;
  p.qubits = m;
  int inputs = 1 << n;
  p.alice_unitaries.reserve(static_cast<std::size_t>(inputs));
  p.bob_unitaries.reserve(static_cast<std::size_t>(inputs));
  for (int x = 0; x < inputs; ++x) {
    p.alice_unitaries.push_back(phase_oracle(x, n) * h);
  }
  for (int y = 0; y < inputs; ++y) {
    p.bob_unitaries.push_back(h * phase_oracle(y, n));
  }
  return p;
}

OneWayProtocol hm_oneway_protocol(int n) {
  int m = log2_size(n, "matching protocol");
  CMat h = hadamard_power(m);
  OneWayProtocol p;
  p.qubits = m;
  int inputs = 1 << n;
  for (int x = 0; x < inputs; ++x) {
    p.alice_unitaries.push_back(phase_oracle(x, n) * h);
  }
  double invsqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& matching : perfect_matchings(n)) {
    // Row 2p+c of the receiver unitary is the bra of
    // (|i-1> + (-1)^c |j-1>)/sqrt2 for pair p = (i, j): a measurement in the
    // matching basis.
    CMat u = CMat::Zero(n, n);
    for (std::size_t slot = 0; slot < matching.size(); ++slot) {
      auto [i, j] = matching[slot];
      for (int c = 0; c < 2; ++c) {
        Eigen::Index row = static_cast<Eigen::Index>(2 * slot) + c;
        u(row, i - 1) = invsqrt2;
        u(row, j - 1) = c ? -invsqrt2 : invsqrt2;
      }
    }
    p.bob_unitaries.push_back(u);
  }
  return p;
}

std::vector<std::vector<int>> hm_bob_output_map(int n) {
  log2_size(n, "matching protocol");
  std::vector<std::vector<int>> map;
  for (const auto& matching : perfect_matchings(n)) {
    std::vector<int> row(static_cast<std::size_t>(n), 0);
    for (std::size_t slot = 0; slot < matching.size(); ++slot) {
      auto [i, j] = matching[slot];
      int d = (i - 1) ^ (j - 1);
      // Outcome 2p+c means the sign bit c equals x_i xor x_j xor (d . k); the
      // answer string l must satisfy d . l = c, so l = 0 or the lowest set
      // bit of d.
      for (int c = 0; c < 2; ++c) {
        int l = c ? (d & -d) : 0;
        row[static_cast<std::size_t>(2 * slot) + static_cast<std::size_t>(c)] =
            static_cast<int>(slot) * n + l;
      }
    }
    map.push_back(std::move(row));
  }
  return map;
}

}  // namespace nonlocal
