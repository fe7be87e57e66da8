#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <optional>

#include "nonlocal/linalg.hpp"

using namespace nonlocal;

namespace {

std::optional<ErrorCode> thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

CMat random_hermitian(int dim, std::mt19937_64& rng) {
  CMat a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(gaussian(rng), gaussian(rng));
  return (a + a.adjoint().eval()) / 2.0;
}

}  // namespace

TEST_CASE("tensor product follows the big-endian index convention") {
  CMat i2 = CMat::Identity(2, 2);
  CMat x(2, 2);
  x << 0, 1, 1, 0;
  CMat ix = tensor(i2, x);
  REQUIRE(ix.rows() == 4);
  // Block-diagonal copies of x: the left factor indexes the blocks.
  CHECK(ix(0, 1) == Complex(1, 0));
  CHECK(ix(1, 0) == Complex(1, 0));
  CHECK(ix(2, 3) == Complex(1, 0));
  CHECK(ix(0, 2) == Complex(0, 0));
  CHECK(tensor(i2, i2).isApprox(CMat::Identity(4, 4)));

  CVec e0 = CVec::Zero(2), e1 = CVec::Zero(2);
  e0(0) = 1;
  e1(1) = 1;
  CVec v = tensor(e0, e1);
  REQUIRE(v.size() == 4);
  CHECK(v(1) == Complex(1, 0));  // |0>|1> -> index 0*2+1
}

TEST_CASE("adjoint and apply basics") {
  CMat m(2, 2);
  m << Complex(1, 2), Complex(3, -1), Complex(0, 1), Complex(2, 0);
  CHECK(adjoint(adjoint(m)).isApprox(m));
  CHECK(adjoint(m)(0, 1) == Complex(0, -1));

  CVec v(2);
  v << Complex(1, 0), Complex(0, 1);
  // Qualified: an unqualified call would drag std::apply in via ADL.
  CHECK(nonlocal::apply(CMat::Identity(2, 2), v).isApprox(v));
  CHECK(thrown_code([&] { nonlocal::apply(m, CVec::Zero(3)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("unitarity and hermiticity checks") {
  CHECK(is_unitary(CMat::Identity(3, 3)));
  CMat h(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  CHECK(is_unitary(h));
  CHECK(is_hermitian(h));
  CHECK(!is_unitary(2.0 * h));
  CHECK(thrown_code([&] { require_unitary(2.0 * h, "test"); }) ==
        ErrorCode::NonUnitary);
}

TEST_CASE("hermitian eigendecomposition reconstructs and fixes phases") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    CMat h = random_hermitian(5, rng);
    Eigensystem es = eigh(h);
    CMat rebuilt =
        es.vectors * es.values.asDiagonal().toDenseMatrix().cast<Complex>() *
        es.vectors.adjoint();
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index i = 0; i + 1 < es.values.size(); ++i) {
      CHECK(es.values(i) <= es.values(i + 1));
    }
    for (Eigen::Index c = 0; c < es.vectors.cols(); ++c) {
      for (Eigen::Index r = 0; r < es.vectors.rows(); ++r) {
        Complex v = es.vectors(r, c);
        if (std::abs(v) > 1e-12) {
          CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-10));
          CHECK(v.real() > 0.0);
          break;
        }
      }
    }
  }
}

TEST_CASE("psd sqrt squares back") {
  std::mt19937_64 rng(11);
  CMat a = random_hermitian(4, rng);
  CMat psd = a * a;  // hermitian squared is PSD
  CMat root = psd_sqrt(psd);
  CHECK((root * root - psd).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(min_eigenvalue(root) > -1e-12);
}

TEST_CASE("positive eigenspace projector picks out positive directions") {
  CMat h = CMat::Zero(3, 3);
  h(0, 0) = 2.0;
  h(1, 1) = -1.0;
  CMat proj = positive_eigenspace_projector(h);
  CHECK(std::abs(proj(0, 0) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(proj(1, 1)) < 1e-12);
  CHECK(std::abs(proj(2, 2)) < 1e-12);
}

TEST_CASE("maximally entangled state is normalized and diagonal-supported") {
  CVec psi = max_entangled_state(3);
  REQUIRE(psi.size() == 9);
  CHECK(psi.norm() == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double expected = i == j ? 1.0 / std::sqrt(3.0) : 0.0;
      CHECK(std::abs(psi(i * 3 + j) - Complex(expected, 0)) < 1e-15);
    }
}

TEST_CASE("random unitaries are unitary and seed-deterministic") {
  std::mt19937_64 rng1(42), rng2(42), rng3(43);
  CMat u1 = random_unitary(6, rng1);
  CMat u2 = random_unitary(6, rng2);
  CMat u3 = random_unitary(6, rng3);
  CHECK(is_unitary(u1));
  CHECK((u1 - u2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u1 - u3).cwiseAbs().maxCoeff() > 1e-3);
  CVec v1 = random_state(5, rng1);
  CHECK(v1.norm() == doctest::Approx(1.0));
}

TEST_CASE("applying to a qubit subset matches the explicit embedding") {
  std::mt19937_64 rng(3);
  CMat u = random_unitary(2, rng);
  CVec state = random_state(8, rng);
  CMat i2 = CMat::Identity(2, 2);

  CVec via_subset = state;
  apply_to_qubits(via_subset, u, {0}, 3);
  CHECK((via_subset - tensor(tensor(u, i2), i2) * state).norm() < 1e-12);

  via_subset = state;
  apply_to_qubits(via_subset, u, {1}, 3);
  CHECK((via_subset - tensor(tensor(i2, u), i2) * state).norm() < 1e-12);

  via_subset = state;
  apply_to_qubits(via_subset, u, {2}, 3);
  CHECK((via_subset - tensor(tensor(i2, i2), u) * state).norm() < 1e-12);

  CMat u2q = random_unitary(4, rng);
  via_subset = state;
  apply_to_qubits(via_subset, u2q, {0, 1}, 3);
  CHECK((via_subset - tensor(u2q, i2) * state).norm() < 1e-12);

  via_subset = state;
  apply_to_qubits(via_subset, u2q, {1, 2}, 3);
  CHECK((via_subset - tensor(i2, u2q) * state).norm() < 1e-12);
}

TEST_CASE("qubit order in the subset list controls operator orientation") {
  // CNOT with control listed first: applying it to {2, 0} of three qubits
  // makes qubit 2 the control and qubit 0 the target.
  CMat cnot = CMat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1;
  CVec state = CVec::Zero(8);
  state(1) = 1;  // |001>: qubit 2 is set
  apply_to_qubits(state, cnot, {2, 0}, 3);
  CHECK(std::abs(state(5) - Complex(1, 0)) < 1e-15);  // -> |101>
}

TEST_CASE("apply_to_qubits validates arguments") {
  CVec state = CVec::Zero(8);
  state(0) = 1;
  CMat u = CMat::Identity(2, 2);
  CHECK(thrown_code([&] { apply_to_qubits(state, u, {3}, 3); }) ==
        ErrorCode::InvalidArgument);
  CHECK(thrown_code([&] {
          apply_to_qubits(state, CMat::Identity(4, 4), {1, 1}, 3);
        }) == ErrorCode::InvalidArgument);
  CHECK(thrown_code([&] { apply_to_qubits(state, u, {0, 1}, 3); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(thrown_code([&] { apply_to_qubits(state, u, {0}, 4); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("projection keeps matching amplitudes and the branch weight") {
  std::mt19937_64 rng(5);
  CVec state = random_state(8, rng);
  double expected = 0.0;
  for (int idx = 0; idx < 8; ++idx) {
    if ((idx >> 1) & 1) expected += std::norm(state(idx));  // qubit 1 set
  }
  CVec projected = state;
  project_qubits(projected, {1}, 1, 3);
  CHECK(projected.squaredNorm() == doctest::Approx(expected));
  for (int idx = 0; idx < 8; ++idx) {
    if ((idx >> 1) & 1) {
      CHECK(projected(idx) == state(idx));
    } else {
      CHECK(projected(idx) == Complex(0, 0));
    }
  }
  // Projecting on complementary bits splits the norm.
  CVec other = state;
  project_qubits(other, {1}, 0, 3);
  CHECK(projected.squaredNorm() + other.squaredNorm() ==
        doctest::Approx(1.0));
}
