#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

#include "nonlocal/error.hpp"

namespace nonlocal {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kMeasurementTol = 1e-10;
inline constexpr std::uint64_t kDefaultSeed = 20240601;

// Tensor (Kronecker) product, usable on any dense expression.  The left
// factor is the most significant one in the composite index.
template <typename DerivedA, typename DerivedB>
auto tensor(const Eigen::MatrixBase<DerivedA>& a,
            const Eigen::MatrixBase<DerivedB>& b) {
  return Eigen::kroneckerProduct(a.derived(), b.derived()).eval();
}

inline CMat adjoint(const CMat& m) { return m.adjoint(); }

inline CVec apply(const CMat& m, const CVec& v) {
  if (m.cols() != v.size()) {
    fail(ErrorCode::DimensionMismatch,
         "cannot apply a " + std::to_string(m.rows()) + "x" +
             std::to_string(m.cols()) + " operator to a vector of length " +
             std::to_string(v.size()));
  }
  return m * v;
}

inline bool is_unitary(const CMat& u, double tol = kUnitaryTol) {
  if (u.rows() != u.cols()) return false;
  CMat delta = u.adjoint() * u - CMat::Identity(u.rows(), u.cols());
  return delta.cwiseAbs().maxCoeff() <= tol;
}

inline void require_unitary(const CMat& u, const char* what,
                            double tol = kUnitaryTol) {
  if (!is_unitary(u, tol)) {
    fail(ErrorCode::NonUnitary, std::string(what) + " is not unitary");
  }
}

inline bool is_hermitian(const CMat& m, double tol = kMeasurementTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint().eval()).cwiseAbs().maxCoeff() <= tol;
}

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  CMat vectors;            // columns, phase-fixed
};

// Hermitian eigendecomposition with a deterministic convention: eigenvalues
// ascending, every eigenvector rescaled so its first component of magnitude
// above 1e-12 is positive real.  Degenerate subspaces then come out the same
// way on every run with the same input.
inline Eigensystem eigh(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(h);
  Eigensystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
      Complex v = out.vectors(r, c);
      if (std::abs(v) > 1e-12) {
        out.vectors.col(c) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return out;
}

inline double min_eigenvalue(const CMat& h) {
  return Eigen::SelfAdjointEigenSolver<CMat>(h).eigenvalues().minCoeff();
}

// Square root of a positive semidefinite matrix; tiny negative eigenvalues
// from roundoff are clamped to zero.
inline CMat psd_sqrt(const CMat& h) {
  Eigensystem es = eigh(h);
  Eigen::VectorXd roots = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * roots.asDiagonal() * es.vectors.adjoint();
}

// Projector onto the strictly positive eigenspace.
inline CMat positive_eigenspace_projector(const CMat& h, double eps = 1e-14) {
  Eigensystem es = eigh(h);
  CMat proj = CMat::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values(i) > eps) {
      proj += es.vectors.col(i) * es.vectors.col(i).adjoint();
    }
  }
  return proj;
}

// Canonical maximally entangled state sum_i |i>|i> / sqrt(d) on a d*d space
// with the first factor most significant.
inline CVec max_entangled_state(int d) {
  CVec psi = CVec::Zero(static_cast<Eigen::Index>(d) * d);
  double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) {
    psi(static_cast<Eigen::Index>(i) * d + i) = amp;
  }
  return psi;
}

// Standard normal from raw 64-bit draws; hand-rolled so seeded runs do not
// depend on the standard library's distribution implementation.
inline double gaussian(std::mt19937_64& rng) {
  auto uniform = [&rng] {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  double u1 = uniform(), u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Haar-ish random unitary: QR of a complex Gaussian matrix with the R
// diagonal's phases absorbed into Q.
inline CMat random_unitary(int dim, std::mt19937_64& rng) {
  CMat gauss(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) gauss(r, c) = Complex(gaussian(rng), gaussian(rng));
  Eigen::HouseholderQR<CMat> qr(gauss);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    Complex d = r(c, c);
    if (std::abs(d) > 0) q.col(c) *= d / std::abs(d);
  }
  return q;
}

inline CVec random_state(int dim, std::mt19937_64& rng) {
  CVec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(gaussian(rng), gaussian(rng));
  v.normalize();
  return v;
}

// ---- qubit-register helpers ----------------------------------------------
// Global basis index convention: qubit 0 is the most significant bit, and a
// listed qubit subset maps to a local index the same way (qubits[0] most
// significant).

// Applies a 2^k-dimensional unitary (or any linear map) to the listed qubits
// of a state on total_qubits qubits, in place.
void apply_to_qubits(CVec& state, const CMat& op, const std::vector<int>& qubits,
                     int total_qubits);

// Keeps only the amplitudes where the listed qubits read the given bits
// (bit j of `bits` in the qubits[j] slot, qubits[0] most significant); the
// state is left unnormalized so its squared norm is the branch probability.
void project_qubits(CVec& state, const std::vector<int>& qubits, int bits,
                    int total_qubits);

}  // namespace nonlocal
