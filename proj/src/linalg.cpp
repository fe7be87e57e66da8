#include "nonlocal/linalg.hpp"

#include <algorithm>
#include <string>

namespace nonlocal {

namespace {

struct SubsetMasks {
  std::vector<long long> bit;  // bit[j] = global mask of qubits[j]
  long long all = 0;
};

SubsetMasks subset_masks(const std::vector<int>& qubits, int total_qubits) {
  SubsetMasks m;
  m.bit.reserve(qubits.size());
  for (int q : qubits) {
    if (q < 0 || q >= total_qubits) {
      fail(ErrorCode::InvalidArgument,
           "qubit index " + std::to_string(q) + " outside a register of " +
               std::to_string(total_qubits) + " qubits");
    }
    long long b = 1LL << (total_qubits - 1 - q);
    if (m.all & b) {
      fail(ErrorCode::InvalidArgument,
           "duplicate qubit index " + std::to_string(q));
    }
    m.bit.push_back(b);
    m.all |= b;
  }
  return m;
}

long long scatter(long long base, int sub, const SubsetMasks& m) {
  int k = static_cast<int>(m.bit.size());
  for (int j = 0; j < k; ++j) {
    if ((sub >> (k - 1 - j)) & 1) base |= m.bit[j];
  }
  return base;
}

}  // namespace

void apply_to_qubits(CVec& state, const CMat& op, const std::vector<int>& qubits,
                     int total_qubits) {
  const int k = static_cast<int>(qubits.size());
  const long long dim = 1LL << k;
  if (op.rows() != dim || op.cols() != dim) {
    fail(ErrorCode::DimensionMismatch,
         "operator on " + std::to_string(k) + " qubits must be " +
             std::to_string(dim) + "-dimensional");
  }
  if (state.size() != (1LL << total_qubits)) {
    fail(ErrorCode::DimensionMismatch,
         "state length " + std::to_string(state.size()) +
             " does not match a register of " + std::to_string(total_qubits) +
             " qubits");
  }
  SubsetMasks masks = subset_masks(qubits, total_qubits);
  CVec in(dim), out(dim);
  const long long n = state.size();
  for (long long base = 0; base < n; ++base) {
    if (base & masks.all) continue;
    for (long long sub = 0; sub < dim; ++sub) {
      in(sub) = state(scatter(base, static_cast<int>(sub), masks));
    }
    out.noalias() = op * in;
    for (long long sub = 0; sub < dim; ++sub) {
      state(scatter(base, static_cast<int>(sub), masks)) = out(sub);
    }
  }
}

void project_qubits(CVec& state, const std::vector<int>& qubits, int bits,
                    int total_qubits) {
  const int k = static_cast<int>(qubits.size());
  if (bits < 0 || bits >= (1 << k)) {
    fail(ErrorCode::InvalidArgument, "projection bits out of range");
  }
  if (state.size() != (1LL << total_qubits)) {
    fail(ErrorCode::DimensionMismatch,
         "state length " + std::to_string(state.size()) +
             " does not match a register of " + std::to_string(total_qubits) +
             " qubits");
  }
  SubsetMasks masks = subset_masks(qubits, total_qubits);
  long long want = scatter(0, bits, masks);
  for (long long idx = 0; idx < state.size(); ++idx) {
    if ((idx & masks.all) != want) state(idx) = Complex(0.0, 0.0);
  }
}

}  // namespace nonlocal
