#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pmlab/errors.hpp"

namespace pmlab::qcore {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Vector4 = Eigen::Vector4cd;

/// 4x4 complex operator on the four-level space. Basis order:
/// |0> = (U,H), |1> = (U,V), |2> = (D,H), |3> = (D,V); the spatial qubit is
/// the left tensor factor throughout.
using Operator4 = Eigen::Matrix4cd;

// Tolerances for the structural contracts below.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdSlack = -1e-10;
inline constexpr double kInvolutionTol = 1e-10;
inline constexpr double kImagTol = 1e-10;

/// Pure state; stays normalized to 1 within 1e-12.
class StateVector {
 public:
  /// Validates the norm; throws ContractViolation when off by more than 1e-12.
  explicit StateVector(const Vector4& amplitudes);

  /// Normalizes exactly (used by factories that build states from kets).
  static StateVector normalized(const Vector4& amplitudes);

  const Vector4& amplitudes() const { return amps_; }

 private:
  Vector4 amps_;
};

/// Mixed state; Hermitian within 1e-12, unit trace within 1e-12, eigenvalues
/// above -1e-10.
class DensityMatrix {
 public:
  /// Validates all three contracts; throws ContractViolation on failure.
  explicit DensityMatrix(const Operator4& rho);

  static DensityMatrix from_pure(const StateVector& psi);

  const Operator4& matrix() const { return rho_; }

  double purity() const;

 private:
  Operator4 rho_;
};

/// Single-qubit Pauli matrix; label is one of 'X','Y','Z','I'.
Matrix2 pauli(char label);

/// Kronecker product; `left` acts on the spatial qubit, `right` on
/// polarization: (tensor(A,B))[(s,p),(s',p')] = A[s,s'] * B[p,p'].
Operator4 tensor(const Matrix2& left, const Matrix2& right);

/// True when op equals its adjoint within tol.
bool is_hermitian(const Operator4& op, double tol = kHermTol);

/// Eigenprojector (1 + sign*obs)/2 for a Hermitian involution.
/// sign must be +1 or -1; obs must satisfy obs^2 = 1 within 1e-10, otherwise
/// ContractViolation.
Operator4 projector_pm(const Operator4& obs, int sign);

/// Tr(rho * obs) for Hermitian obs; the imaginary residue must be below
/// 1e-10 (ContractViolation otherwise) and is discarded.
/// Non-Hermitian obs is rejected with InvalidInput.
double expectation(const DensityMatrix& rho, const Operator4& obs);

/// The 26 catalog states: Psi1..Psi15 pure, rho16..rho26 mixed.
/// Labels are case-insensitive; unknown labels raise InvalidInput.
DensityMatrix state_factory(std::string_view label);

/// Canonical labels, catalog order.
std::vector<std::string> state_labels();

/// Human-readable construction of each catalog state, for listings.
std::string state_description(std::string_view label);

enum class RandomStateKind { Pure, Mixed };

/// Deterministic per seed. Pure: normalized complex-Gaussian 4-vector
/// (Haar-uniform direction). Mixed: G*G^dagger / tr with G a 4x4
/// complex-Gaussian matrix (Wishart-type, full rank almost surely).
DensityMatrix random_state(std::uint64_t seed, RandomStateKind kind);

}  // namespace pmlab::qcore
