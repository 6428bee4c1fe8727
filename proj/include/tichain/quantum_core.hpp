#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tichain/errors.hpp"

namespace tichain {

using Complex = std::complex<double>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ComplexMatrix = Matrix<Complex>;
using RealMatrix = Matrix<double>;

/// Validity and reconstruction tolerances shared by the quantum-side modules.
struct Tolerances {
  double validity = 1e-10;
  double reconstruction = 1e-9;
};

enum class Pauli { kIdentity, kX, kY, kZ };

ComplexMatrix pauli(Pauli axis);

/// Kronecker product. Works for any pair of dense Eigen expressions whose
/// scalar types multiply (real x complex promotes to complex).
template <class A, class B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = decltype(typename A::Scalar{} * typename B::Scalar{});
  Matrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          a(i, j) * b.template cast<Scalar>();
    }
  }
  return out;
}

/// Kronecker product of a list of factors, left to right.
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Hermitian, positive semidefinite, unit-trace matrix on a tensor product of
/// sites. Validated on construction; immutable afterwards.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix matrix, std::vector<int> site_dims,
                double tol = Tolerances{}.validity);

  const ComplexMatrix& matrix() const { return matrix_; }
  const std::vector<int>& site_dims() const { return site_dims_; }
  int num_sites() const { return static_cast<int>(site_dims_.size()); }
  Eigen::Index dim() const { return matrix_.rows(); }

  /// Reduced state on the listed sites (kept in ascending order).
  DensityMatrix reduce(std::vector<int> keep) const;
  /// Reduced state on `count` consecutive sites starting at `first`.
  DensityMatrix window(int first, int count) const;

  /// tr(rho * op).
  Complex expectation(const ComplexMatrix& op) const;

 private:
  ComplexMatrix matrix_;
  std::vector<int> site_dims_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Partial trace keeping `keep` (ascending) of a matrix on sites `dims`.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::vector<int> keep);

/// Transposes tensor factor `site`; throws std::out_of_range for a bad index.
ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                std::span<const int> dims, int site);
ComplexMatrix partial_transpose(const DensityMatrix& rho, int site);

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  ComplexMatrix vectors;   // columns
};

/// Eigendecomposition of a Hermitian matrix; throws std::invalid_argument if
/// the input is not Hermitian within `tol`.
HermitianEigen herm_eig(const ComplexMatrix& m, double tol = 1e-10);

/// Largest singular value.
template <class Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = Matrix<typename Derived::Scalar>;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues()(0);
}

/// Bloch vector of a single qubit, norm at most one.
struct BlochVector {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

/// (1/2)(I + v.sigma); throws std::domain_error if |v| > 1.
DensityMatrix bloch_state(const BlochVector& v);

}  // namespace tichain
