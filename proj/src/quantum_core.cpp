#include "tichain/quantum_core.hpp"

#include <algorithm>
#include <numeric>

namespace tichain {

namespace {

using Index = Eigen::Index;

Index product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1},
                         [](Index acc, int d) { return acc * d; });
}

// Mixed-radix digits of `index` over `dims`, most significant first.
void digits_of(Index index, std::span<const int> dims, std::vector<int>& out) {
  out.resize(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = static_cast<int>(index % dims[k]);
    index /= dims[k];
  }
}

Index index_of(std::span<const int> digits, std::span<const int> dims) {
  Index index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

}  // namespace

ComplexMatrix pauli(Pauli axis) {
  using namespace std::complex_literals;
  ComplexMatrix m(2, 2);
  switch (axis) {
    case Pauli::kIdentity: m << 1.0, 0.0, 0.0, 1.0; break;
    case Pauli::kX: m << 0.0, 1.0, 1.0, 0.0; break;
    case Pauli::kY: m << 0.0, -1i, 1i, 0.0; break;
    case Pauli::kZ: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, std::vector<int> site_dims,
                             double tol)
    : matrix_(std::move(matrix)), site_dims_(std::move(site_dims)) {
  if (site_dims_.empty() ||
      std::any_of(site_dims_.begin(), site_dims_.end(), [](int d) { return d < 1; })) {
    throw std::invalid_argument("density matrix: site dimensions must be positive");
  }
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != product(site_dims_)) {
    throw std::invalid_argument("density matrix: shape does not match site dimensions");
  }
  if (!is_hermitian(matrix_, tol)) {
    throw std::invalid_argument("density matrix: not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > tol) {
    throw std::invalid_argument("density matrix: trace is not one");
  }
  // Symmetrize away round-off before the spectrum check.
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw std::invalid_argument("density matrix: not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::reduce(std::vector<int> keep) const {
  std::vector<int> dims;
  std::sort(keep.begin(), keep.end());
  for (int k : keep) dims.push_back(site_dims_.at(k));
  ComplexMatrix reduced = partial_trace(matrix_, site_dims_, keep);
  // Trace and positivity are inherited; skip revalidation cost for tiny drift.
  return DensityMatrix(std::move(reduced), std::move(dims), 1e-8);
}

DensityMatrix DensityMatrix::window(int first, int count) const {
  if (first < 0 || count < 1 || first + count > num_sites()) {
    throw std::out_of_range("density matrix: window outside the chain");
  }
  std::vector<int> keep(count);
  std::iota(keep.begin(), keep.end(), first);
  return reduce(std::move(keep));
}

Complex DensityMatrix::expectation(const ComplexMatrix& op) const {
  return (matrix_ * op).trace();
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<int> dims = a.site_dims();
  dims.insert(dims.end(), b.site_dims().begin(), b.site_dims().end());
  return DensityMatrix(kron(a.matrix(), b.matrix()), std::move(dims), 1e-8);
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims,
                            std::vector<int> keep) {
  const int n = static_cast<int>(dims.size());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::out_of_range("partial trace: site index out of range");
    kept[k] = true;
  }
  std::vector<int> kdims, tdims;
  for (int k = 0; k < n; ++k) (kept[k] ? kdims : tdims).push_back(dims[k]);
  const Index kd = product(kdims), td = product(tdims);
  ComplexMatrix out = ComplexMatrix::Zero(kd, kd);

  std::vector<int> full(n), kdig, tdig;
  auto compose = [&](Index ki, Index ti) {
    digits_of(ki, kdims, kdig);
    digits_of(ti, tdims, tdig);
    std::size_t a = 0, b = 0;
    for (int k = 0; k < n; ++k) full[k] = kept[k] ? kdig[a++] : tdig[b++];
    return index_of(full, dims);
  };
  for (Index t = 0; t < td; ++t) {
    std::vector<Index> rows(kd);
    for (Index i = 0; i < kd; ++i) rows[i] = compose(i, t);
    for (Index i = 0; i < kd; ++i) {
      for (Index j = 0; j < kd; ++j) out(i, j) += m(rows[i], rows[j]);
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::span<const int> dims,
                                int site) {
  if (site < 0 || site >= static_cast<int>(dims.size())) {
    throw std::out_of_range("partial transpose: site index out of range");
  }
  ComplexMatrix out(m.rows(), m.cols());
  std::vector<int> rd, cd;
  for (Index i = 0; i < m.rows(); ++i) {
    digits_of(i, dims, rd);
    for (Index j = 0; j < m.cols(); ++j) {
      digits_of(j, dims, cd);
      std::swap(rd[site], cd[site]);
      out(index_of(rd, dims), index_of(cd, dims)) = m(i, j);
      std::swap(rd[site], cd[site]);
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, int site) {
  return partial_transpose(rho.matrix(), rho.site_dims(), site);
}

HermitianEigen herm_eig(const ComplexMatrix& m, double tol) {
  if (!is_hermitian(m, tol)) {
    throw std::invalid_argument("herm_eig: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  return {es.eigenvalues(), es.eigenvectors()};
}

DensityMatrix bloch_state(const BlochVector& b) {
  if (b.v.norm() > 1.0 + 1e-12) {
    throw std::domain_error("bloch_state: Bloch vector longer than one");
  }
  ComplexMatrix m = pauli(Pauli::kIdentity) + b.v.x() * pauli(Pauli::kX) +
                    b.v.y() * pauli(Pauli::kY) + b.v.z() * pauli(Pauli::kZ);
  return DensityMatrix(0.5 * m, {2});
}

}  // namespace tichain
