#include "tichain/witnesses.hpp"

#include <cmath>
#include <numbers>

#include "tichain/symmetrize.hpp"

namespace tichain {

namespace {

using std::numbers::pi;

const ComplexMatrix& pauli_axis(int i) {
  static const ComplexMatrix axes[3] = {pauli(Pauli::kX), pauli(Pauli::kY), pauli(Pauli::kZ)};
  return axes[i];
}

int axis_index(char c) {
  switch (c) {
    case 'x': case 'X': return 0;
    case 'y': case 'Y': return 1;
    case 'z': case 'Z': return 2;
    default: throw std::invalid_argument(std::string("witness: unknown axis '") + c + "'");
  }
}

double theta_objective(const Eigen::Matrix3d& T, double theta) {
  const Complex phase = std::polar(1.0, theta);
  const Eigen::Matrix3cd m = phase * T.cast<Complex>() + std::conj(phase) * T.transpose().cast<Complex>();
  return spectral_norm(m);
}

DensityMatrix product_state(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return tensor(bloch_state({a}), bloch_state({b}));
}

}  // namespace

CorrelationWitness CorrelationWitness::from_axes(std::string_view axes) {
  if (axes.size() != 2) throw std::invalid_argument("witness: expected two axis letters");
  CorrelationWitness w;
  w.T(axis_index(axes[0]), axis_index(axes[1])) = 1.0;
  return w;
}

ComplexMatrix CorrelationWitness::operator_matrix() const {
  ComplexMatrix w = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (T(i, j) != 0.0) w += T(i, j) * kron(pauli_axis(i), pauli_axis(j));
    }
  }
  return w;
}

double wt_bound(const Eigen::Matrix3d& T, int theta_grid) {
  if (theta_grid < 64) throw std::invalid_argument("wt_bound: theta_grid must be at least 64");
  if (!T.allFinite()) throw std::invalid_argument("wt_bound: non-finite coefficients");
  // theta -> theta + pi flips the sign of the operator, so [0, pi) suffices.
  const double step = pi / theta_grid;
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < theta_grid; ++k) {
    const double v = theta_objective(T, k * step);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  double a = (best - 1) * step, b = (best + 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = theta_objective(T, c), fd = theta_objective(T, d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a);
      fc = theta_objective(T, c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a);
      fd = theta_objective(T, d);
    }
  }
  best_value = std::max({best_value, fc, fd, theta_objective(T, 0.5 * (a + b))});
  return 0.5 * best_value;
}

double ti_sigma_yx_max(std::optional<std::int64_t> m) {
  if (!m) return 2.0 / pi;
  if (*m < 1) throw std::invalid_argument("ti_sigma_yx_max: m must be at least 1");
  const double n = 2.0 * static_cast<double>(*m) + 1.0;
  double sum = 0.0;
  for (std::int64_t k = 1; k <= *m; ++k) sum += 2.0 * std::sin(2.0 * pi * static_cast<double>(k) / n);
  return sum / n;
}

DensityMatrix rho1_nn() {
  const auto& x = pauli_axis(0);
  const auto& y = pauli_axis(1);
  const auto& z = pauli_axis(2);
  ComplexMatrix m = 0.25 * ComplexMatrix::Identity(4, 4) +
                    (1.0 / (2.0 * pi)) * (kron(y, x) + kron(x, y)) +
                    (1.0 / (pi * pi)) * kron(z, z);
  return DensityMatrix(m, {2, 2});
}

DensityMatrix rho0_tis() {
  const double s = 1.0 / std::sqrt(2.0);
  const Eigen::Vector3d v[3] = {{s, s, 0.0}, {-s, s, 0.0}, {s, -s, 0.0}};
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  for (int k = 0; k < 3; ++k) m += product_state(v[(k + 1) % 3], v[k]).matrix() / 3.0;
  return DensityMatrix(m, {2, 2});
}

DensityMatrix rho_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("rho_lambda: lambda must lie in [0, 1]");
  }
  return DensityMatrix(lambda * rho1_nn().matrix() + (1.0 - lambda) * rho0_tis().matrix(), {2, 2});
}

double min_partial_transpose_eigenvalue(const DensityMatrix& rho, int site) {
  return herm_eig(partial_transpose(rho, site)).values.minCoeff();
}

double ppt_threshold() {
  auto g = [](double lambda) { return min_partial_transpose_eigenvalue(rho_lambda(lambda), 1); };
  double lo = 0.0, hi = 1.0;
  if (g(lo) < -1e-10 || g(hi) >= 0.0) {
    throw NumericalError("ppt_threshold: partial transpose bracket does not change sign");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ppt_threshold_closed_form() { return 2.0 * pi * pi / (12.0 + 12.0 * pi - pi * pi); }

bool is_ppt(const DensityMatrix& rho, int site, double tol) {
  return min_partial_transpose_eigenvalue(rho, site) >= -tol;
}

WitnessReport evaluate_witness(const DensityMatrix& rho12, const CorrelationWitness& w) {
  if (rho12.site_dims() != std::vector<int>{2, 2}) {
    throw std::invalid_argument("evaluate_witness: expected a two-qubit state");
  }
  const ComplexMatrix op = w.operator_matrix();
  WitnessReport r;
  r.value = rho12.expectation(op).real();
  r.tis_bound = wt_bound(w.T);
  r.violation = r.value - r.tis_bound;
  r.ppt = is_ppt(rho12, 1);

  // The TI maximum is known in closed form for a positive multiple of a
  // single sigma_y sigma_x or sigma_x sigma_y correlator.
  Eigen::Matrix3d yx = Eigen::Matrix3d::Zero(), xy = Eigen::Matrix3d::Zero();
  yx(1, 0) = 1.0;
  xy(0, 1) = 1.0;
  for (const auto& base : {yx, xy}) {
    const double c = (w.T.array() * base.array()).sum();
    if (c > 0.0 && (w.T - c * base).cwiseAbs().maxCoeff() == 0.0) r.ti_bound = c * ti_sigma_yx_max();
  }

  if (r.violation > 1e-12) {
    const auto rho1 = rho12.reduce({0});
    const double boundary = tensor(rho1, rho1).expectation(op).real();
    r.excluded_block_size = size_bound(r.tis_bound, r.violation, boundary);
  }
  return r;
}

}  // namespace tichain
