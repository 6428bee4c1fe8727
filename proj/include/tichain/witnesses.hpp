#pragma once

// Two-site entanglement witnesses for translation-invariant qubit chains.

#include <cstdint>
#include <optional>

#include "tichain/quantum_core.hpp"

namespace tichain {

/// Witness sum_ij T_ij sigma_i (x) sigma_j with i, j over (x, y, z).
struct CorrelationWitness {
  Eigen::Matrix3d T = Eigen::Matrix3d::Zero();

  /// sigma_a (x) sigma_b with axes given as 'x', 'y' or 'z', e.g. "yx".
  static CorrelationWitness from_axes(std::string_view axes);

  ComplexMatrix operator_matrix() const;
};

struct WitnessReport {
  double value = 0.0;
  double tis_bound = 0.0;
  std::optional<double> ti_bound;
  double violation = 0.0;  // value - tis_bound
  std::optional<std::int64_t> excluded_block_size;
  bool ppt = true;
};

/// Upper bound on the witness over states with a TI separable extension:
/// (1/2) max_theta || e^{i theta} T + e^{-i theta} T^T ||, by grid scan plus
/// golden-section refinement. Requires theta_grid >= 64.
double wt_bound(const Eigen::Matrix3d& T, int theta_grid = 512);

/// Maximum TI value of sigma_y (x) sigma_x: the finite-ring sine sum for
/// ring size 2m+1, or 2/pi when `m` is empty.
double ti_sigma_yx_max(std::optional<std::int64_t> m = std::nullopt);

DensityMatrix rho1_nn();
DensityMatrix rho0_tis();
DensityMatrix rho_lambda(double lambda);

/// Lambda at which the partial transpose of rho_lambda loses positivity,
/// by bisection to 1e-12.
double ppt_threshold();
/// 2 pi^2 / (12 + 12 pi - pi^2).
double ppt_threshold_closed_form();

double min_partial_transpose_eigenvalue(const DensityMatrix& rho, int site);
bool is_ppt(const DensityMatrix& rho, int site = 1, double tol = 1e-10);

WitnessReport evaluate_witness(const DensityMatrix& rho12, const CorrelationWitness& w);

}  // namespace tichain
