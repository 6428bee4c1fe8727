#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tichain/symmetrize.hpp"
#include "tichain/witnesses.hpp"

using namespace tichain;

namespace {

JointDistribution random_distribution(int d, int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(static_cast<std::size_t>(std::pow(d, n)));
  double total = 0.0;
  for (auto& x : p) total += x = e(rng);
  for (auto& x : p) x /= total;
  return JointDistribution(d, n, p);
}

DensityMatrix random_state(int sites, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int dim = 1 << sites;
  ComplexMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho, std::vector<int>(sites, 2));
}

DensityMatrix power(const DensityMatrix& rho, int n) {
  DensityMatrix out = rho;
  for (int k = 1; k < n; ++k) out = tensor(out, rho);
  return out;
}

const DensityMatrix& as_rho(const ChainState& s) { return std::get<DensityMatrix>(s); }
const JointDistribution& as_p(const ChainState& s) { return std::get<JointDistribution>(s); }

}  // namespace

TEST_CASE("identical factors") {
  BlochVector v;
  v.v = Eigen::Vector3d(0.3, -0.2, 0.5);
  const auto rho = bloch_state(v);
  const auto pair = tensor(rho, rho);
  auto out = as_rho(symmetrize_marginal(power(rho, 3), 2));
  CHECK((out.matrix() - pair.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  for (int r = 2; r <= 4; ++r) {
    auto sf = as_rho(structure_factor(power(rho, 4), r));
    CHECK((sf.matrix() - pair.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("three-site classical formula") {
  std::mt19937_64 rng(7);
  auto w = random_distribution(2, 3, rng);
  auto s = as_p(symmetrize_marginal(w, 2));
  // (1/3)(w12 + w23 + w3 x w1)
  auto w12 = w.marginal({0, 1}), w23 = w.marginal({1, 2});
  auto wrap = w.marginal({2}).compose(w.marginal({0}));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s[i] == doctest::Approx((w12[i] + w23[i] + wrap[i]) / 3.0).epsilon(1e-14));
  }
  CHECK(as_p(symmetrize_marginal(w, 1)).size() == 2);
  auto s1 = as_p(symmetrize_marginal(w, 1));
  for (int a = 0; a < 2; ++a) {
    const double avg = (w.marginal({0})[a] + w.marginal({1})[a] + w.marginal({2})[a]) / 3.0;
    CHECK(s1[a] == doctest::Approx(avg).epsilon(1e-14));
  }
}

TEST_CASE("random translation of a period-3 product") {
  const double s = 1.0 / std::sqrt(2.0);
  BlochVector v0, v1, v2;
  v0.v = Eigen::Vector3d(s, s, 0);
  v1.v = Eigen::Vector3d(-s, s, 0);
  v2.v = Eigen::Vector3d(s, -s, 0);
  auto omega = tensor(tensor(bloch_state(v2), bloch_state(v1)), bloch_state(v0));
  auto rho = as_rho(symmetrize_marginal(omega, 2));
  CHECK((rho.matrix() - rho0_tis().matrix()).cwiseAbs().maxCoeff() < 1e-14);
  auto yx = CorrelationWitness::from_axes("yx").operator_matrix();
  CHECK(rho.expectation(yx).real() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("structure factor") {
  std::mt19937_64 rng(8);
  auto w = random_distribution(3, 4, rng);
  auto sf = as_p(structure_factor(w, 2));
  for (std::size_t i = 0; i < 9; ++i) {
    const double direct = (w.marginal({0, 1})[i] + w.marginal({1, 2})[i] + w.marginal({2, 3})[i]) / 3.0;
    CHECK(sf[i] == doctest::Approx(direct).epsilon(1e-14));
  }
  auto sf4 = as_p(structure_factor(w, 4));
  CHECK(l1_distance(sf4, w.marginal({0, 3})) < 1e-15);
  CHECK_THROWS_AS(structure_factor(w, 1), std::invalid_argument);
  CHECK_THROWS_AS(structure_factor(w, 5), std::invalid_argument);

  auto rho = random_state(3, rng);
  auto q = as_rho(structure_factor(rho, 2));
  ComplexMatrix direct = (rho.reduce({0, 1}).matrix() + rho.reduce({1, 2}).matrix()) / 2.0;
  CHECK((q.matrix() - direct).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("symmetrized marginals are TI consistent") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 4;
    const int r = 1 + t % n;
    auto w = random_distribution(2 + t % 2, n, rng);
    auto out = symmetrize_marginal(w, r);
    CHECK(num_sites(out) == r);
    CHECK(is_ti_consistent(out, 1e-10));
    double total = 0.0;
    for (double x : as_p(out).probs()) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 3;
    const int r = 2 + t % (n - 1);
    auto rho = random_state(n, rng);
    auto out = symmetrize_marginal(rho, r);
    CHECK(num_sites(out) == r);
    CHECK(is_ti_consistent(out, 1e-10));
    CHECK(herm_eig(as_rho(out).matrix()).values.minCoeff() > -1e-12);
  }
  CHECK_THROWS_AS(symmetrize_marginal(random_state(2, rng), 3), std::invalid_argument);
  CHECK_THROWS_AS(symmetrize_marginal(random_distribution(2, 2, rng), 0), std::invalid_argument);
}

TEST_CASE("symmetrizing a product mixture stays classical TI") {
  // Mixture of products of computational-basis states: the diagonal is a
  // classical distribution whose symmetrization must be TI consistent.
  std::mt19937_64 rng(10);
  auto w = random_distribution(2, 3, rng);
  ComplexMatrix m = ComplexMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) m(i, i) = w[i];
  auto sym = as_rho(symmetrize_marginal(DensityMatrix(m, {2, 2, 2}), 2));
  std::vector<double> diag(4);
  for (int i = 0; i < 4; ++i) diag[i] = sym.matrix()(i, i).real();
  JointDistribution shadow(2, 2, diag, 1e-12);
  CHECK(check_ti_consistency(shadow, 1e-12));
  CHECK(l1_distance(shadow, as_p(symmetrize_marginal(w, 2))) < 1e-14);
}

TEST_CASE("size bound") {
  CHECK(size_bound(1.0, 1e12, 0.0) == 1);
  const double delta = 2.0 / std::numbers::pi - 0.5;
  CHECK(size_bound(0.5, delta, 0.0) == 4);
  CHECK(size_bound(0.5, 0.5, 0.0) == 2);
  CHECK(size_bound(-5.0, 1.0, 0.0) == 0);
  CHECK_THROWS_AS(size_bound(0.5, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(size_bound(0.5, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("discrepancy between a block and its symmetrization") {
  // Wrap-around terms are the only difference, so the r-site marginal moves by
  // at most 2(r-1)/n in l1.
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const int n = 3 + t % 3;
    auto w = random_distribution(2, n, rng);
    for (int r = 1; r <= n; ++r) {
      auto s = as_p(symmetrize_marginal(w, r));
      double avg_l1 = 0.0;
      JointDistribution mean = w.window(0, r);
      std::vector<double> acc(mean.size(), 0.0);
      for (int k = 0; k + r <= n; ++k)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w.window(k, r)[i] / (n - r + 1);
      for (std::size_t i = 0; i < acc.size(); ++i) avg_l1 += std::abs(acc[i] - s[i]);
      CHECK(avg_l1 <= 2.0 * (r - 1) / n + 1e-12);
    }
  }
}
