#include "tichain/symmetrize.hpp"

#include <cmath>
#include <optional>

namespace tichain {

namespace {

// Composition law, marginals and linear combinations for both branches, so
// the averaging formulas below are written once.
struct ClassicalOps {
  using State = JointDistribution;
  static int sites(const State& s) { return s.n(); }
  static State window(const State& s, int first, int count) { return s.window(first, count); }
  static State pair(const State& s, int a, int b) { return s.marginal({a, b}); }
  static State compose(const State& a, const State& b) { return a.compose(b); }
  static State build(const State& shape, std::vector<double> acc) {
    return JointDistribution(shape.d(), shape.n(), std::move(acc), 1e-9);
  }
  static void accumulate(std::vector<double>& acc, const State& s, double w) {
    if (acc.empty()) acc.assign(s.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) acc[i] += w * s[i];
  }
};

struct QuantumOps {
  using State = DensityMatrix;
  static int sites(const State& s) { return s.num_sites(); }
  static State window(const State& s, int first, int count) { return s.window(first, count); }
  static State pair(const State& s, int a, int b) { return s.reduce({a, b}); }
  static State compose(const State& a, const State& b) { return tensor(a, b); }
  static State build(const State& shape, const ComplexMatrix& acc) {
    return DensityMatrix(acc, shape.site_dims(), 1e-9);
  }
  static void accumulate(ComplexMatrix& acc, const State& s, double w) {
    if (acc.size() == 0) acc = ComplexMatrix::Zero(s.dim(), s.dim());
    acc += w * s.matrix();
  }
};

template <class Ops, class Acc>
typename Ops::State symmetrize_impl(const typename Ops::State& omega, int r) {
  const int n = Ops::sites(omega);
  if (r < 1 || r > n) throw std::invalid_argument("symmetrize_marginal: need 1 <= r <= n");
  Acc acc{};
  const double w = 1.0 / n;
  std::optional<typename Ops::State> shape;
  for (int k = 0; k + r <= n; ++k) {
    auto term = Ops::window(omega, k, r);
    Ops::accumulate(acc, term, w);
    if (!shape) shape = std::move(term);
  }
  for (int k = 1; k <= r - 1; ++k) {
    // Tail of one copy followed by the head of the next.
    auto term = Ops::compose(Ops::window(omega, n - r + k, r - k), Ops::window(omega, 0, k));
    Ops::accumulate(acc, term, w);
  }
  return Ops::build(*shape, acc);
}

template <class Ops, class Acc>
typename Ops::State structure_impl(const typename Ops::State& omega, int r) {
  const int n = Ops::sites(omega);
  if (r < 2 || r > n) throw std::invalid_argument("structure_factor: need 2 <= r <= n");
  Acc acc{};
  const double w = 1.0 / (n - r + 1);
  std::optional<typename Ops::State> shape;
  for (int k = 0; k + r <= n; ++k) {
    auto term = Ops::pair(omega, k, k + r - 1);
    Ops::accumulate(acc, term, w);
    if (!shape) shape = std::move(term);
  }
  return Ops::build(*shape, acc);
}

}  // namespace

int num_sites(const ChainState& state) {
  return std::visit(
      [](const auto& s) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, JointDistribution>) {
          return s.n();
        } else {
          return s.num_sites();
        }
      },
      state);
}

ChainState symmetrize_marginal(const ChainState& omega, int r) {
  if (const auto* p = std::get_if<JointDistribution>(&omega)) {
    return symmetrize_impl<ClassicalOps, std::vector<double>>(*p, r);
  }
  return symmetrize_impl<QuantumOps, ComplexMatrix>(std::get<DensityMatrix>(omega), r);
}

ChainState structure_factor(const ChainState& omega, int r) {
  if (const auto* p = std::get_if<JointDistribution>(&omega)) {
    return structure_impl<ClassicalOps, std::vector<double>>(*p, r);
  }
  return structure_impl<QuantumOps, ComplexMatrix>(std::get<DensityMatrix>(omega), r);
}

std::int64_t size_bound(double S, double delta, double boundary_term) {
  if (!(delta > 0.0)) throw std::invalid_argument("size_bound: delta must be positive");
  const double n = std::floor((S - boundary_term) / delta + 1.0);
  if (n <= 0.0) return 0;
  return static_cast<std::int64_t>(n);
}

bool is_ti_consistent(const ChainState& state, double tol) {
  if (const auto* p = std::get_if<JointDistribution>(&state)) {
    return check_ti_consistency(*p, tol);
  }
  const auto& rho = std::get<DensityMatrix>(state);
  if (rho.num_sites() == 1) return true;
  const auto left = rho.window(0, rho.num_sites() - 1);
  const auto right = rho.window(1, rho.num_sites() - 1);
  if (left.site_dims() != right.site_dims()) return false;
  return (left.matrix() - right.matrix()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace tichain
