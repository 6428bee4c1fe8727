#pragma once

// Classical TI Bell polytope for two inputs / two outputs per site with
// nearest- and next-to-nearest-neighbour correlators.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tichain/errors.hpp"
#include "tichain/marginals.hpp"
#include "tichain/rational.hpp"

namespace tichain {

/// Deterministic response function x -> a, stored as a 2-bit mask: bit x is
/// the output for input x. Exactly four exist.
struct Strategy {
  int bits = 0;

  int output(int x) const { return (bits >> x) & 1; }
  /// (-1)^output
  int value(int x) const { return 1 - 2 * output(x); }

  static constexpr int kCount = 4;
  friend bool operator==(Strategy, Strategy) = default;
};

/// Coordinates of a behavior, in this order.
enum Coord : int {
  kE0 = 0, kE1,
  kE12_00, kE12_01, kE12_10, kE12_11,
  kE13_00, kE13_01, kE13_10, kE13_11,
  kNumCoords
};

template <class Scalar>
using CoordVector = Eigen::Matrix<Scalar, kNumCoords, 1>;

/// One-site expectations E_x, nearest-neighbour correlators E12_xy and
/// next-to-nearest correlators E13_xy.
template <class Scalar>
struct BasicBehavior {
  CoordVector<Scalar> e = CoordVector<Scalar>::Zero();

  Scalar& E(int x) { return e(kE0 + x); }
  const Scalar& E(int x) const { return e(kE0 + x); }
  Scalar& E12(int x, int y) { return e(kE12_00 + 2 * x + y); }
  const Scalar& E12(int x, int y) const { return e(kE12_00 + 2 * x + y); }
  Scalar& E13(int x, int y) { return e(kE13_00 + 2 * x + y); }
  const Scalar& E13(int x, int y) const { return e(kE13_00 + 2 * x + y); }

  friend bool operator==(const BasicBehavior& a, const BasicBehavior& b) { return a.e == b.e; }
  friend bool operator<(const BasicBehavior& a, const BasicBehavior& b) {
    for (int i = 0; i < kNumCoords; ++i) {
      if (a.e(i) < b.e(i)) return true;
      if (b.e(i) < a.e(i)) return false;
    }
    return false;
  }
};

using Behavior = BasicBehavior<double>;
using ExactBehavior = BasicBehavior<Rational>;

template <class To, class From>
BasicBehavior<To> behavior_cast(const BasicBehavior<From>& b) {
  BasicBehavior<To> out;
  for (int i = 0; i < kNumCoords; ++i) {
    if constexpr (std::is_same_v<To, double>) {
      out.e(i) = to_double(b.e(i));
    } else {
      out.e(i) = To(b.e(i));
    }
  }
  return out;
}

/// I(b) >= bound, with I(b) = C0 E0 + C1 E1 + sum CAB_xy E12_xy + sum CAC_xy E13_xy.
struct BellInequality {
  CoordVector<Rational> coeffs = CoordVector<Rational>::Zero();
  Rational bound = 0;
  std::string name;

  BellInequality() = default;
  /// Throws std::invalid_argument if every coefficient is zero.
  BellInequality(CoordVector<Rational> c, Rational local_bound, std::string label = {});
  static BellInequality from_integers(const std::array<long, kNumCoords>& c, long local_bound,
                                     std::string label = {});

  friend bool operator==(const BellInequality& a, const BellInequality& b) {
    return a.coeffs == b.coeffs && a.bound == b.bound;
  }
};

/// The eleven builtin inequalities, ids 1..11.
const std::vector<BellInequality>& table1();
/// Throws std::out_of_range for ids outside 1..11.
const BellInequality& table1_inequality(int id);

template <class Scalar>
Scalar evaluate(const BellInequality& ineq, const BasicBehavior<Scalar>& b) {
  Scalar total = 0;
  for (int i = 0; i < kNumCoords; ++i) {
    if (ineq.coeffs(i) == 0) continue;
    if constexpr (std::is_same_v<Scalar, double>) {
      total += to_double(ineq.coeffs(i)) * b.e(i);
    } else {
      total += Scalar(ineq.coeffs(i)) * b.e(i);
    }
  }
  return total;
}

/// Behavior of the periodic string read off a loop over the 4 strategies
/// (first symbol of each tile).
ExactBehavior loop_behavior(const DominoLoop& loop);
ExactBehavior deterministic_behavior(Strategy s);

/// Distinct behaviors of all irreducible loops with d = 4, n = 3, sorted.
/// Computed once and cached.
const std::vector<ExactBehavior>& vertex_behaviors();

/// Three-site joint distribution over strategies for a behavior's source loop.
/// Only meaningful for loop behaviors; used by property tests.
ExactJointDistribution loop_strategy_marginal(const DominoLoop& loop);

/// Minimum of the inequality over the vertex behaviors.
Rational local_bound(const BellInequality& ineq);

struct FacetCheck {
  bool valid = false;
  bool tight = false;
  int face_dim = -1;
  int ambient_dim = -1;
  bool is_facet() const { return valid && tight && face_dim == ambient_dim - 1; }
};

/// Exact check against the default vertex set.
FacetCheck verify_facet(const BellInequality& ineq);
FacetCheck verify_facet(const BellInequality& ineq, const std::vector<ExactBehavior>& vertices);

/// Affine dimension of a point set (-1 when empty).
int affine_dimension(const std::vector<ExactBehavior>& points);

struct FacetBudget {
  std::uint64_t max_input = 4'000'000;   // vertices x projected dimension
  std::uint64_t max_rays = 2'000'000;    // intermediate cone generators
};

/// Facets of conv(vertices) restricted to the coordinates in `dims`, by the
/// double description method in exact integer arithmetic. Coefficients of
/// dropped coordinates are zero. Facets are scaled to coprime integers
/// (orientation preserved) and returned sorted. Throws std::invalid_argument
/// if the projection is not full-dimensional and CapExceeded when over budget.
std::vector<BellInequality> enumerate_facets(const std::vector<ExactBehavior>& vertices,
                                             const std::vector<int>& dims,
                                             FacetBudget budget = {});

/// Projects every vertex onto `dims` (other coordinates zeroed), deduplicated.
std::vector<ExactBehavior> project(const std::vector<ExactBehavior>& vertices,
                                   const std::vector<int>& dims);

/// Distinct behaviors of the d = 4, n = 2 loops restricted to E0, E1, E12.
std::vector<ExactBehavior> nearest_neighbor_vertices();

/// Integer multiple with coprime entries, positive scale only.
BellInequality normalize(const BellInequality& ineq);

/// Element of the 16-element relabelling group: reflection, output flips
/// per input, then input swap.
struct Relabeling {
  bool reflect = false;
  bool flip0 = false;
  bool flip1 = false;
  bool swap_inputs = false;
};

std::vector<Relabeling> symmetry_group();
BellInequality apply(const Relabeling& g, const BellInequality& ineq);
ExactBehavior apply(const Relabeling& g, const ExactBehavior& b);

/// Lexicographically smallest normalized image under the group.
BellInequality canonical_form(const BellInequality& ineq);

/// Orbits as lists of input indices, ordered by first member.
std::vector<std::vector<std::size_t>> symmetry_classes(const std::vector<BellInequality>& ineqs);

/// P(a1 a2 a3 | x1 x2 x3), index ((x1 x2 x3) << 3) | (a1 a2 a3), site 1 most
/// significant in both triples.
struct TripartiteBox {
  std::array<double, 64> p{};

  double& at(int a1, int a2, int a3, int x1, int x2, int x3) {
    return p[index(a1, a2, a3, x1, x2, x3)];
  }
  double at(int a1, int a2, int a3, int x1, int x2, int x3) const {
    return p[index(a1, a2, a3, x1, x2, x3)];
  }
  static int index(int a1, int a2, int a3, int x1, int x2, int x3) {
    return (((x1 << 2) | (x2 << 1) | x3) << 3) | ((a1 << 2) | (a2 << 1) | a3);
  }

  static TripartiteBox deterministic(Strategy s1, Strategy s2, Strategy s3);
  static TripartiteBox uniform();
  /// Throws std::invalid_argument unless nonnegative, normalized and
  /// non-signalling within `tol`.
  void validate(double tol = 1e-10) const;

  /// Full-correlator coordinates, see `box_correlator_labels`.
  Eigen::Matrix<double, 26, 1> correlators() const;
  /// The behavior seen by the inequality: E from site 1, E12 from (1,2),
  /// E13 from (1,3).
  Behavior behavior() const;
};

/// Ordering of TripartiteBox::correlators: <A_x^i> (i = 1..3), <A^i A^j> for
/// (1,2), (1,3), (2,3), then <A^1 A^2 A^3>.
std::vector<std::string> box_correlator_labels();

/// Minimum of the inequality over mixtures of the 64 deterministic tripartite
/// strategies, with P12 = P23 imposed when `ti_constraint`. Exact LP; the
/// optimal mixture is re-evaluated as a certificate.
struct TripartiteOptimum {
  Rational value;
  std::vector<Rational> weights;  // index (s1 s2 s3) base 4
};
TripartiteOptimum tripartite_local_optimum(const BellInequality& ineq, bool ti_constraint);
Rational tripartite_local_bound(const BellInequality& ineq, bool ti_constraint);

/// LP membership in the convex hull of the deterministic tripartite boxes.
bool is_tripartite_local(const TripartiteBox& box, double tol = 1e-9);

/// local_bound - tripartite_local_bound(ineq, true).
Rational genuine_ti_violation_gap(const BellInequality& ineq);

/// Noise-mixing certificate for an observed TI box Q (three consecutive
/// sites of a TI state): minimizes I over Q~ = (1 - p) Q + p N with N TI
/// local and Q~ tripartite local.
struct NoisyBoxResult {
  bool feasible = false;
  double value = 0.0;         // min I(Q~)
  double noise_weight = 0.0;  // p at the optimum
  double gap = 0.0;           // bound - value
  bool genuine(double tol = 1e-6) const { return feasible && gap > tol; }
};
NoisyBoxResult noisy_box_gap(const BellInequality& ineq, const TripartiteBox& observed);

}  // namespace tichain
