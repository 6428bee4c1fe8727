#include "tichain/bell_polytope.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "tichain/lp.hpp"
#include "tichain/quantum_core.hpp"

namespace tichain {

namespace {

int val(int s, int x) { return 1 - 2 * ((s >> x) & 1); }

// Row-echelon accumulator for exact rank computations.
class ExactSpan {
 public:
  explicit ExactSpan(int dim) : dim_(dim) {}

  void add(std::vector<Rational> v) {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const int p = pivots_[k];
      if (v[p] != 0) {
        const Rational f = v[p];
        for (int j = 0; j < dim_; ++j) {
          if (rows_[k][j] != 0) v[j] -= f * rows_[k][j];
        }
      }
    }
    for (int j = 0; j < dim_; ++j) {
      if (v[j] != 0) {
        const Rational inv = Rational(1) / v[j];
        for (auto& x : v) x *= inv;
        // Keep earlier rows reduced against the new pivot.
        for (auto& row : rows_) {
          if (row[j] != 0) {
            const Rational f = row[j];
            for (int c = 0; c < dim_; ++c) row[c] -= f * v[c];
          }
        }
        rows_.push_back(std::move(v));
        pivots_.push_back(j);
        return;
      }
    }
  }
  int rank() const { return static_cast<int>(rows_.size()); }
  bool full() const { return rank() == dim_; }

 private:
  int dim_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<int> pivots_;
};

CoordVector<Rational> permute(const CoordVector<Rational>& c, const Relabeling& g) {
  BasicBehavior<Rational> b;
  b.e = c;
  BasicBehavior<Rational> r = b;
  if (g.reflect) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        r.E12(x, y) = b.E12(y, x);
        r.E13(x, y) = b.E13(y, x);
      }
    }
  }
  const int sign[2] = {g.flip0 ? -1 : 1, g.flip1 ? -1 : 1};
  for (int x = 0; x < 2; ++x) {
    r.E(x) *= sign[x];
    for (int y = 0; y < 2; ++y) {
      r.E12(x, y) *= sign[x] * sign[y];
      r.E13(x, y) *= sign[x] * sign[y];
    }
  }
  if (g.swap_inputs) {
    const auto t = r;
    for (int x = 0; x < 2; ++x) {
      r.E(x) = t.E(1 - x);
      for (int y = 0; y < 2; ++y) {
        r.E12(x, y) = t.E12(1 - x, 1 - y);
        r.E13(x, y) = t.E13(1 - x, 1 - y);
      }
    }
  }
  return r.e;
}

bool lex_less(const BellInequality& a, const BellInequality& b) {
  for (int i = 0; i < kNumCoords; ++i) {
    if (a.coeffs(i) != b.coeffs(i)) return a.coeffs(i) < b.coeffs(i);
  }
  return a.bound < b.bound;
}

// Objective coefficient of a deterministic strategy triple.
template <class Scalar>
Scalar triple_value(const BellInequality& ineq, int s1, int s2, int s3) {
  BasicBehavior<Scalar> b;
  for (int x = 0; x < 2; ++x) {
    b.E(x) = val(s1, x);
    for (int y = 0; y < 2; ++y) {
      b.E12(x, y) = val(s1, x) * val(s2, y);
      b.E13(x, y) = val(s1, x) * val(s3, y);
    }
  }
  return evaluate(ineq, b);
}

// 26 correlator features of a deterministic triple, in TripartiteBox order.
Eigen::Matrix<double, 26, 1> triple_features(int s1, int s2, int s3) {
  const int s[3] = {s1, s2, s3};
  Eigen::Matrix<double, 26, 1> f;
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    for (int x = 0; x < 2; ++x) f(k++) = val(s[i], x);
  }
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) f(k++) = val(s[i], x) * val(s[j], y);
    }
  }
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int z = 0; z < 2; ++z) f(k++) = val(s1, x) * val(s2, y) * val(s3, z);
    }
  }
  return f;
}

int ambient_of_default() {
  static const int dim = affine_dimension(vertex_behaviors());
  return dim;
}

}  // namespace

BellInequality::BellInequality(CoordVector<Rational> c, Rational local_bound, std::string label)
    : coeffs(std::move(c)), bound(std::move(local_bound)), name(std::move(label)) {
  bool any = false;
  for (int i = 0; i < kNumCoords; ++i) any = any || coeffs(i) != 0;
  if (!any) throw std::invalid_argument("BellInequality: all coefficients are zero");
}

BellInequality BellInequality::from_integers(const std::array<long, kNumCoords>& c,
                                             long local_bound, std::string label) {
  CoordVector<Rational> v;
  for (int i = 0; i < kNumCoords; ++i) v(i) = c[i];
  return BellInequality(v, Rational(local_bound), std::move(label));
}

const std::vector<BellInequality>& table1() {
  static const std::vector<BellInequality> rows = [] {
    struct Row {
      long bound;
      std::array<long, kNumCoords> c;
    };
    const Row data[] = {
        {-3, {-2, -2, 2, 2, -1, 1, 0, 1, 0, 0}},
        {-4, {-2, -4, -2, 2, 2, 2, 1, 0, 0, 1}},
        {-5, {-3, -3, 2, 2, 2, -3, 1, 0, -1, 2}},
        {-6, {-4, -6, -3, 2, 3, 2, 2, 0, 1, 1}},
        {-11, {-4, -12, -4, 6, 6, 6, 1, -1, -1, 4}},
        {-7, {-5, -5, 2, 3, 2, -4, 1, 1, -1, 3}},
        {-8, {-6, -8, -4, 3, 3, 2, 3, 1, 1, 1}},
        {-5, {-2, 2, 2, -2, -2, -4, 1, 1, 1, 2}},
        {-3, {-3, 1, 1, 1, 1, -1, 1, 0, -1, 1}},
        {-6, {-4, 2, 2, 2, 2, -4, 1, -1, -1, 3}},
        {-6, {-6, 0, 2, 3, 3, -2, 3, -1, -1, 1}},
    };
    std::vector<BellInequality> out;
    int id = 1;
    for (const auto& r : data) {
      out.push_back(BellInequality::from_integers(r.c, r.bound, "T1-" + std::to_string(id++)));
    }
    out[1].name = "I_T";
    out[3].name = "I_G";
    return out;
  }();
  return rows;
}

const BellInequality& table1_inequality(int id) {
  if (id < 1 || id > 11) throw std::out_of_range("table1: id must be in 1..11");
  return table1()[id - 1];
}

ExactBehavior loop_behavior(const DominoLoop& loop) {
  if (loop.d() != Strategy::kCount) {
    throw std::invalid_argument("loop_behavior: loop alphabet must be the 4 strategies");
  }
  const auto seq = loop.sequence();
  const std::size_t m = seq.size();
  std::array<long, kNumCoords> sum{};
  for (std::size_t t = 0; t < m; ++t) {
    const int a = seq[t], b = seq[(t + 1) % m], c = seq[(t + 2) % m];
    for (int x = 0; x < 2; ++x) {
      sum[kE0 + x] += val(a, x);
      for (int y = 0; y < 2; ++y) {
        sum[kE12_00 + 2 * x + y] += val(a, x) * val(b, y);
        sum[kE13_00 + 2 * x + y] += val(a, x) * val(c, y);
      }
    }
  }
  ExactBehavior out;
  for (int i = 0; i < kNumCoords; ++i) out.e(i) = Rational(sum[i], static_cast<long>(m));
  return out;
}

ExactBehavior deterministic_behavior(Strategy s) {
  return loop_behavior(DominoLoop(4, 3, {static_cast<std::uint32_t>(s.bits * 21)}));
}

const std::vector<ExactBehavior>& vertex_behaviors() {
  static std::once_flag once;
  static std::vector<ExactBehavior> cache;
  std::call_once(once, [] {
    std::vector<ExactBehavior> all;
    for_each_extreme_point(4, 3, [&](const DominoLoop& loop) { all.push_back(loop_behavior(loop)); });
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    cache = std::move(all);
  });
  return cache;
}

ExactJointDistribution loop_strategy_marginal(const DominoLoop& loop) {
  return loop_distribution<Rational>(loop);
}

Rational local_bound(const BellInequality& ineq) {
  const auto& v = vertex_behaviors();
  Rational best = evaluate(ineq, v.front());
  for (const auto& b : v) {
    Rational x = evaluate(ineq, b);
    if (x < best) best = x;
  }
  return best;
}

int affine_dimension(const std::vector<ExactBehavior>& points) {
  if (points.empty()) return -1;
  ExactSpan span(kNumCoords);
  for (const auto& p : points) {
    std::vector<Rational> d(kNumCoords);
    for (int i = 0; i < kNumCoords; ++i) d[i] = p.e(i) - points.front().e(i);
    span.add(std::move(d));
    if (span.full()) break;
  }
  return span.rank();
}

FacetCheck verify_facet(const BellInequality& ineq, const std::vector<ExactBehavior>& vertices) {
  FacetCheck r;
  r.valid = true;
  std::vector<ExactBehavior> saturating;
  for (const auto& b : vertices) {
    const Rational v = evaluate(ineq, b);
    if (v < ineq.bound) r.valid = false;
    if (v == ineq.bound) saturating.push_back(b);
  }
  r.tight = !saturating.empty();
  r.face_dim = affine_dimension(saturating);
  r.ambient_dim = &vertices == &vertex_behaviors() ? ambient_of_default() : affine_dimension(vertices);
  return r;
}

FacetCheck verify_facet(const BellInequality& ineq) { return verify_facet(ineq, vertex_behaviors()); }

BellInequality normalize(const BellInequality& ineq) {
  // Clear denominators, then divide by the gcd of all numerators.
  BigInt lcm = 1;
  auto update_lcm = [&](const Rational& q) {
    const BigInt den = denominator(q);
    lcm = lcm / gcd(lcm, den) * den;
  };
  for (int i = 0; i < kNumCoords; ++i) update_lcm(ineq.coeffs(i));
  update_lcm(ineq.bound);
  BigInt g = 0;
  std::array<BigInt, kNumCoords + 1> ints;
  for (int i = 0; i <= kNumCoords; ++i) {
    const Rational& q = i < kNumCoords ? ineq.coeffs(i) : ineq.bound;
    ints[i] = numerator(q) * (lcm / denominator(q));
    g = gcd(g, ints[i]);
  }
  BellInequality out = ineq;
  for (int i = 0; i < kNumCoords; ++i) out.coeffs(i) = Rational(ints[i] / g);
  out.bound = Rational(ints[kNumCoords] / g);
  return out;
}

std::vector<Relabeling> symmetry_group() {
  std::vector<Relabeling> g;
  for (int k = 0; k < 16; ++k) g.push_back({bool(k & 1), bool(k & 2), bool(k & 4), bool(k & 8)});
  return g;
}

BellInequality apply(const Relabeling& g, const BellInequality& ineq) {
  BellInequality out = ineq;
  out.coeffs = permute(ineq.coeffs, g);
  return out;
}

ExactBehavior apply(const Relabeling& g, const ExactBehavior& b) {
  ExactBehavior out;
  out.e = permute(b.e, g);
  return out;
}

BellInequality canonical_form(const BellInequality& ineq) {
  std::optional<BellInequality> best;
  for (const auto& g : symmetry_group()) {
    BellInequality img = normalize(apply(g, ineq));
    if (!best || lex_less(img, *best)) best = std::move(img);
  }
  best->name = ineq.name;
  return *best;
}

std::vector<std::vector<std::size_t>> symmetry_classes(const std::vector<BellInequality>& ineqs) {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<BellInequality> keys;
  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    const auto key = canonical_form(ineqs[i]);
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      classes.push_back({i});
    } else {
      classes[static_cast<std::size_t>(it - keys.begin())].push_back(i);
    }
  }
  return classes;
}

TripartiteBox TripartiteBox::deterministic(Strategy s1, Strategy s2, Strategy s3) {
  TripartiteBox b;
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) {
      for (int x3 = 0; x3 < 2; ++x3) b.at(s1.output(x1), s2.output(x2), s3.output(x3), x1, x2, x3) = 1.0;
    }
  }
  return b;
}

TripartiteBox TripartiteBox::uniform() {
  TripartiteBox b;
  b.p.fill(1.0 / 8.0);
  return b;
}

void TripartiteBox::validate(double tol) const {
  for (double v : p) {
    if (!(v >= -tol)) throw std::invalid_argument("TripartiteBox: negative or non-finite entry");
  }
  for (int xs = 0; xs < 8; ++xs) {
    double total = 0.0;
    for (int as = 0; as < 8; ++as) total += p[(xs << 3) | as];
    if (std::abs(total - 1.0) > tol) throw std::invalid_argument("TripartiteBox: not normalized");
  }
  // Marginal of any party must not depend on the other parties' inputs.
  for (int party = 0; party < 3; ++party) {
    const int bit = 2 - party;
    for (int xs = 0; xs < 8; ++xs) {
      if (xs & (1 << bit)) continue;
      const int xt = xs | (1 << bit);
      for (int rest = 0; rest < 8; ++rest) {
        if (rest & (1 << bit)) continue;
        const double a = p[(xs << 3) | rest] + p[(xs << 3) | rest | (1 << bit)];
        const double b = p[(xt << 3) | rest] + p[(xt << 3) | rest | (1 << bit)];
        if (std::abs(a - b) > tol) throw std::invalid_argument("TripartiteBox: signalling");
      }
    }
  }
}

Eigen::Matrix<double, 26, 1> TripartiteBox::correlators() const {
  // <prod_{i in S} A^i_{x_i}> averaged with the other inputs fixed to 0.
  auto corr = [&](int mask, int xs) {
    double total = 0.0;
    for (int as = 0; as < 8; ++as) {
      const int parity = __builtin_popcount(as & mask) & 1;
      total += (parity ? -1.0 : 1.0) * p[(xs << 3) | as];
    }
    return total;
  };
  Eigen::Matrix<double, 26, 1> f;
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    for (int x = 0; x < 2; ++x) f(k++) = corr(4 >> i, x << (2 - i));
  }
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) f(k++) = corr((4 >> i) | (4 >> j), (x << (2 - i)) | (y << (2 - j)));
    }
  }
  for (int xs = 0; xs < 8; ++xs) f(k++) = corr(7, xs);
  return f;
}

Behavior TripartiteBox::behavior() const {
  const auto f = correlators();
  Behavior b;
  b.E(0) = f(0);
  b.E(1) = f(1);
  for (int k = 0; k < 4; ++k) {
    b.e(kE12_00 + k) = f(6 + k);
    b.e(kE13_00 + k) = f(10 + k);
  }
  return b;
}

std::vector<std::string> box_correlator_labels() {
  std::vector<std::string> out;
  for (int i = 1; i <= 3; ++i) {
    for (int x = 0; x < 2; ++x) out.push_back("A" + std::to_string(i) + "_" + std::to_string(x));
  }
  for (auto [i, j] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        out.push_back("A" + std::to_string(i) + std::to_string(j) + "_" + std::to_string(x) +
                      std::to_string(y));
      }
    }
  }
  for (int xs = 0; xs < 8; ++xs) {
    out.push_back("A123_" + std::to_string(xs >> 2) + std::to_string((xs >> 1) & 1) +
                  std::to_string(xs & 1));
  }
  return out;
}

TripartiteOptimum tripartite_local_optimum(const BellInequality& ineq, bool ti_constraint) {
  const int rows = ti_constraint ? 9 : 1;
  LinearProgram<Rational> lp;
  lp.A = Matrix<Rational>::Zero(rows, 64);
  lp.b = Vector<Rational>::Zero(rows);
  lp.c = Vector<Rational>::Zero(64);
  lp.b(0) = 1;
  for (int s = 0; s < 64; ++s) {
    const int s1 = s >> 4, s2 = (s >> 2) & 3, s3 = s & 3;
    lp.c(s) = triple_value<Rational>(ineq, s1, s2, s3);
    lp.A(0, s) = 1;
    if (!ti_constraint) continue;
    int r = 1;
    for (int x = 0; x < 2; ++x) lp.A(r++, s) = val(s1, x) - val(s2, x);
    for (int x = 0; x < 2; ++x) lp.A(r++, s) = val(s2, x) - val(s3, x);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) lp.A(r++, s) = val(s1, x) * val(s2, y) - val(s2, x) * val(s3, y);
    }
  }
  const auto res = solve_lp(lp);
  if (res.status != LpStatus::kOptimal) {
    throw NumericalError("tripartite_local_bound: LP did not reach an optimum");
  }
  // Primal certificate: the mixture is feasible and attains the value.
  const Vector<Rational> residual = lp.A * res.x - lp.b;
  if (!(residual.array() == Rational(0)).all() || lp.c.dot(res.x) != res.value ||
      (res.x.array() < Rational(0)).any()) {
    throw NumericalError("tripartite_local_bound: certificate check failed");
  }
  TripartiteOptimum out;
  out.value = res.value;
  out.weights.assign(res.x.data(), res.x.data() + 64);
  return out;
}

Rational tripartite_local_bound(const BellInequality& ineq, bool ti_constraint) {
  return tripartite_local_optimum(ineq, ti_constraint).value;
}

bool is_tripartite_local(const TripartiteBox& box, double tol) {
  LinearProgram<double> lp;
  lp.A = RealMatrix::Zero(64, 64);
  lp.b = Eigen::VectorXd::Zero(64);
  lp.c = Eigen::VectorXd::Zero(64);
  for (int s = 0; s < 64; ++s) {
    const auto d = TripartiteBox::deterministic({s >> 4}, {(s >> 2) & 3}, {s & 3});
    for (int k = 0; k < 64; ++k) lp.A(k, s) = d.p[k];
  }
  for (int k = 0; k < 64; ++k) lp.b(k) = box.p[k];
  const auto res = solve_lp(lp, 1e-12);
  return res.infeasibility <= tol;
}

Rational genuine_ti_violation_gap(const BellInequality& ineq) {
  return local_bound(ineq) - tripartite_local_bound(ineq, true);
}

NoisyBoxResult noisy_box_gap(const BellInequality& ineq, const TripartiteBox& observed) {
  // Variables: q (64, unnormalized TI-local noise), w (64, tripartite-local
  // decomposition of the mixture), one slack for sum q <= 1.
  const auto Q = observed.correlators();
  const double iq = evaluate(ineq, observed.behavior());
  constexpr int kQ = 0, kW = 64, kSlack = 128, kVars = 129;
  constexpr int kRows = 26 + 16 + 2;
  LinearProgram<double> lp;
  lp.A = RealMatrix::Zero(kRows, kVars);
  lp.b = Eigen::VectorXd::Zero(kRows);
  lp.c = Eigen::VectorXd::Zero(kVars);
  for (int s = 0; s < 64; ++s) {
    const int s1 = s >> 4, s2 = (s >> 2) & 3, s3 = s & 3;
    const auto f = triple_features(s1, s2, s3);
    for (int k = 0; k < 26; ++k) {
      lp.A(k, kQ + s) = f(k) - Q(k);
      lp.A(k, kW + s) = -f(k);
    }
    // Noise is a TI-consistent mixture of strategy triples.
    lp.A(26 + s1 * 4 + s2, kQ + s) += 1;
    lp.A(26 + s2 * 4 + s3, kQ + s) -= 1;
    lp.A(42, kW + s) = 1;
    lp.A(43, kQ + s) = 1;
    lp.c(kQ + s) = triple_value<double>(ineq, s1, s2, s3) - iq;
  }
  for (int k = 0; k < 26; ++k) lp.b(k) = -Q(k);
  lp.b(42) = 1;
  lp.b(43) = 1;
  lp.A(43, kSlack) = 1;

  const auto res = solve_lp(lp, 1e-10);
  NoisyBoxResult out;
  if (res.status != LpStatus::kOptimal) return out;
  out.feasible = true;
  out.value = res.value + iq;
  out.noise_weight = res.x.segment(kQ, 64).sum();
  out.gap = to_double(ineq.bound) - out.value;
  return out;
}

}  // namespace tichain
