// Double description method for facet enumeration of behavior polytopes.

#include <algorithm>
#include <set>

#include <boost/dynamic_bitset.hpp>

#include "tichain/bell_polytope.hpp"

namespace tichain {

namespace {

using IntVec = std::vector<BigInt>;
using Bits = boost::dynamic_bitset<>;

struct Ray {
  IntVec y;
  Bits zeros;  // processed constraints the ray saturates
};

BigInt dot(const IntVec& a, const IntVec& b) {
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  }
  return s;
}

void reduce(IntVec& v) {
  BigInt g = 0;
  for (const auto& x : v) g = gcd(g, x);
  if (g > 1) {
    for (auto& x : v) x /= g;
  }
}

// Integer multiple of a rational vector.
IntVec integerize(const std::vector<Rational>& v) {
  BigInt lcm = 1;
  for (const auto& q : v) {
    const BigInt den = denominator(q);
    lcm = lcm / gcd(lcm, den) * den;
  }
  IntVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = numerator(v[i]) * (lcm / denominator(v[i]));
  reduce(out);
  return out;
}

// Greedy choice of linearly independent rows; returns their indices.
std::vector<std::size_t> independent_rows(const std::vector<IntVec>& rows, std::size_t dim) {
  std::vector<std::vector<Rational>> basis;
  std::vector<std::size_t> pivots, chosen;
  for (std::size_t r = 0; r < rows.size() && chosen.size() < dim; ++r) {
    std::vector<Rational> v(rows[r].begin(), rows[r].end());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (v[pivots[k]] == 0) continue;
      const Rational f = v[pivots[k]] / basis[k][pivots[k]];
      for (std::size_t j = 0; j < dim; ++j) v[j] -= f * basis[k][j];
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (v[j] != 0) {
        basis.push_back(std::move(v));
        pivots.push_back(j);
        chosen.push_back(r);
        break;
      }
    }
  }
  return chosen;
}

// Columns of the inverse of the square matrix formed by `rows`.
std::vector<IntVec> inverse_columns(const std::vector<IntVec>& rows) {
  const std::size_t n = rows.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(rows[i][j]);
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (a[p][c] == 0) ++p;
    std::swap(a[p], a[c]);
    const Rational inv = Rational(1) / a[c][c];
    for (auto& x : a[c]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<IntVec> cols;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = a[i][n + j];
    cols.push_back(integerize(col));
  }
  return cols;
}

}  // namespace

std::vector<ExactBehavior> project(const std::vector<ExactBehavior>& vertices,
                                   const std::vector<int>& dims) {
  std::vector<ExactBehavior> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) {
    ExactBehavior p;
    for (int d : dims) p.e(d) = v.e(d);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ExactBehavior> nearest_neighbor_vertices() {
  std::vector<ExactBehavior> all;
  for (const auto& loop : enumerate_extreme_points(4, 2)) all.push_back(loop_behavior(loop));
  return project(all, {kE0, kE1, kE12_00, kE12_01, kE12_10, kE12_11});
}

std::vector<BellInequality> enumerate_facets(const std::vector<ExactBehavior>& vertices,
                                             const std::vector<int>& dims, FacetBudget budget) {
  if (dims.empty()) throw std::invalid_argument("enumerate_facets: empty projection");
  for (int d : dims) {
    if (d < 0 || d >= kNumCoords) throw std::invalid_argument("enumerate_facets: bad coordinate");
  }
  if (std::set<int>(dims.begin(), dims.end()).size() != dims.size()) {
    throw std::invalid_argument("enumerate_facets: repeated coordinate");
  }
  const auto points = project(vertices, dims);
  const std::size_t k = dims.size();
  const std::size_t dim = k + 1;
  if (static_cast<std::uint64_t>(points.size()) * k > budget.max_input) {
    throw CapExceeded("enumerate_facets: vertex count x dimension exceeds budget");
  }

  // Homogenized constraint rows (1, p), scaled to integers, in lex order.
  std::vector<IntVec> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    std::vector<Rational> r(dim);
    r[0] = 1;
    for (std::size_t j = 0; j < k; ++j) r[j + 1] = p.e(dims[j]);
    rows.push_back(integerize(r));
  }
  const std::size_t m = rows.size();

  const auto basis = independent_rows(rows, dim);
  if (basis.size() != dim) {
    throw std::invalid_argument("enumerate_facets: vertices are not full-dimensional in the projection");
  }
  std::vector<IntVec> basis_rows;
  for (auto b : basis) basis_rows.push_back(rows[b]);

  std::vector<Ray> rays;
  const auto cols = inverse_columns(basis_rows);
  for (std::size_t j = 0; j < dim; ++j) {
    Ray r{cols[j], Bits(m)};
    for (std::size_t i = 0; i < dim; ++i) {
      if (i != j) r.zeros.set(basis[i]);
    }
    rays.push_back(std::move(r));
  }

  std::vector<bool> done(m, false);
  for (auto b : basis) done[b] = true;

  for (std::size_t c = 0; c < m; ++c) {
    if (done[c]) continue;
    std::vector<BigInt> s(rays.size());
    std::vector<std::size_t> pos, neg, zero;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      s[r] = dot(rows[c], rays[r].y);
      if (s[r] > 0) {
        pos.push_back(r);
      } else if (s[r] < 0) {
        neg.push_back(r);
      } else {
        zero.push_back(r);
      }
    }

    std::vector<Ray> next;
    for (auto p : pos) {
      for (auto n : neg) {
        Bits common = rays[p].zeros & rays[n].zeros;
        if (common.count() + 2 < dim) continue;
        bool adjacent = true;
        for (std::size_t o = 0; o < rays.size() && adjacent; ++o) {
          if (o != p && o != n && common.is_subset_of(rays[o].zeros)) adjacent = false;
        }
        if (!adjacent) continue;
        Ray r{IntVec(dim), std::move(common)};
        const BigInt sp = s[p], sn = -s[n];
        for (std::size_t j = 0; j < dim; ++j) r.y[j] = sp * rays[n].y[j] + sn * rays[p].y[j];
        reduce(r.y);
        r.zeros.set(c);
        next.push_back(std::move(r));
        if (next.size() + pos.size() + zero.size() > budget.max_rays) {
          throw CapExceeded("enumerate_facets: intermediate ray count exceeds budget");
        }
      }
    }
    for (auto p : pos) next.push_back(std::move(rays[p]));
    for (auto z : zero) {
      rays[z].zeros.set(c);
      next.push_back(std::move(rays[z]));
    }
    rays = std::move(next);
    done[c] = true;
  }

  std::vector<BellInequality> facets;
  for (const auto& r : rays) {
    CoordVector<Rational> coeffs = CoordVector<Rational>::Zero();
    for (std::size_t j = 0; j < k; ++j) coeffs(dims[j]) = Rational(r.y[j + 1]);
    facets.push_back(normalize(BellInequality(coeffs, Rational(-r.y[0]))));
  }
  std::sort(facets.begin(), facets.end(), [](const BellInequality& a, const BellInequality& b) {
    for (int i = 0; i < kNumCoords; ++i) {
      if (a.coeffs(i) != b.coeffs(i)) return a.coeffs(i) < b.coeffs(i);
    }
    return a.bound < b.bound;
  });
  return facets;
}

}  // namespace tichain
