#pragma once

// Classical translation-invariant marginals: consistency, recursive extension
// and the domino-loop description of the extreme points.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tichain/errors.hpp"
#include "tichain/rational.hpp"

namespace tichain {

/// Probability table over strings x_1..x_n of symbols in {0..d-1}. Entry
/// order is lexicographic with x_1 most significant.
template <class Scalar>
class BasicJointDistribution {
 public:
  BasicJointDistribution() = default;
  BasicJointDistribution(int d, int n, std::vector<Scalar> probs, double tol = 1e-12)
      : d_(d), n_(n), probs_(std::move(probs)) {
    if (d < 1 || n < 1) throw std::invalid_argument("distribution: d and n must be positive");
    if (static_cast<double>(probs_.size()) != std::pow(double(d), double(n))) {
      throw std::invalid_argument("distribution: table size is not d^n");
    }
    Scalar total = 0;
    for (const auto& p : probs_) {
      if (p < 0) throw std::invalid_argument("distribution: negative entry");
      total += p;
    }
    using std::abs;
    if (abs(total - Scalar(1)) > Scalar(tol)) {
      throw std::invalid_argument("distribution: entries do not sum to one");
    }
  }

  static BasicJointDistribution uniform(int d, int n) {
    const auto size = static_cast<std::size_t>(std::pow(double(d), double(n)));
    return BasicJointDistribution(d, n, std::vector<Scalar>(size, Scalar(1) / Scalar(size)));
  }

  int d() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return probs_.size(); }
  const std::vector<Scalar>& probs() const { return probs_; }
  const Scalar& operator[](std::size_t index) const { return probs_[index]; }

  Scalar at(std::span<const int> symbols) const { return probs_[encode(symbols)]; }

  std::size_t encode(std::span<const int> symbols) const {
    std::size_t index = 0;
    for (int s : symbols) index = index * d_ + static_cast<std::size_t>(s);
    return index;
  }
  std::vector<int> decode(std::size_t index) const {
    std::vector<int> out(n_);
    for (int k = n_; k-- > 0;) {
      out[k] = static_cast<int>(index % d_);
      index /= d_;
    }
    return out;
  }

  /// Marginal on `count` consecutive sites starting at `first` (0-based).
  BasicJointDistribution window(int first, int count) const {
    if (first < 0 || count < 1 || first + count > n_) {
      throw std::out_of_range("distribution: window outside the table");
    }
    return marginal(range(first, count));
  }

  /// Marginal on an ascending list of sites.
  BasicJointDistribution marginal(const std::vector<int>& sites) const {
    const int k = static_cast<int>(sites.size());
    std::vector<Scalar> out(static_cast<std::size_t>(std::pow(double(d_), double(k))), Scalar(0));
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (probs_[i] == 0) continue;
      const auto x = decode(i);
      std::size_t j = 0;
      for (int s : sites) j = j * d_ + static_cast<std::size_t>(x.at(s));
      out[j] += probs_[i];
    }
    BasicJointDistribution m;
    m.d_ = d_;
    m.n_ = k;
    m.probs_ = std::move(out);
    return m;
  }

  /// Independent composition: a string of this followed by one of `other`.
  BasicJointDistribution compose(const BasicJointDistribution& other) const {
    if (other.d_ != d_) throw std::invalid_argument("distribution: alphabet mismatch");
    std::vector<Scalar> out(probs_.size() * other.probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      for (std::size_t j = 0; j < other.probs_.size(); ++j) {
        out[i * other.probs_.size() + j] = probs_[i] * other.probs_[j];
      }
    }
    BasicJointDistribution m;
    m.d_ = d_;
    m.n_ = n_ + other.n_;
    m.probs_ = std::move(out);
    return m;
  }

  /// Unchecked construction, for tables built by trusted arithmetic.
  static BasicJointDistribution from_trusted(int d, int n, std::vector<Scalar> probs) {
    BasicJointDistribution m;
    m.d_ = d;
    m.n_ = n;
    m.probs_ = std::move(probs);
    return m;
  }

 private:
  static std::vector<int> range(int first, int count) {
    std::vector<int> v(count);
    for (int i = 0; i < count; ++i) v[i] = first + i;
    return v;
  }

  int d_ = 1;
  int n_ = 1;
  std::vector<Scalar> probs_{Scalar(1)};
};

using JointDistribution = BasicJointDistribution<double>;
using ExactJointDistribution = BasicJointDistribution<Rational>;

template <class Scalar>
double l1_distance(const BasicJointDistribution<Scalar>& a, const BasicJointDistribution<Scalar>& b) {
  if (a.d() != b.d() || a.n() != b.n()) throw std::invalid_argument("l1_distance: shape mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(to_double(a[i] - b[i]));
  return total;
}

/// Cyclic sequence of n-symbol tiles where the last n-1 symbols of each tile
/// equal the first n-1 symbols of the next. Tiles are stored base-d encoded.
class DominoLoop {
 public:
  DominoLoop(int d, int n, std::vector<std::uint32_t> tiles);
  /// Builds from explicit symbol vectors; throws if the tiles are not an
  /// irreducible loop.
  static DominoLoop from_symbols(int d, const std::vector<std::vector<int>>& tiles);

  int d() const { return d_; }
  int n() const { return n_; }
  std::size_t size() const { return tiles_.size(); }
  const std::vector<std::uint32_t>& tiles() const { return tiles_; }
  std::vector<int> symbols(std::size_t s) const;
  /// First symbol of each tile: the periodic string the loop describes.
  std::vector<int> sequence() const;

  /// Rotation starting at the lexicographically smallest tile.
  DominoLoop canonical() const;

  friend bool operator==(const DominoLoop&, const DominoLoop&) = default;
  friend auto operator<=>(const DominoLoop& a, const DominoLoop& b) {
    return a.tiles_ <=> b.tiles_;
  }

 private:
  int d_;
  int n_;
  std::vector<std::uint32_t> tiles_;
};

std::string to_string(const DominoLoop& loop);

struct LoopTerm {
  double weight;
  DominoLoop loop;
};

struct LoopDecomposition {
  std::vector<LoopTerm> terms;
};

/// True iff the left (n-1)-site marginal equals the right one within `tol`.
template <class Scalar>
bool check_ti_consistency(const BasicJointDistribution<Scalar>& p, double tol = 1e-12) {
  if (p.n() == 1) return true;
  const auto left = p.window(0, p.n() - 1);
  const auto right = p.window(1, p.n() - 1);
  for (std::size_t i = 0; i < left.size(); ++i) {
    using std::abs;
    if (abs(left[i] - right[i]) > Scalar(tol)) return false;
  }
  return true;
}

/// Extends a TI-consistent P on n sites to a TI distribution on `sites`
/// sites via the conditional recurrence. Zero-probability contexts continue
/// uniformly. Throws std::invalid_argument for inconsistent input and
/// CapExceeded when d^sites exceeds `max_entries`.
JointDistribution extend(const JointDistribution& p, int sites, double tol = 1e-10,
                         std::size_t max_entries = std::size_t{1} << 26);

struct EnumerationLimits {
  std::uint64_t max_edges = 1'000'000;
  std::uint64_t max_loops = 2'000'000;
};

/// All irreducible domino loops (simple cycles of the de Bruijn graph on
/// (n-1)-tuples), canonical rotation, sorted.
std::vector<DominoLoop> enumerate_extreme_points(int d, int n, EnumerationLimits limits = {});

/// Streams the same loops as enumerate_extreme_points without storing them,
/// in discovery order. Returns the number of loops visited.
std::uint64_t for_each_extreme_point(int d, int n,
                                     const std::function<void(const DominoLoop&)>& visit,
                                     std::uint64_t max_edges = EnumerationLimits{}.max_edges);

template <class Scalar = double>
BasicJointDistribution<Scalar> loop_distribution(const DominoLoop& loop) {
  const auto size = static_cast<std::size_t>(std::pow(double(loop.d()), double(loop.n())));
  std::vector<Scalar> probs(size, Scalar(0));
  const Scalar w = Scalar(1) / Scalar(static_cast<long>(loop.size()));
  for (auto t : loop.tiles()) probs[t] += w;
  return BasicJointDistribution<Scalar>::from_trusted(loop.d(), loop.n(), std::move(probs));
}

/// Writes P as a convex combination of loop distributions.
LoopDecomposition decompose(const JointDistribution& p, double tol = 1e-10);

JointDistribution recombine(const LoopDecomposition& dec);

/// True iff `tiles` form a closed domino chain visiting every (n-1)-symbol
/// node at most once.
bool is_irreducible_loop(const std::vector<std::vector<int>>& tiles);

}  // namespace tichain
