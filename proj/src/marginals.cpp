#include "tichain/marginals.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace tichain {

namespace {

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / std::max<std::uint64_t>(base, 1)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    out *= base;
  }
  return out;
}

// Johnson's simple-cycle search on the de Bruijn graph whose nodes are
// (n-1)-tuples and whose edges are n-tuples. Iterative to keep the stack
// bounded for long cycles.
class DeBruijnCycles {
 public:
  DeBruijnCycles(int d, int n)
      : d_(d), n_(n), nodes_(static_cast<std::uint32_t>(ipow(d, n - 1))) {}

  template <class Emit>
  void run(Emit&& emit) {
    blocked_.assign(nodes_, false);
    blockers_.assign(nodes_, {});
    std::vector<std::uint32_t> cycle;
    for (std::uint32_t s = 0; s < nodes_; ++s) {
      for (std::uint32_t v = s; v < nodes_; ++v) {
        blocked_[v] = false;
        blockers_[v].clear();
      }
      stack_.clear();
      stack_.push_back({s, 0, 0, false});
      blocked_[s] = true;
      while (!stack_.empty()) {
        Frame& f = stack_.back();
        if (f.next < d_) {
          const int c = f.next++;
          const std::uint32_t tile = f.node * d_ + c;
          const std::uint32_t w = tile % nodes_;
          if (w < s) continue;
          if (w == s) {
            cycle.clear();
            for (std::size_t i = 1; i < stack_.size(); ++i) cycle.push_back(stack_[i].in_tile);
            cycle.push_back(tile);
            emit(cycle);
            stack_.back().found = true;
          } else if (!blocked_[w]) {
            blocked_[w] = true;
            stack_.push_back({w, 0, tile, false});
          }
          continue;
        }
        const Frame done = f;
        stack_.pop_back();
        if (done.found) {
          unblock(done.node);
        } else {
          for (int c = 0; c < d_; ++c) {
            const std::uint32_t w = (done.node * d_ + c) % nodes_;
            if (w < s) continue;
            auto& b = blockers_[w];
            if (std::find(b.begin(), b.end(), done.node) == b.end()) b.push_back(done.node);
          }
        }
        if (done.found && !stack_.empty()) stack_.back().found = true;
      }
    }
  }

 private:
  struct Frame {
    std::uint32_t node;
    int next;
    std::uint32_t in_tile;
    bool found;
  };

  void unblock(std::uint32_t u) {
    std::vector<std::uint32_t> work{u};
    blocked_[u] = false;
    while (!work.empty()) {
      const auto v = work.back();
      work.pop_back();
      auto pending = std::move(blockers_[v]);
      blockers_[v].clear();
      for (auto w : pending) {
        if (blocked_[w]) {
          blocked_[w] = false;
          work.push_back(w);
        }
      }
    }
  }

  int d_;
  int n_;
  std::uint32_t nodes_;
  std::vector<bool> blocked_;
  std::vector<std::vector<std::uint32_t>> blockers_;
  std::vector<Frame> stack_;
};

void check_edge_budget(int d, int n, std::uint64_t max_edges) {
  if (d < 1 || n < 1) throw std::invalid_argument("enumerate: d and n must be positive");
  if (ipow(d, n) > max_edges) {
    throw CapExceeded("enumerate: d^n = " + std::to_string(ipow(d, n)) +
                      " de Bruijn edges exceeds the configured cap");
  }
}

}  // namespace

DominoLoop::DominoLoop(int d, int n, std::vector<std::uint32_t> tiles)
    : d_(d), n_(n), tiles_(std::move(tiles)) {
  if (tiles_.empty()) throw std::invalid_argument("domino loop: no tiles");
  const auto nodes = static_cast<std::uint32_t>(ipow(d, n - 1));
  const auto edges = ipow(d, n);
  std::set<std::uint32_t> seen;
  for (std::size_t s = 0; s < tiles_.size(); ++s) {
    const auto t = tiles_[s];
    const auto next = tiles_[(s + 1) % tiles_.size()];
    if (t >= edges) throw std::invalid_argument("domino loop: tile out of range");
    if (t % nodes != next / d) throw std::invalid_argument("domino loop: tiles do not overlap");
    if (!seen.insert(t / d).second) throw std::invalid_argument("domino loop: node revisited");
  }
}

DominoLoop DominoLoop::from_symbols(int d, const std::vector<std::vector<int>>& tiles) {
  if (!is_irreducible_loop(tiles)) {
    throw std::invalid_argument("domino loop: tiles are not an irreducible loop");
  }
  const int n = static_cast<int>(tiles.front().size());
  std::vector<std::uint32_t> encoded;
  for (const auto& tile : tiles) {
    std::uint32_t e = 0;
    for (int s : tile) {
      if (s < 0 || s >= d) throw std::invalid_argument("domino loop: symbol out of range");
      e = e * d + s;
    }
    encoded.push_back(e);
  }
  return DominoLoop(d, n, std::move(encoded));
}

std::vector<int> DominoLoop::symbols(std::size_t s) const {
  std::vector<int> out(n_);
  auto t = tiles_.at(s);
  for (int k = n_; k-- > 0;) {
    out[k] = static_cast<int>(t % d_);
    t /= d_;
  }
  return out;
}

std::vector<int> DominoLoop::sequence() const {
  std::vector<int> out;
  out.reserve(tiles_.size());
  for (std::size_t s = 0; s < tiles_.size(); ++s) out.push_back(symbols(s).front());
  return out;
}

DominoLoop DominoLoop::canonical() const {
  const auto it = std::min_element(tiles_.begin(), tiles_.end());
  std::vector<std::uint32_t> rotated(it, tiles_.end());
  rotated.insert(rotated.end(), tiles_.begin(), it);
  return DominoLoop(d_, n_, std::move(rotated));
}

std::string to_string(const DominoLoop& loop) {
  std::ostringstream os;
  os << '[';
  for (std::size_t s = 0; s < loop.size(); ++s) {
    if (s) os << ',';
    os << '(';
    const auto sym = loop.symbols(s);
    for (std::size_t k = 0; k < sym.size(); ++k) os << (k ? "," : "") << sym[k];
    os << ')';
  }
  os << ']';
  return os.str();
}

JointDistribution extend(const JointDistribution& p, int sites, double tol,
                         std::size_t max_entries) {
  const int n = p.n();
  const int d = p.d();
  if (sites < n) throw std::invalid_argument("extend: target shorter than the input window");
  if (!check_ti_consistency(p, tol)) {
    throw std::invalid_argument("extend: input is not TI consistent");
  }
  if (ipow(d, sites) > max_entries) throw CapExceeded("extend: table would exceed the entry cap");

  const std::size_t contexts = ipow(d, n - 1);
  std::vector<double> left(contexts, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) left[i / d] += p[i];

  std::vector<double> q = p.probs();
  for (int k = n; k < sites; ++k) {
    std::vector<double> next(q.size() * d, 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const std::size_t ctx = i % contexts;
      for (int c = 0; c < d; ++c) {
        const double cond = left[ctx] > 0.0 ? p[ctx * d + c] / left[ctx] : 1.0 / d;
        next[i * d + c] = q[i] * cond;
      }
    }
    q = std::move(next);
  }
  return JointDistribution::from_trusted(d, sites, std::move(q));
}

std::uint64_t for_each_extreme_point(int d, int n,
                                     const std::function<void(const DominoLoop&)>& visit,
                                     std::uint64_t max_edges) {
  check_edge_budget(d, n, max_edges);
  std::uint64_t count = 0;
  DeBruijnCycles(d, n).run([&](const std::vector<std::uint32_t>& tiles) {
    ++count;
    visit(DominoLoop(d, n, tiles));
  });
  return count;
}

std::vector<DominoLoop> enumerate_extreme_points(int d, int n, EnumerationLimits limits) {
  check_edge_budget(d, n, limits.max_edges);
  std::vector<DominoLoop> loops;
  DeBruijnCycles(d, n).run([&](const std::vector<std::uint32_t>& tiles) {
    if (loops.size() >= limits.max_loops) {
      throw CapExceeded("enumerate: more than " + std::to_string(limits.max_loops) +
                        " irreducible loops for d=" + std::to_string(d) +
                        ", n=" + std::to_string(n));
    }
    // Cycles start at their smallest node, whose tile is the smallest one,
    // so the discovery rotation is already canonical.
    loops.emplace_back(d, n, tiles);
  });
  std::sort(loops.begin(), loops.end());
  return loops;
}

LoopDecomposition decompose(const JointDistribution& p, double tol) {
  if (!check_ti_consistency(p, tol)) {
    throw std::invalid_argument("decompose: input is not TI consistent");
  }
  const int d = p.d();
  const std::uint32_t nodes = static_cast<std::uint32_t>(ipow(d, p.n() - 1));
  // Entries below this level are treated as already removed.
  const double zero = std::max(tol * 1e-2, 1e-14);
  std::vector<double> residual = p.probs();
  LoopDecomposition out;

  const std::size_t max_rounds = residual.size() + 1;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::size_t start = residual.size();
    for (std::size_t i = 0; i < residual.size(); ++i) {
      if (residual[i] < -1e-9) throw NumericalError("decompose: residual became negative");
      if (residual[i] > zero && start == residual.size()) start = i;
    }
    if (start == residual.size()) return out;

    // Follow smallest supported successors until a node repeats.
    std::vector<std::uint32_t> walk{static_cast<std::uint32_t>(start)};
    std::unordered_map<std::uint32_t, std::size_t> position{{walk.back() / d, 0}};
    std::size_t cycle_start = 0;
    for (;;) {
      const std::uint32_t node = walk.back() % nodes;
      std::uint32_t next = std::numeric_limits<std::uint32_t>::max();
      for (int c = 0; c < d; ++c) {
        if (residual[node * d + c] > zero) {
          next = node * d + c;
          break;
        }
      }
      if (next == std::numeric_limits<std::uint32_t>::max()) {
        throw NumericalError("decompose: residual support is not closed under successors");
      }
      if (auto it = position.find(node); it != position.end()) {
        cycle_start = it->second;
        break;
      }
      position.emplace(node, walk.size());
      walk.push_back(next);
    }
    std::vector<std::uint32_t> tiles(walk.begin() + static_cast<std::ptrdiff_t>(cycle_start),
                                     walk.end());
    double lambda = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < tiles.size(); ++i) {
      if (residual[tiles[i]] < lambda) {
        lambda = residual[tiles[i]];
        argmin = i;
      }
    }
    for (auto t : tiles) residual[t] -= lambda;
    residual[tiles[argmin]] = 0.0;
    DominoLoop loop = DominoLoop(d, p.n(), std::move(tiles)).canonical();
    out.terms.push_back({lambda * static_cast<double>(loop.size()), std::move(loop)});
  }
  throw NumericalError("decompose: did not terminate within the support size");
}

JointDistribution recombine(const LoopDecomposition& dec) {
  if (dec.terms.empty()) throw std::invalid_argument("recombine: empty decomposition");
  const auto& first = dec.terms.front().loop;
  std::vector<double> probs(static_cast<std::size_t>(ipow(first.d(), first.n())), 0.0);
  for (const auto& term : dec.terms) {
    const double w = term.weight / static_cast<double>(term.loop.size());
    for (auto t : term.loop.tiles()) probs[t] += w;
  }
  return JointDistribution::from_trusted(first.d(), first.n(), std::move(probs));
}

bool is_irreducible_loop(const std::vector<std::vector<int>>& tiles) {
  if (tiles.empty()) return false;
  const std::size_t n = tiles.front().size();
  if (n == 0) return false;
  std::set<std::vector<int>> nodes;
  for (std::size_t s = 0; s < tiles.size(); ++s) {
    const auto& t = tiles[s];
    const auto& next = tiles[(s + 1) % tiles.size()];
    if (t.size() != n) return false;
    if (!std::equal(t.begin() + 1, t.end(), next.begin())) return false;
    if (!nodes.emplace(t.begin(), t.end() - 1).second) return false;
  }
  return true;
}

}  // namespace tichain
