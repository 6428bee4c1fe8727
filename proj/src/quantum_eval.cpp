#include "tichain/quantum_eval.hpp"

#include <cmath>
#include <random>

namespace tichain {

namespace {

RealMatrix kron3(const RealMatrix& a, const RealMatrix& b, const RealMatrix& c) {
  return kron(kron(a, b), c);
}

Eigen::Index ring_dim(int sites) {
  Eigen::Index d = 1;
  for (int i = 0; i < sites; ++i) d *= 4;
  return d;
}

// Moves the last site to the front: index rest * 4 + a -> a * 4^(N-1) + rest.
void rotate(const Eigen::VectorXd& in, Eigen::VectorXd& out) {
  const Eigen::Index rest = in.size() / 4;
  Eigen::Map<const RealMatrix> src(in.data(), 4, rest);
  Eigen::Map<RealMatrix> dst(out.data(), rest, 4);
  dst.noalias() = src.transpose();
}

// out += term acting on sites 0, 1, 2 of in.
void apply_front(const RealMatrix& term_t, const Eigen::VectorXd& in, Eigen::VectorXd& out) {
  const Eigen::Index rest = in.size() / 64;
  Eigen::Map<const RealMatrix> src(in.data(), rest, 64);
  Eigen::Map<RealMatrix> dst(out.data(), rest, 64);
  dst.noalias() += src * term_t;
}

Eigen::VectorXd random_unit(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v.normalized();
}

void check_ring(int N, const EigenSolverOptions& opt) {
  if (N < 3) throw std::invalid_argument("ring: need at least 3 sites");
  if (N > opt.max_sites) throw CapExceeded("ring: size exceeds the configured cap");
}

RealMatrix random_dichotomic(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RealMatrix m(4, 4);
  for (int i = 0; i < 16; ++i) m(i) = g(rng);
  Eigen::HouseholderQR<RealMatrix> qr(m);
  const RealMatrix q = qr.householderQ();
  Eigen::Vector4d s;
  for (int i = 0; i < 4; ++i) s(i) = (rng() & 1) ? 1.0 : -1.0;
  return q * s.asDiagonal() * q.transpose();
}

std::vector<RealMatrix> register_terms(const BellInequality& ineq, const RegisterMeasurements& reg,
                                       int N) {
  std::vector<RealMatrix> terms;
  terms.reserve(N);
  for (int k = 0; k < N; ++k) {
    const auto& a = reg.sets[k % reg.m];
    const auto& b = reg.sets[((k + 1) % N) % reg.m];
    const auto& c = reg.sets[((k + 2) % N) % reg.m];
    terms.push_back(build_hamiltonian(ineq, a, b, c).term);
  }
  return terms;
}

}  // namespace

RealMatrix observable(const MeasurementPair& mp, int which) {
  if (which != 0 && which != 1) throw std::invalid_argument("observable: input must be 0 or 1");
  RealMatrix a = RealMatrix::Zero(4, 4);
  if (which == 0) {
    a.diagonal() << 1, -1, 1, -1;
    return a;
  }
  const double ct = std::cos(mp.theta), st = std::sin(mp.theta);
  const double cp = std::cos(mp.phi), sp = std::sin(mp.phi);
  a.block<2, 2>(0, 0) << ct, st, st, -ct;
  a.block<2, 2>(2, 2) << cp, sp, sp, -cp;
  return a;
}

LocalHamiltonianTerm build_hamiltonian(const BellInequality& ineq, const MeasurementPair& mp) {
  const ObservablePair a{observable(mp, 0), observable(mp, 1)};
  return build_hamiltonian(ineq, a, a, a);
}

LocalHamiltonianTerm build_hamiltonian(const BellInequality& ineq, const ObservablePair& first,
                                       const ObservablePair& second, const ObservablePair& third) {
  const RealMatrix id = RealMatrix::Identity(4, 4);
  LocalHamiltonianTerm h;
  for (int x = 0; x < 2; ++x) {
    const double c = to_double(ineq.coeffs(kE0 + x));
    if (c != 0.0) h.term += c * kron3(first[x], id, id);
    for (int y = 0; y < 2; ++y) {
      const double ab = to_double(ineq.coeffs(kE12_00 + 2 * x + y));
      const double ac = to_double(ineq.coeffs(kE13_00 + 2 * x + y));
      if (ab != 0.0) h.term += ab * kron3(first[x], second[y], id);
      if (ac != 0.0) h.term += ac * kron3(first[x], id, third[y]);
    }
  }
  return h;
}

RingHamiltonian::RingHamiltonian(std::vector<RealMatrix> terms, int sites)
    : sites_(sites), dim_(ring_dim(sites)) {
  if (sites < 3) throw std::invalid_argument("RingHamiltonian: need at least 3 sites");
  if (static_cast<int>(terms.size()) != sites) {
    throw std::invalid_argument("RingHamiltonian: need one term per site");
  }
  for (auto& t : terms) {
    if (t.rows() != 64 || t.cols() != 64) throw std::invalid_argument("RingHamiltonian: term must be 64x64");
    terms_t_.push_back(t.transpose());
  }
}

RingHamiltonian::RingHamiltonian(const RealMatrix& term, int sites)
    : RingHamiltonian(std::vector<RealMatrix>(static_cast<std::size_t>(std::max(sites, 0)), term), sites) {}

void RingHamiltonian::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  // H = sum_k R^k h_k R^-k with R the rotation above; Horner form so that
  // only the rotation in one direction is needed.
  w_.resize(dim_);
  tmp_.resize(dim_);
  out.resize(dim_);
  rotate(in, w_);
  out.setZero();
  apply_front(terms_t_[sites_ - 1], w_, out);
  for (int k = sites_ - 2; k >= 0; --k) {
    rotate(w_, tmp_);
    w_.swap(tmp_);
    rotate(out, tmp_);
    apply_front(terms_t_[k], w_, tmp_);
    out.swap(tmp_);
  }
}

double RingHamiltonian::expectation(const Eigen::VectorXd& psi) const {
  Eigen::VectorXd hv;
  apply(psi, hv);
  return psi.dot(hv) / psi.squaredNorm();
}

RingGroundState lowest_eigenpair(const RingHamiltonian& h, const EigenSolverOptions& opt,
                                 const Eigen::VectorXd* start) {
  const Eigen::Index n = h.dim();
  const int K = static_cast<int>(std::min<Eigen::Index>(opt.subspace, n));
  const int keep = std::max(1, std::min(opt.keep, K - 1));
  RealMatrix V(n, K), W(n, K);
  V.col(0) = start ? start->normalized() : random_unit(n, opt.seed);

  RingGroundState out;
  Eigen::VectorXd hv(n);
  int filled = 0;  // columns of W already computed
  int j = 0;       // columns of V set
  j = 1;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    while (filled < K) {
      h.apply(V.col(filled), hv);
      W.col(filled) = hv;
      ++out.matvecs;
      ++filled;
      if (j < K) {
        Eigen::VectorXd r = W.col(filled - 1);
        for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(j) * (V.leftCols(j).transpose() * r);
        double nr = r.norm();
        if (nr < 1e-12) {
          // Invariant subspace: continue with a fresh random direction.
          r = random_unit(n, opt.seed + static_cast<std::uint64_t>(out.matvecs));
          for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(j) * (V.leftCols(j).transpose() * r);
          nr = r.norm();
        }
        V.col(j++) = r / nr;
      }
    }
    RealMatrix G = V.transpose() * W;
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(G);
    const double theta = es.eigenvalues()(0);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    Eigen::VectorXd x = V * y;
    Eigen::VectorXd r = W * y - theta * x;
    out.energy = theta;
    out.residual = r.norm();
    if (out.residual <= opt.tol * std::max(1.0, std::abs(theta)) || K == n) {
      out.vector = x.normalized();
      return out;
    }
    // Thick restart: keep the lowest Ritz vectors, extend with the residual.
    const RealMatrix Y = es.eigenvectors().leftCols(keep);
    RealMatrix Vk = V * Y;
    RealMatrix Wk = W * Y;
    V.leftCols(keep) = Vk;
    W.leftCols(keep) = Wk;
    for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(keep) * (V.leftCols(keep).transpose() * r);
    V.col(keep) = r.normalized();
    j = keep + 1;
    filled = keep;
  }
  throw NumericalError("lowest_eigenpair: restart budget exhausted");
}

RingGroundState ring_ground_state(const LocalHamiltonianTerm& term, int N, const EigenSolverOptions& opt) {
  check_ring(N, opt);
  if (term.term.cwiseAbs().maxCoeff() == 0.0) {
    RingGroundState z;
    z.vector = Eigen::VectorXd::Zero(ring_dim(N));
    z.vector(0) = 1.0;
    return z;
  }
  return lowest_eigenpair(RingHamiltonian(term.term, N), opt);
}

double ground_energy_ring(const LocalHamiltonianTerm& term, int N, const EigenSolverOptions& opt) {
  return ring_ground_state(term, N, opt).energy / N;
}

GroundResult quantum_value(const BellInequality& ineq, const MeasurementPair& mp,
                           const std::vector<int>& rings, const EigenSolverOptions& opt) {
  if (rings.empty()) throw std::invalid_argument("quantum_value: no ring sizes");
  for (std::size_t i = 1; i < rings.size(); ++i) {
    if (rings[i] <= rings[i - 1]) throw std::invalid_argument("quantum_value: ring sizes must increase");
  }
  for (int N : rings) check_ring(N, opt);
  const auto term = build_hamiltonian(ineq, mp);
  GroundResult r;
  r.ring_sizes = rings;
  for (int N : rings) {
    const auto gs = ring_ground_state(term, N, opt);
    r.energies.push_back(gs.energy / N);
    r.matvecs.push_back(gs.matvecs);
  }
  r.energy_per_site = r.energies.back();
  if (rings.size() == 1) {
    r.extrapolated = r.energies.back();
  } else {
    // Line through (1/N, e) for the two largest rings, evaluated at 1/N = 0.
    const std::size_t b = rings.size() - 1, a = b - 1;
    const double xa = 1.0 / rings[a], xb = 1.0 / rings[b];
    const double slope = (r.energies[b] - r.energies[a]) / (xb - xa);
    r.extrapolated = r.energies[b] - slope * xb;
  }
  r.residual = std::abs(r.extrapolated - r.energies.front());
  return r;
}

TripartiteBox three_site_box(const Eigen::VectorXd& psi, int N, const MeasurementPair& mp) {
  if (N < 3 || psi.size() != ring_dim(N)) throw std::invalid_argument("three_site_box: bad state size");
  // Reduced state on (k, k+1, k+2), averaged over k.
  RealMatrix rho = RealMatrix::Zero(64, 64);
  Eigen::VectorXd w = psi.normalized(), tmp(psi.size());
  const Eigen::Index rest = psi.size() / 64;
  for (int k = 0; k < N; ++k) {
    Eigen::Map<const RealMatrix> t(w.data(), rest, 64);
    rho.noalias() += t.transpose() * t;
    rotate(w, tmp);
    w.swap(tmp);
  }
  rho /= N;
  const RealMatrix id = RealMatrix::Identity(4, 4);
  RealMatrix proj[2][2];
  for (int x = 0; x < 2; ++x) {
    const RealMatrix a = observable(mp, x);
    proj[x][0] = 0.5 * (id + a);
    proj[x][1] = 0.5 * (id - a);
  }
  TripartiteBox box;
  for (int xs = 0; xs < 8; ++xs) {
    for (int as = 0; as < 8; ++as) {
      const int x1 = xs >> 2, x2 = (xs >> 1) & 1, x3 = xs & 1;
      const int a1 = as >> 2, a2 = (as >> 1) & 1, a3 = as & 1;
      const RealMatrix op = kron3(proj[x1][a1], proj[x2][a2], proj[x3][a3]);
      box.at(a1, a2, a3, x1, x2, x3) = (rho.array() * op.array()).sum();
    }
  }
  return box;
}

const std::array<Table2Row, 11>& table2() {
  static const std::array<Table2Row, 11> rows = {{
      {6.236, 1.501, -3.111, false},
      {0.077, 1.874, -4.1847, false},
      {2.17, 6.275, -5.098, false},
      {6.236, 4.175, -6.1798, true},
      {5.996, 4.691, -11.104, false},
      {4.093, 0.29, -7.073, true},
      {4.359, 6.197, -8.191, true},
      {3.169, 5.226, -5.039, false},
      {3.843, 1.193, -3.04, true},
      {0.817, 2.421, -6.109, true},
      {3.787, 6.067, -6.081, true},
  }};
  return rows;
}

void RegisterMeasurements::validate(double tol) const {
  if (m < 1 || static_cast<int>(sets.size()) != m) {
    throw std::invalid_argument("RegisterMeasurements: need exactly m observable pairs");
  }
  for (const auto& pair : sets) {
    for (const auto& a : pair) {
      if (a.rows() != 4 || a.cols() != 4 || !is_hermitian(a, tol)) {
        throw std::invalid_argument("RegisterMeasurements: observable is not 4x4 symmetric");
      }
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
      if (es.eigenvalues().cwiseAbs().maxCoeff() > 1.0 + tol) {
        throw std::invalid_argument("RegisterMeasurements: spectrum outside [-1, 1]");
      }
    }
  }
}

RealMatrix minimizing_observable(const RealMatrix& F) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (F + F.transpose()));
  Eigen::VectorXd s(F.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = es.eigenvalues()(i) >= 0.0 ? -1.0 : 1.0;
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

SeesawResult seesaw(const BellInequality& ineq, const SeesawOptions& opt) {
  if (opt.m < 3) throw std::invalid_argument("seesaw: register size must be at least 3");
  check_ring(opt.N, opt.solver);
  if (opt.max_iters < 0) throw std::invalid_argument("seesaw: negative iteration budget");

  SeesawResult res;
  auto& reg = res.measurements;
  reg.m = opt.m;
  std::mt19937_64 rng(opt.seed);
  for (int i = 0; i < opt.m; ++i) {
    if (opt.init) {
      reg.sets.push_back({observable(*opt.init, 0), observable(*opt.init, 1)});
    } else {
      reg.sets.push_back({random_dichotomic(rng), random_dichotomic(rng)});
    }
  }
  const int N = opt.N;
  auto energy_of = [&](const Eigen::VectorXd& psi) {
    return RingHamiltonian(register_terms(ineq, reg, N), N).expectation(psi) / N;
  };
  auto state_step = [&](const Eigen::VectorXd* start) {
    return lowest_eigenpair(RingHamiltonian(register_terms(ineq, reg, N), N), opt.solver, start);
  };
  auto record = [&](double e) {
    if (!res.history.empty() && e > res.history.back() + 1e-9) res.monotone = false;
    res.history.push_back(e);
  };

  auto gs = state_step(nullptr);
  Eigen::VectorXd psi = gs.vector;
  record(gs.energy / N);

  for (int it = 0; it < opt.max_iters; ++it) {
    const double before = res.history.back();
    // Measurement half-step, one observable at a time; with the state fixed
    // the energy is affine in each observable, so F is read off by probing a
    // basis of symmetric matrices.
    for (int i = 0; i < opt.m; ++i) {
      for (int x = 0; x < 2; ++x) {
        const RealMatrix saved = reg.sets[i][x];
        reg.sets[i][x].setZero();
        const double c = energy_of(psi);
        RealMatrix F(4, 4);
        for (int a = 0; a < 4; ++a) {
          for (int b = a; b < 4; ++b) {
            RealMatrix s = RealMatrix::Zero(4, 4);
            s(a, b) = s(b, a) = 1.0;
            reg.sets[i][x] = s;
            const double v = energy_of(psi) - c;
            F(a, b) = F(b, a) = a == b ? v : 0.5 * v;
          }
        }
        reg.sets[i][x] = minimizing_observable(F);
        double e = energy_of(psi);
        const double old = res.history.back();
        if (e > old) {
          // Only possible when a register set repeats inside one term.
          reg.sets[i][x] = saved;
          e = old;
        }
        record(e);
      }
    }
    gs = state_step(&psi);
    psi = gs.vector;
    record(gs.energy / N);
    res.iterations = it + 1;
    if (before - res.history.back() < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.value = res.history.back();
  return res;
}

}  // namespace tichain
