#pragma once

// Quantum values of TI Bell inequalities: the Bell operator as a 3-local
// Hamiltonian, ground energies per site on periodic rings, and a see-saw over
// measurements with a classical register.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tichain/bell_polytope.hpp"
#include "tichain/quantum_core.hpp"

namespace tichain {

struct MeasurementPair {
  double theta = 0.0;
  double phi = 0.0;
};

/// A_0 = diag(1,-1,1,-1); A_1 = M(theta, phi), two real 2x2 reflection blocks.
RealMatrix observable(const MeasurementPair& mp, int which);

/// 64x64 real symmetric term on sites (i, i+1, i+2), local dimension 4.
struct LocalHamiltonianTerm {
  RealMatrix term = RealMatrix::Zero(64, 64);
};

using ObservablePair = std::array<RealMatrix, 2>;

LocalHamiltonianTerm build_hamiltonian(const BellInequality& ineq, const MeasurementPair& mp);
/// Term with separate observables on each of the three factors.
LocalHamiltonianTerm build_hamiltonian(const BellInequality& ineq, const ObservablePair& first,
                                       const ObservablePair& second, const ObservablePair& third);

struct EigenSolverOptions {
  int max_sites = 10;
  int subspace = 20;
  int keep = 4;
  int max_restarts = 2000;
  /// Stop when ||H x - theta x|| <= tol * max(1, |theta|).
  double tol = 1e-8;
  std::uint64_t seed = 0x5eed;
};

struct RingGroundState {
  double energy = 0.0;  // total, not per site
  Eigen::VectorXd vector;
  int matvecs = 0;
  double residual = 0.0;
};

/// Matrix-free sum over positions k of terms[k] acting on (k, k+1, k+2 mod N).
class RingHamiltonian {
 public:
  RingHamiltonian(std::vector<RealMatrix> terms, int sites);
  RingHamiltonian(const RealMatrix& term, int sites);

  int sites() const { return sites_; }
  Eigen::Index dim() const { return dim_; }
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  double expectation(const Eigen::VectorXd& psi) const;

 private:
  std::vector<RealMatrix> terms_t_;  // transposed terms
  int sites_;
  Eigen::Index dim_;
  mutable Eigen::VectorXd w_, tmp_;
};

/// Lowest eigenpair by thick-restart Lanczos with full reorthogonalization.
/// Throws NumericalError when the restart budget runs out.
RingGroundState lowest_eigenpair(const RingHamiltonian& h, const EigenSolverOptions& opt = {},
                                 const Eigen::VectorXd* start = nullptr);

/// Ground energy per site. Requires 3 <= N <= opt.max_sites (CapExceeded
/// above the cap).
double ground_energy_ring(const LocalHamiltonianTerm& term, int N, const EigenSolverOptions& opt = {});
RingGroundState ring_ground_state(const LocalHamiltonianTerm& term, int N,
                                  const EigenSolverOptions& opt = {});

struct GroundResult {
  double energy_per_site = 0.0;  // largest ring
  std::vector<int> ring_sizes;
  std::vector<double> energies;
  double extrapolated = 0.0;  // linear in 1/N through the two largest rings
  double residual = 0.0;      // |extrapolated - smallest-ring energy|
  std::vector<int> matvecs;
};

GroundResult quantum_value(const BellInequality& ineq, const MeasurementPair& mp,
                           const std::vector<int>& rings, const EigenSolverOptions& opt = {});

/// Box of three consecutive sites of a ring state, averaged over positions,
/// with A_0, A_1 measured on every site.
TripartiteBox three_site_box(const Eigen::VectorXd& psi, int N, const MeasurementPair& mp);

struct Table2Row {
  double theta;
  double phi;
  double quantum;
  bool genuine;
};
/// Angles, reported quantum values and genuine flags for the builtin
/// inequalities, ids 1..11.
const std::array<Table2Row, 11>& table2();

struct RegisterMeasurements {
  int m = 0;
  std::vector<ObservablePair> sets;
  /// Throws std::invalid_argument unless every observable is symmetric with
  /// spectrum in [-1, 1] within `tol`.
  void validate(double tol = 1e-9) const;
};

/// Closed-form minimizer of tr(F A) over -I <= A <= I: -sgn(F).
RealMatrix minimizing_observable(const RealMatrix& F);

struct SeesawOptions {
  int m = 3;
  int N = 9;
  int max_iters = 30;
  std::uint64_t seed = 0;
  /// Start from these angles on every register set instead of random
  /// dichotomic observables.
  std::optional<MeasurementPair> init;
  /// Stop once an iteration improves the value by less than this.
  double tol = 1e-9;
  EigenSolverOptions solver;
};

struct SeesawResult {
  double value = 0.0;
  RegisterMeasurements measurements;
  /// Energy per site after every half-step, starting with the initial ground state.
  std::vector<double> history;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
};

SeesawResult seesaw(const BellInequality& ineq, const SeesawOptions& opt);

}  // namespace tichain
