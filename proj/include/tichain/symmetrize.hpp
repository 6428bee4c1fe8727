#pragma once

#include <cstdint>
#include <variant>

#include "tichain/marginals.hpp"
#include "tichain/quantum_core.hpp"

namespace tichain {

/// A finite-chain state: either a classical table or a density matrix.
using ChainState = std::variant<JointDistribution, DensityMatrix>;

int num_sites(const ChainState& state);

/// r-site marginal of the translation-averaged infinite chain built from
/// copies of `omega`, wrap-around terms included. Requires 1 <= r <= n.
ChainState symmetrize_marginal(const ChainState& omega, int r);

/// Position average of the two-site states on sites (k, k+r-1).
/// Requires 2 <= r <= n.
ChainState structure_factor(const ChainState& omega, int r);

/// Largest block size n not yet excluded from being separable, given a
/// witness bound S, violation delta > 0 and boundary term tr(W rho1 x rho1).
/// Clamped below at zero.
std::int64_t size_bound(double S, double delta, double boundary_term);

/// TI consistency of a state: the first r-1 sites equal the last r-1 sites.
bool is_ti_consistent(const ChainState& state, double tol = 1e-10);

}  // namespace tichain
