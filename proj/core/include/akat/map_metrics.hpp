#pragma once

#include "akat/planar_map.hpp"

#include <cstdint>

namespace akat {

// Sampled lower bound of the d_0 metric: coordinate sup over a jittered
// grid, circle-reduced where the coordinate wraps, inverses included.
double sup_distance_d0(const PlanarMap& a, const PlanarMap& b, long sample_budget,
                       uint64_t seed = 7);

// Sampled lower bound of d_k with finite-difference partials up to order k
// (k <= 4; accuracy of the differences degrades beyond that) of the lift
// difference on a jittered grid. fd_step is the stencil spacing.
double sup_distance_dk(const PlanarMap& a, const PlanarMap& b, int k, long sample_budget,
                       uint64_t seed = 7, double fd_step = 1e-3);

// Grid max of |det DF - 1| on a jittered grid with seam exclusion.
double jacobian_sweep(const PlanarMap& m, int grid, uint64_t seed = 7);

// Sampled sup of max |entry of DF| over a jittered grid (the entrywise
// ||DF||_0 of the convergence conditions), analytic chain Jacobians.
double jacobian_entry_sup(const PlanarMap& m, int grid, uint64_t seed = 7);

// Finite-difference measurement of |||F|||_k: max over a jittered grid of
// all lift partials of F and F^{-1} with 1 <= |a| <= k (k <= 4) plus the
// circle-reduced displacement for |a| = 0.
double norm_triple(const PlanarMap& m, int k, int grid, uint64_t seed = 7,
                   double fd_step = 1e-3);

}  // namespace akat
