#include "akat/map_metrics.hpp"

#include "akat/parallel.hpp"
#include "akat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace akat {

namespace {

// Jittered grid of roughly `budget` points; chunk = one grid row, so
// parallel sweeps stay deterministic.
struct JitterGrid {
    int n;
    uint64_t seed;
    SurfacePoint at(int i, int j, CounterRng& rng) const {
        double u = (i + 0.5 + 0.8 * (rng.next_unit() - 0.5)) / n;
        double v = (j + 0.5 + 0.8 * (rng.next_unit() - 0.5)) / n;
        return {u, v};
    }
};

template <typename PerPoint>
double sweep_max(long budget, uint64_t seed, PerPoint per_point) {
    int n = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(budget)))));
    JitterGrid grid{n, seed};
    std::vector<double> row_max(static_cast<size_t>(n), 0.0);
    parallel_chunks(static_cast<size_t>(n), [&](size_t i) {
        CounterRng rng(seed, i);
        double best = 0;
        for (int j = 0; j < n; ++j) {
            SurfacePoint p = grid.at(static_cast<int>(i), j, rng);
            best = std::max(best, per_point(p));
        }
        row_max[i] = best;
    });
    double out = 0;
    for (double v : row_max) out = std::max(out, v);
    return out;
}

double coord_gap(double fa, double fb, bool wraps) {
    return wraps ? circle_dist(fa, fb) : std::fabs(fa - fb);
}

// Central difference weights on offsets -2..2 for derivative orders 1..4.
const double kW1[5] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
const double kW2[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
const double kW3[5] = {-0.5, 1.0, 0.0, -1.0, 0.5};
const double kW4[5] = {1.0, -4.0, 6.0, -4.0, 1.0};

const double* weights(int order) {
    switch (order) {
        case 1: return kW1;
        case 2: return kW2;
        case 3: return kW3;
        default: return kW4;
    }
}

struct Stencil {
    // Lift values on the 5x5 stencil around the sample, one map, per coord.
    DDouble theta[5][5];
    DDouble r[5][5];
};

Stencil eval_stencil(const PlanarMap& m, SurfacePoint c, double h, bool use_inverse) {
    Stencil s;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            DDPoint p{dd::from(c.theta + (i - 2) * h), dd::from(c.r + (j - 2) * h)};
            DDPoint q = use_inverse ? m.inverse_lift(p) : m.forward_lift(p);
            s.theta[i][j] = q.theta;
            s.r[i][j] = q.r;
        }
    return s;
}

// D_a of the difference of two stencil fields, a = (a_theta, a_r).
double stencil_diff_derivative(const Stencil& a, const Stencil& b, int ax, int ar, double h,
                               bool r_coord) {
    const double* wx = weights(ax);
    const double* wr = weights(ar);
    DDouble acc = dd::from(0.0);
    for (int i = 0; i < 5; ++i) {
        if (ax > 0 && wx[i] == 0.0) continue;
        for (int j = 0; j < 5; ++j) {
            if (ar > 0 && wr[j] == 0.0) continue;
            double w = (ax > 0 ? wx[i] : (i == 2 ? 1.0 : 0.0)) *
                       (ar > 0 ? wr[j] : (j == 2 ? 1.0 : 0.0));
            if (w == 0.0) continue;
            DDouble diff = r_coord ? dd::sub(a.r[i][j], b.r[i][j])
                                   : dd::sub(a.theta[i][j], b.theta[i][j]);
            acc = dd::add(acc, dd::mul(diff, w));
        }
    }
    double scale = std::pow(h, ax + ar);
    return dd::to_double(acc) / scale;
}

}  // namespace

double sup_distance_d0(const PlanarMap& a, const PlanarMap& b, long sample_budget, uint64_t seed) {
    bool r_wraps = a.surface() == Surface::torus;
    return sweep_max(sample_budget, seed, [&](SurfacePoint p) {
        SurfacePoint fa = a.forward(p), fb = b.forward(p);
        SurfacePoint ga = a.inverse(p), gb = b.inverse(p);
        double d = coord_gap(fa.theta, fb.theta, true);
        d = std::max(d, coord_gap(fa.r, fb.r, r_wraps));
        d = std::max(d, coord_gap(ga.theta, gb.theta, true));
        d = std::max(d, coord_gap(ga.r, gb.r, r_wraps));
        return d;
    });
}

double sup_distance_dk(const PlanarMap& a, const PlanarMap& b, int k, long sample_budget,
                       uint64_t seed, double fd_step) {
    if (k < 0 || k > 4)
        throw std::invalid_argument("sup_distance_dk: k > 4 unsupported (finite differences)");
    double best = sup_distance_d0(a, b, sample_budget, seed);
    if (k == 0) return best;
    double deriv = sweep_max(sample_budget, seed ^ 0x9e3779b9u, [&](SurfacePoint p) {
        double local = 0;
        for (int pass = 0; pass < 2; ++pass) {
            bool inv = pass == 1;
            Stencil sa = eval_stencil(a, p, fd_step, inv);
            Stencil sb = eval_stencil(b, p, fd_step, inv);
            for (int ax = 0; ax <= k; ++ax)
                for (int ar = 0; ax + ar <= k; ++ar) {
                    if (ax + ar == 0) continue;
                    for (bool r_coord : {false, true}) {
                        double v = stencil_diff_derivative(sa, sb, ax, ar, fd_step, r_coord);
                        local = std::max(local, std::fabs(v));
                    }
                }
        }
        return local;
    });
    return std::max(best, deriv);
}

double jacobian_sweep(const PlanarMap& m, int grid, uint64_t seed) {
    return sweep_max(static_cast<long>(grid) * grid, seed, [&](SurfacePoint p) {
        if (m.seam_distance(p) < 1e-9) return 0.0;  // seam exclusion
        return std::fabs(m.jacobian(p).det() - 1.0);
    });
}

double jacobian_entry_sup(const PlanarMap& m, int grid, uint64_t seed) {
    return sweep_max(static_cast<long>(grid) * grid, seed, [&](SurfacePoint p) {
        if (m.seam_distance(p) < 1e-9) return 0.0;
        return m.jacobian(p).max_abs();
    });
}

double norm_triple(const PlanarMap& m, int k, int grid, uint64_t seed, double fd_step) {
    if (k < 0 || k > 4)
        throw std::invalid_argument("norm_triple: k > 4 unsupported (finite differences)");
    PlanarMap id = PlanarMap::identity(m.surface());
    bool r_wraps = m.surface() == Surface::torus;
    return sweep_max(static_cast<long>(grid) * grid, seed, [&](SurfacePoint p) {
        double local = 0;
        // |a| = 0: displacement, circle-reduced.
        SurfacePoint f = m.forward(p), g = m.inverse(p);
        local = std::max(local, coord_gap(f.theta, p.theta, true));
        local = std::max(local, coord_gap(f.r, p.r, r_wraps));
        local = std::max(local, coord_gap(g.theta, p.theta, true));
        local = std::max(local, coord_gap(g.r, p.r, r_wraps));
        if (k == 0) return local;
        for (int pass = 0; pass < 2; ++pass) {
            bool inv = pass == 1;
            Stencil sm = eval_stencil(m, p, fd_step, inv);
            Stencil si = eval_stencil(id, p, fd_step, inv);
            for (int ax = 0; ax <= k; ++ax)
                for (int ar = 0; ax + ar <= k; ++ar) {
                    if (ax + ar == 0) continue;
                    for (bool r_coord : {false, true}) {
                        double v = stencil_diff_derivative(sm, si, ax, ar, fd_step, r_coord);
                        // adding D_a of the identity restores the full lift derivative
                        if (ax + ar == 1) {
                            bool diag = (!r_coord && ax == 1) || (r_coord && ar == 1);
                            if (diag) v += 1.0;
                        }
                        local = std::max(local, std::fabs(v));
                    }
                }
        }
        return local;
    });
}

}  // namespace akat
