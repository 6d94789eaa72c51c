#include "akat/standard_map.hpp"

#include "akat/parallel.hpp"
#include "akat/rng.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace akat {

namespace {

double sup_norm(Vec2 v) { return std::max(std::fabs(v.x), std::fabs(v.y)); }

// C^infty ramp from 0 (u <= 0) to 1 (u >= 1), built from exp(-1/u).
double bump(double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u); }

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double f = bump(u), g = bump(1.0 - u);
    return f / (f + g);
}

double smoothstep_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double f = bump(u), g = bump(1.0 - u);
    double fp = f / (u * u);
    double gp = -g / ((1.0 - u) * (1.0 - u));
    double s = f + g;
    return (fp * s - f * (fp + gp)) / (s * s);
}

struct CellWeights {
    int i0;             // base node index (stencil i0-1 .. i0+2)
    double w[4], dw[4];
};

}  // namespace

// ---------------------------------------------------------------------------
// Grids

struct StandardSquareMap::Grid {
    int n = 0;          // nodes per axis over [-1,1]
    double h = 0;       // spacing
    // deformation data at nodes (zero outside the transition region)
    std::vector<double> beta1, beta2, det;   // det stores det(D phi_tilde)
    // corrector displacement u = nu - id and its inverse counterpart
    std::vector<double> fwd_x, fwd_y, bwd_x, bwd_y;

    size_t idx(int i, int j) const { return static_cast<size_t>(j) * n + i; }

    CellWeights weights(double x, bool derivative) const {
        CellWeights cw{};
        double t = (x + 1.0) / h;
        int i = static_cast<int>(std::floor(t));
        i = std::max(1, std::min(n - 3, i));
        double u = t - i;
        double u2 = u * u, u3 = u2 * u;
        cw.i0 = i;
        cw.w[0] = 0.5 * (-u3 + 2 * u2 - u);
        cw.w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
        cw.w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
        cw.w[3] = 0.5 * (u3 - u2);
        if (derivative) {
            cw.dw[0] = 0.5 * (-3 * u2 + 4 * u - 1) / h;
            cw.dw[1] = 0.5 * (9 * u2 - 10 * u) / h;
            cw.dw[2] = 0.5 * (-9 * u2 + 8 * u + 1) / h;
            cw.dw[3] = 0.5 * (3 * u2 - 2 * u) / h;
        }
        return cw;
    }

    double sample(const std::vector<double>& f, const CellWeights& cx,
                  const CellWeights& cy, bool dx, bool dy) const {
        double out = 0;
        for (int a = 0; a < 4; ++a) {
            double wy = dy ? cy.dw[a] : cy.w[a];
            if (wy == 0.0) continue;
            double row = 0;
            for (int b = 0; b < 4; ++b) {
                double wx = dx ? cx.dw[b] : cx.w[b];
                row += wx * f[idx(cx.i0 - 1 + b, cy.i0 - 1 + a)];
            }
            out += wy * row;
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Region tests and the two explicit factors

bool StandardSquareMap::in_outer_identity(Vec2 v) const { return sup_norm(v) >= 1.0 - eps_; }
bool StandardSquareMap::in_rotation_core(Vec2 v) const { return sup_norm(v) <= 1.0 - 2.0 * eps_; }
bool StandardSquareMap::in_transition(Vec2 v) const {
    double m = sup_norm(v);
    return m > 1.0 - 2.0 * eps_ && m < 1.0 - eps_;
}

double StandardSquareMap::seam_distance(Vec2 v) const {
    double m = sup_norm(v);
    double rho = std::hypot(v.x, v.y);
    double d = std::fabs(m - (1.0 - eps_));
    d = std::min(d, std::fabs(m - (1.0 - 2.0 * eps_)));
    d = std::min(d, std::fabs(rho - rot_r0_));
    d = std::min(d, std::fabs(rho - rot_r1_));
    return d;
}

namespace {

double gauge(Vec2 v, int p) {
    double ax = std::fabs(v.x), ay = std::fabs(v.y);
    double m = std::max(ax, ay);
    if (m == 0.0) return 0.0;
    double rx = ax / m, ry = ay / m;
    return m * std::pow(std::pow(rx, p) + std::pow(ry, p), 1.0 / p);
}

}  // namespace

Vec2 StandardSquareMap::scaler_forward(Vec2 v) const {
    double t = gauge(v, p_);
    if (t >= gauge_b_) return v;
    if (t <= gauge_a_) return {v.x / 5.0, v.y / 5.0};
    double m = 0.2 + 0.8 * smoothstep((t - gauge_a_) / (gauge_b_ - gauge_a_));
    return {m * v.x, m * v.y};
}

Vec2 StandardSquareMap::scaler_inverse_with_state(Vec2 v, double& warm) const {
    double s = gauge(v, p_);
    if (s >= gauge_b_) return v;
    if (s <= gauge_a_ / 5.0) return {5.0 * v.x, 5.0 * v.y};
    // solve t * mu(t) = s on (gauge_a_, gauge_b_), monotone increasing
    double lo = gauge_a_, hi = gauge_b_;
    double t = (warm > lo && warm < hi) ? warm : std::min(hi, 5.0 * s);
    for (int it = 0; it < 60; ++it) {
        double u = (t - gauge_a_) / (gauge_b_ - gauge_a_);
        double mu = 0.2 + 0.8 * smoothstep(u);
        double dmu = 0.8 * smoothstep_deriv(u) / (gauge_b_ - gauge_a_);
        double fval = t * mu - s;
        if (fval > 0)
            hi = t;
        else
            lo = t;
        double step = fval / (mu + t * dmu);
        double next = t - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) < 1e-15) {
            t = next;
            break;
        }
        t = next;
    }
    warm = t;
    double scale = t / s;
    return {scale * v.x, scale * v.y};
}

Vec2 StandardSquareMap::scaler_inverse(Vec2 v) const {
    double warm = -1;
    return scaler_inverse_with_state(v, warm);
}

Vec2 StandardSquareMap::rotator_forward(Vec2 v) const {
    double rho = std::hypot(v.x, v.y);
    if (rho <= rot_r0_) return {v.y, -v.x};
    if (rho >= rot_r1_) return v;
    double a = -0.5 * std::numbers::pi * (1.0 - smoothstep((rho - rot_r0_) / (rot_r1_ - rot_r0_)));
    double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 StandardSquareMap::rotator_inverse(Vec2 v) const {
    double rho = std::hypot(v.x, v.y);
    if (rho <= rot_r0_) return {-v.y, v.x};
    if (rho >= rot_r1_) return v;
    double a = 0.5 * std::numbers::pi * (1.0 - smoothstep((rho - rot_r0_) / (rot_r1_ - rot_r0_)));
    double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

namespace {

Mat2 scaler_jac(Vec2 v, int p, double a, double b) {
    double t = gauge(v, p);
    if (t >= b || t == 0.0) return {};
    if (t <= a) return {0.2, 0, 0, 0.2};
    double u = (t - a) / (b - a);
    double mu = 0.2 + 0.8 * smoothstep(u);
    double dmu = 0.8 * smoothstep_deriv(u) / (b - a);
    // grad t = (sgn(x)|x|^{p-1}, sgn(y)|y|^{p-1}) / t^{p-1}
    double gx = std::copysign(std::pow(std::fabs(v.x) / t, p - 1), v.x);
    double gy = std::copysign(std::pow(std::fabs(v.y) / t, p - 1), v.y);
    return {mu + dmu * v.x * gx, dmu * v.x * gy, dmu * v.y * gx, mu + dmu * v.y * gy};
}

Mat2 rotator_jac(Vec2 v, double r0, double r1) {
    double rho = std::hypot(v.x, v.y);
    if (rho <= r0) return {0, 1, -1, 0};
    if (rho >= r1) return {};
    double u = (rho - r0) / (r1 - r0);
    double a = -0.5 * std::numbers::pi * (1.0 - smoothstep(u));
    double da = 0.5 * std::numbers::pi * smoothstep_deriv(u) / (r1 - r0);
    double c = std::cos(a), s = std::sin(a);
    double nx = v.x / rho, ny = v.y / rho;
    // D(R(a(rho)) v) = R(a) + R'(a) v (da * n)^T
    Mat2 j{c, -s, s, c};
    double rpx = -s * v.x - c * v.y;  // R'(a) v
    double rpy = c * v.x - s * v.y;
    j.a += rpx * da * nx;
    j.b += rpx * da * ny;
    j.c += rpy * da * nx;
    j.d += rpy * da * ny;
    return j;
}

}  // namespace

Vec2 StandardSquareMap::tilde_forward(Vec2 v) const {
    return scaler_inverse(rotator_forward(scaler_forward(v)));
}

Vec2 StandardSquareMap::tilde_inverse(Vec2 v) const {
    return scaler_inverse(rotator_inverse(scaler_forward(v)));
}

Mat2 StandardSquareMap::tilde_jacobian(Vec2 v) const {
    Vec2 w = scaler_forward(v);
    Vec2 z = rotator_forward(w);
    Vec2 y = scaler_inverse(z);
    Mat2 j1 = scaler_jac(v, p_, gauge_a_, gauge_b_);
    Mat2 j2 = rotator_jac(w, rot_r0_, rot_r1_);
    Mat2 j3 = scaler_jac(y, p_, gauge_a_, gauge_b_).inverse();  // D psi^{-1}(z)
    return j3 * (j2 * j1);
}

// ---------------------------------------------------------------------------
// Corrector field and flow

Vec2 StandardSquareMap::flow_field(double t, Vec2 v) const {
    if (!in_transition(v)) return {0, 0};
    const Grid& g = *grid_;
    CellWeights cx = g.weights(v.x, false), cy = g.weights(v.y, false);
    double b1 = g.sample(g.beta1, cx, cy, false, false);
    double b2 = g.sample(g.beta2, cx, cy, false, false);
    double d = g.sample(g.det, cx, cy, false, false);
    double rho_t = 1.0 + t * (d - 1.0);
    if (rho_t <= 1e-9)
        throw DegenerateDeformationError("Omega_t degenerate: density reached zero");
    return {b2 / rho_t, -b1 / rho_t};
}

Vec2 StandardSquareMap::corrector_direct(Vec2 v, int steps, bool backward) const {
    if (!in_transition(v)) return v;
    double h = (backward ? -1.0 : 1.0) / steps;
    double t = backward ? 1.0 : 0.0;
    Vec2 y = v;
    for (int i = 0; i < steps; ++i) {
        Vec2 k1 = flow_field(t, y);
        Vec2 k2 = flow_field(t + h / 2, {y.x + h / 2 * k1.x, y.y + h / 2 * k1.y});
        Vec2 k3 = flow_field(t + h / 2, {y.x + h / 2 * k2.x, y.y + h / 2 * k2.y});
        Vec2 k4 = flow_field(t + h, {y.x + h * k3.x, y.y + h * k3.y});
        y.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
        y.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
        t += h;
    }
    return y;
}

Vec2 StandardSquareMap::corrector_forward(Vec2 v) const {
    if (!in_transition(v)) return v;
    const Grid& g = *grid_;
    CellWeights cx = g.weights(v.x, false), cy = g.weights(v.y, false);
    return {v.x + g.sample(g.fwd_x, cx, cy, false, false),
            v.y + g.sample(g.fwd_y, cx, cy, false, false)};
}

Vec2 StandardSquareMap::corrector_inverse(Vec2 v) const {
    if (!in_transition(v)) return v;
    const Grid& g = *grid_;
    CellWeights cx = g.weights(v.x, false), cy = g.weights(v.y, false);
    return {v.x + g.sample(g.bwd_x, cx, cy, false, false),
            v.y + g.sample(g.bwd_y, cx, cy, false, false)};
}

Mat2 StandardSquareMap::corrector_jacobian(Vec2 v) const {
    if (!in_transition(v)) return {};
    const Grid& g = *grid_;
    CellWeights cx = g.weights(v.x, true), cy = g.weights(v.y, true);
    return {1.0 + g.sample(g.fwd_x, cx, cy, true, false), g.sample(g.fwd_x, cx, cy, false, true),
            g.sample(g.fwd_y, cx, cy, true, false), 1.0 + g.sample(g.fwd_y, cx, cy, false, true)};
}

Mat2 StandardSquareMap::corrector_inverse_jacobian(Vec2 v) const {
    if (!in_transition(v)) return {};
    const Grid& g = *grid_;
    CellWeights cx = g.weights(v.x, true), cy = g.weights(v.y, true);
    return {1.0 + g.sample(g.bwd_x, cx, cy, true, false), g.sample(g.bwd_x, cx, cy, false, true),
            g.sample(g.bwd_y, cx, cy, true, false), 1.0 + g.sample(g.bwd_y, cx, cy, false, true)};
}

// ---------------------------------------------------------------------------
// Construction

void StandardSquareMap::build_field_grid() {
    Grid& g = *grid_;
    size_t total = static_cast<size_t>(g.n) * g.n;
    g.beta1.assign(total, 0.0);
    g.beta2.assign(total, 0.0);
    g.det.assign(total, 1.0);
    parallel_chunks(static_cast<size_t>(g.n), [&](size_t j) {
        double warm = -1;
        for (int i = 0; i < g.n; ++i) {
            Vec2 v{-1.0 + i * g.h, -1.0 + static_cast<double>(j) * g.h};
            if (!in_transition(v)) continue;
            // one scaler root-find shared by value and Jacobian
            Vec2 w = scaler_forward(v);
            Vec2 z = rotator_forward(w);
            Vec2 y = scaler_inverse_with_state(z, warm);
            Mat2 j1 = scaler_jac(v, p_, gauge_a_, gauge_b_);
            Mat2 j2 = rotator_jac(w, rot_r0_, rot_r1_);
            Mat2 j3 = scaler_jac(y, p_, gauge_a_, gauge_b_).inverse();
            Mat2 jac = j3 * (j2 * j1);
            double d = jac.det();
            if (d <= 1e-9)
                throw DegenerateDeformationError("det D phi_tilde <= 0 in the transition region");
            // beta = omega_0(x) - Dphi^T omega_0(y), omega_0 = (-(y)/2, (x)/2)
            double wx = -0.5 * v.y, wy = 0.5 * v.x;
            double ox = -0.5 * y.y, oy = 0.5 * y.x;
            g.beta1[g.idx(i, static_cast<int>(j))] = wx - (jac.a * ox + jac.c * oy);
            g.beta2[g.idx(i, static_cast<int>(j))] = wy - (jac.b * ox + jac.d * oy);
            g.det[g.idx(i, static_cast<int>(j))] = d;
        }
    });
}

void StandardSquareMap::build_displacement_grids() {
    Grid& g = *grid_;
    size_t total = static_cast<size_t>(g.n) * g.n;
    g.fwd_x.assign(total, 0.0);
    g.fwd_y.assign(total, 0.0);
    g.bwd_x.assign(total, 0.0);
    g.bwd_y.assign(total, 0.0);
    parallel_chunks(static_cast<size_t>(g.n), [&](size_t j) {
        for (int i = 0; i < g.n; ++i) {
            Vec2 v{-1.0 + i * g.h, -1.0 + static_cast<double>(j) * g.h};
            if (!in_transition(v)) continue;
            Vec2 f = corrector_direct(v, set_.steps, false);
            Vec2 b = corrector_direct(v, set_.steps, true);
            g.fwd_x[g.idx(i, static_cast<int>(j))] = f.x - v.x;
            g.fwd_y[g.idx(i, static_cast<int>(j))] = f.y - v.y;
            g.bwd_x[g.idx(i, static_cast<int>(j))] = b.x - v.x;
            g.bwd_y[g.idx(i, static_cast<int>(j))] = b.y - v.y;
        }
    });
}

void StandardSquareMap::select_order_and_verify() {
    auto fd_det = [&](auto&& fwd, Vec2 v) {
        const double h = 1e-6;
        Vec2 xp = fwd({v.x + h, v.y}), xm = fwd({v.x - h, v.y});
        Vec2 yp = fwd({v.x, v.y + h}), ym = fwd({v.x, v.y - h});
        double a = (xp.x - xm.x) / (2 * h), b = (yp.x - ym.x) / (2 * h);
        double c = (xp.y - xm.y) / (2 * h), d = (yp.y - ym.y) / (2 * h);
        return a * d - b * c;
    };
    auto order0 = [&](Vec2 v) { return tilde_forward(corrector_forward(v)); };
    auto order1 = [&](Vec2 v) { return corrector_forward(tilde_forward(v)); };

    int n = set_.quality_grid;
    CounterRng rng(11, 0);
    double worst0 = 0, worst1 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec2 v{-1.0 + (i + 0.4 + 0.2 * rng.next_unit()) * 2.0 / n,
                   -1.0 + (j + 0.4 + 0.2 * rng.next_unit()) * 2.0 / n};
            if (seam_distance(v) < 4e-6) continue;
            worst0 = std::max(worst0, std::fabs(fd_det(order0, v) - 1.0));
            worst1 = std::max(worst1, std::fabs(fd_det(order1, v) - 1.0));
        }
    order_ = worst0 <= worst1 ? 0 : 1;
    det_quality_ = std::min(worst0, worst1);
    if (det_quality_ > set_.tolerance)
        throw CorrectorQualityError("corrector quality " + std::to_string(det_quality_) +
                                    " exceeds tolerance in both composition orders");

    // spot-check the displacement grid against the direct flow
    double err = 0;
    CounterRng rng2(12, 0);
    for (int k = 0; k < 64; ++k) {
        Vec2 v{-1.0 + 2.0 * rng2.next_unit(), -1.0 + 2.0 * rng2.next_unit()};
        if (!in_transition(v)) continue;
        Vec2 a = corrector_forward(v);
        Vec2 b = corrector_direct(v, set_.steps, false);
        err = std::max(err, std::max(std::fabs(a.x - b.x), std::fabs(a.y - b.y)));
    }
    corrector_err_ = err;
}

StandardSquareMap::StandardSquareMap(double epsilon, const MoserSettings& settings)
    : eps_(epsilon), set_(settings) {
    if (!(epsilon > 0 && epsilon < 0.42))
        throw std::invalid_argument("StandardSquareMap: need 0 < epsilon < 0.42");
    if (set_.steps < 16) throw std::invalid_argument("StandardSquareMap: moser steps must be >= 16");

    // gauge power: smallest even p with 2^{1/p} comfortably below
    // (1-eps)/(1-2 eps), so the profile ramp has room between
    // max_{Delta(2eps)} t_p and min_{outside Delta(eps)} t_p
    double ratio = (1.0 - eps_) / (1.0 - 2.0 * eps_);
    double need = std::log(2.0) / std::log(0.5 * (1.0 + ratio));
    p_ = 2 * static_cast<int>(std::ceil(need / 2.0));
    p_ = std::max(p_, 2);
    gauge_a_ = std::pow(2.0, 1.0 / p_) * (1.0 - 2.0 * eps_);
    gauge_b_ = 1.0 - eps_;

    rot_r0_ = std::sqrt(1.0 / 3.0);
    rot_r1_ = std::min(std::sqrt(2.0 / 3.0), 1.0 - eps_);
    if (rot_r0_ >= rot_r1_)
        throw std::invalid_argument("StandardSquareMap: rotator ramp empty (epsilon too large)");

    grid_ = std::make_shared<Grid>();
    grid_->n = set_.grid > 0 ? set_.grid : (eps_ >= 0.25 ? 257 : 513);
    grid_->h = 2.0 / (grid_->n - 1);

    build_field_grid();
    build_displacement_grids();
    select_order_and_verify();
}

Vec2 StandardSquareMap::forward(Vec2 v) const {
    if (in_outer_identity(v)) return v;
    return order_ == 0 ? tilde_forward(corrector_forward(v))
                       : corrector_forward(tilde_forward(v));
}

Vec2 StandardSquareMap::inverse(Vec2 v) const {
    if (in_outer_identity(v)) return v;
    return order_ == 0 ? corrector_inverse(tilde_inverse(v))
                       : tilde_inverse(corrector_inverse(v));
}

Mat2 StandardSquareMap::jacobian(Vec2 v) const {
    if (in_outer_identity(v)) return {};
    if (order_ == 0) {
        Vec2 w = corrector_forward(v);
        return tilde_jacobian(w) * corrector_jacobian(v);
    }
    Vec2 w = tilde_forward(v);
    return corrector_jacobian(w) * tilde_jacobian(v);
}

std::shared_ptr<const StandardSquareMap> standard_map_cached(double epsilon,
                                                             const MoserSettings& settings) {
    struct Key {
        double eps;
        int steps, grid;
        double tol;
        bool operator<(const Key& o) const {
            return std::tie(eps, steps, grid, tol) < std::tie(o.eps, o.steps, o.grid, o.tol);
        }
    };
    static std::map<Key, std::shared_ptr<const StandardSquareMap>> cache;
    static std::mutex mu;
    Key key{epsilon, settings.steps, settings.grid, settings.tolerance};
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto built = std::make_shared<const StandardSquareMap>(epsilon, settings);
    cache.emplace(key, built);
    return built;
}

}  // namespace akat
