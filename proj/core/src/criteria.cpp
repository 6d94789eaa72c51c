#include "akat/criteria.hpp"

#include "akat/rng.hpp"

#include <algorithm>
#include <cmath>

namespace akat {

namespace {

// Circular interval coverage of sampled values: returns (start, length)
// of the smallest arc containing all samples (length 1 when the largest
// gap is negligible).
std::pair<double, double> circular_hull(std::vector<double> vals) {
    std::sort(vals.begin(), vals.end());
    size_t n = vals.size();
    double best_gap = vals.front() + 1.0 - vals.back();
    size_t best_at = n - 1;  // gap between last and first (wrapped)
    for (size_t i = 0; i + 1 < n; ++i) {
        double gap = vals[i + 1] - vals[i];
        if (gap > best_gap) {
            best_gap = gap;
            best_at = i;
        }
    }
    double start = best_at == n - 1 ? vals.front() : vals[best_at + 1];
    return {start, 1.0 - best_gap};
}

// theta-length of {t in [0,1] : value(t) in J~} estimated from uniform
// samples with linear interpolation at the indicator crossings.
double preimage_measure(const std::vector<double>& r_img, double atom_len, double lo, double hi,
                        bool wrap) {
    auto inside = [&](double v) {
        if (!wrap) return v >= lo && v <= hi;
        double d = v - lo - std::floor(v - lo);
        return d <= hi - lo;
    };
    // distance below the nearest boundary, used for crossing interpolation
    auto edge_excess = [&](double v, double edge) {
        if (!wrap) return v - edge;
        double d = v - edge - std::floor(v - edge);
        return d <= 0.5 ? d : d - 1.0;
    };
    size_t n = r_img.size();
    double step = atom_len / static_cast<double>(n - 1);
    double acc = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
        bool a = inside(r_img[i]), b = inside(r_img[i + 1]);
        if (a && b) {
            acc += step;
        } else if (a != b) {
            // interpolate the fraction of the step inside J~ at the crossed edge
            double va = r_img[i], vb = r_img[i + 1];
            double ea_lo = edge_excess(va, lo), eb_lo = edge_excess(vb, lo);
            double ea_hi = edge_excess(va, hi), eb_hi = edge_excess(vb, hi);
            double frac = 0.5;
            if (std::fabs(eb_lo - ea_lo) > 1e-300 && (ea_lo < 0) != (eb_lo < 0))
                frac = std::fabs(ea_lo) / std::fabs(eb_lo - ea_lo);
            else if (std::fabs(eb_hi - ea_hi) > 1e-300 && (ea_hi > 0) != (eb_hi > 0))
                frac = std::fabs(ea_hi) / std::fabs(eb_hi - ea_hi);
            acc += step * (a ? frac : 1.0 - frac);
        }
    }
    return acc;
}

}  // namespace

DistributionReport measure_distribution(const PlanarMap& Phi, double theta_lo, double theta_hi,
                                        double height, const DistributionTargets& targets,
                                        int resolution, int random_subintervals, uint64_t seed) {
    if (resolution < 1000) resolution = 1000;
    DistributionReport rep;
    rep.targets = targets;
    double atom_len = theta_hi - theta_lo;
    bool torus = Phi.surface() == Surface::torus;

    std::vector<double> theta_img(resolution), r_img(resolution);
    for (int i = 0; i < resolution; ++i) {
        double t = static_cast<double>(i) / (resolution - 1);
        SurfacePoint p{theta_lo + atom_len * t, height};
        SurfacePoint img = Phi.forward(p);
        theta_img[i] = img.theta;
        r_img[i] = img.r;
    }

    // gamma: smallest strip width containing the theta images
    rep.gamma = circular_hull(theta_img).second;
    if (rep.gamma > 0.5) {
        rep.gamma = 1.0;
        rep.delta = 1.0;
        rep.eps = 1.0;
        rep.pass = false;
        rep.note = "image not contained in any strip of width <= 1/2";
        return rep;
    }

    // J: r-projection interval
    double j_start, j_len;
    if (torus) {
        auto hull = circular_hull(r_img);
        j_start = hull.first;
        j_len = hull.second;
    } else {
        auto [mn, mx] = std::minmax_element(r_img.begin(), r_img.end());
        // bisection refinement at the extreme samples
        auto refine = [&](size_t at, bool maximize) {
            double lo_t = at == 0 ? 0.0 : static_cast<double>(at - 1) / (resolution - 1);
            double hi_t = at + 1 >= static_cast<size_t>(resolution)
                              ? 1.0
                              : static_cast<double>(at + 1) / (resolution - 1);
            double best = r_img[at];
            for (int it = 0; it < 40; ++it) {
                double m1 = lo_t + (hi_t - lo_t) / 3, m2 = hi_t - (hi_t - lo_t) / 3;
                auto val = [&](double t) {
                    SurfacePoint p{theta_lo + atom_len * t, height};
                    return Phi.forward(p).r;
                };
                double v1 = val(m1), v2 = val(m2);
                if ((v1 < v2) == maximize)
                    lo_t = m1;
                else
                    hi_t = m2;
                best = maximize ? std::max(best, std::max(v1, v2))
                                : std::min(best, std::min(v1, v2));
            }
            return best;
        };
        double lo = refine(static_cast<size_t>(mn - r_img.begin()), false);
        double hi = refine(static_cast<size_t>(mx - r_img.begin()), true);
        j_start = lo;
        j_len = hi - lo;
    }
    rep.j_start = j_start;
    rep.j_len = j_len;
    rep.delta = 1.0 - j_len;

    if (j_len <= 1e-12) {
        rep.eps = 1.0;
        rep.pass = rep.gamma <= targets.gamma && rep.delta <= targets.delta && false;
        rep.note = "degenerate r-projection";
        return rep;
    }

    // subinterval family: dyadic pieces of J down to lambda(J)/64 + random
    double lambda_i = atom_len;
    double worst = 0;
    auto test_subinterval = [&](double frac_lo, double frac_hi) {
        double lo = j_start + j_len * frac_lo;
        double hi = j_start + j_len * frac_hi;
        double cap = preimage_measure(r_img, atom_len, lo, hi, torus);
        double lj = j_len * (frac_hi - frac_lo);
        double discrepancy = std::fabs(cap * j_len - lambda_i * lj);
        worst = std::max(worst, discrepancy / (lambda_i * lj));
    };
    for (int level = 1; level <= 6; ++level) {
        int pieces = 1 << level;
        for (int k = 0; k < pieces; ++k)
            test_subinterval(static_cast<double>(k) / pieces,
                             static_cast<double>(k + 1) / pieces);
    }
    CounterRng rng(seed, 0);
    for (int k = 0; k < random_subintervals; ++k) {
        double a = rng.next_unit(), b = rng.next_unit();
        if (a > b) std::swap(a, b);
        if (b - a < 1.0 / 64) continue;
        test_subinterval(a, b);
    }
    rep.eps = worst;
    rep.pass = rep.gamma <= targets.gamma && rep.delta <= targets.delta && rep.eps <= targets.eps;
    return rep;
}

StretchReport check_uniform_stretch(const C2Function& fn, double lo, double hi, double eps,
                                    double k, long samples, int crosscheck_subintervals) {
    if (!fn.df || !fn.d2f) throw std::invalid_argument("uniform stretch: derivatives unavailable");
    StretchReport rep;
    double len = hi - lo;
    double inf_df = std::numeric_limits<double>::infinity(), sup_d2f = 0;
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (long i = 0; i < samples; ++i) {
        double x = lo + len * static_cast<double>(i) / (samples - 1);
        inf_df = std::min(inf_df, std::fabs(fn.df(x)));
        sup_d2f = std::max(sup_d2f, std::fabs(fn.d2f(x)));
        double v = fn.f(x);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    rep.inf_df = inf_df;
    rep.sup_d2f = sup_d2f;
    rep.lhs_spread = inf_df * len;
    rep.rhs_spread = k;
    rep.lhs_flat = sup_d2f * len;
    rep.rhs_flat = eps * inf_df;
    rep.pass = rep.lhs_spread >= k && rep.lhs_flat <= rep.rhs_flat;

    // independent cross-check of the conclusion on dyadic value intervals
    double jlen = vmax - vmin;
    if (jlen > 0) {
        std::vector<double> vals(static_cast<size_t>(std::min<long>(samples, 200000)));
        for (size_t i = 0; i < vals.size(); ++i)
            vals[i] = fn.f(lo + len * static_cast<double>(i) / (vals.size() - 1));
        double worst = 0;
        for (int piece = 0; piece < crosscheck_subintervals; ++piece) {
            double a = vmin + jlen * piece / crosscheck_subintervals;
            double b = vmin + jlen * (piece + 1) / crosscheck_subintervals;
            double cap = preimage_measure(vals, len, a, b, false);
            double ratio_gap = std::fabs(cap / len - (b - a) / jlen);
            worst = std::max(worst, ratio_gap / ((b - a) / jlen));
        }
        rep.crosscheck_worst = worst;
        rep.crosscheck_pass = worst <= eps * 1.02 + 1e-6;  // sampling slack only
    }
    return rep;
}

StripCheckResult strip_distribution_check(const BigInt& b, const BigRational& gamma,
                                          const BigRational& c, const Interval& K,
                                          const Interval& L) {
    if (b < 0) throw std::invalid_argument("strip check: b must be positive here");
    if (b < 2) throw std::invalid_argument("strip check: need |b| >= 2");
    BigRational lk = K.length(), ll = L.length();
    if (!(BigRational(b) * lk > BigRational(2)))
        throw std::invalid_argument("strip check: need b * lambda(K) > 2");
    if (lk > BigRational(1) || ll > BigRational(1))
        throw std::invalid_argument("strip check: K, L must have length <= 1");

    // target arc T = [l1 - gamma - c, l2 - c] on the circle
    BigRational t1 = L.lo - gamma - c;
    BigRational t2 = L.hi - c;
    BigRational t_len = t2 - t1;
    StripCheckResult res;
    if (t_len >= BigRational(1)) {
        res.lambda_q = lk;  // the whole of K qualifies
    } else {
        // r in K with b r in [t1 + j, t2 + j]
        BigRational blo = BigRational(b) * K.lo, bhi = BigRational(b) * K.hi;
        BigInt j_lo = (blo - t2).floor();
        BigInt j_hi = (bhi - t1).floor() + 1;
        BigRational acc(0);
        for (BigInt j = j_lo; j <= j_hi; ++j) {
            BigRational rlo = (t1 + BigRational(j)) / BigRational(b);
            BigRational rhi = (t2 + BigRational(j)) / BigRational(b);
            BigRational lo = rlo < K.lo ? K.lo : rlo;
            BigRational hi = rhi > K.hi ? K.hi : rhi;
            if (hi > lo) acc += hi - lo;
        }
        res.lambda_q = acc;
    }
    BigRational expect = lk * ll;
    res.lhs = (res.lambda_q - expect).abs();
    res.bound = gamma * lk + BigRational(BigInt(2)) * ll / BigRational(b) +
                BigRational(BigInt(2)) * gamma / BigRational(b);
    res.pass = res.lhs <= res.bound;
    return res;
}

SquareCheckResult square_distribution_check(const PlanarMap& Phi, const PlanarMap& g,
                                            double theta_lo, double theta_hi, double height,
                                            double j_len, const Rect& S, int n, int resolution) {
    SquareCheckResult out;
    double atom_len = theta_hi - theta_lo;
    std::vector<double> ind(static_cast<size_t>(resolution));
    PlanarMap chain = Phi.then(g);
    for (int i = 0; i < resolution; ++i) {
        double t = static_cast<double>(i) / (resolution - 1);
        SurfacePoint p{theta_lo + atom_len * t, height};
        SurfacePoint img = chain.forward(p);
        bool th_in = S.th_lo <= S.th_hi
                         ? (img.theta >= S.th_lo && img.theta < S.th_hi)
                         : (img.theta >= S.th_lo || img.theta < S.th_hi);
        ind[i] = (th_in && img.r >= S.r_lo && img.r < S.r_hi) ? 1.0 : 0.0;
    }
    // plain counting with endpoint halves (the indicator is not continuous
    // in a way linear interpolation could exploit across two coordinates)
    double cap = 0;
    double step = atom_len / (resolution - 1);
    for (int i = 0; i + 1 < resolution; ++i) cap += step * 0.5 * (ind[i] + ind[i + 1]);
    double mu_s = (S.th_hi >= S.th_lo ? S.th_hi - S.th_lo : S.th_hi + 1 - S.th_lo) *
                  (S.r_hi - S.r_lo);
    out.measured = cap;
    out.lhs = std::fabs(cap * j_len - atom_len * mu_s);
    out.bound = 8.0 / n * atom_len * mu_s;
    out.pass = out.lhs <= out.bound;
    return out;
}

CriterionVerdict aggregate_criterion(const CriterionInputs& in) {
    CriterionVerdict v;
    auto add = [&](std::string name, double value, double threshold, bool pass,
                   std::string note = {}) {
        v.items.push_back({std::move(name), value, threshold, pass, std::move(note)});
    };
    add("atom_length < 1/q", in.atom_max_length, in.inv_q, in.atom_max_length < in.inv_q);
    add("coverage -> 1", in.coverage, in.coverage_floor, in.coverage >= in.coverage_floor,
        "measured total measure vs stage floor");
    add("atoms (1/(n q^s),1/n,1/n)-distributed", in.distribution_worst_eps,
        in.distribution_eps_target, in.distribution_all_pass);
    add("||DH_{n-1}||_0 < ln q", in.dh0_sup, in.ln_q, in.dh0_sup < in.ln_q);
    double d0 = in.d0_proxy + in.d0_tail_promise;
    add("d0(f^m, f_n^m) proxy < 2^-n", d0, std::pow(2.0, -in.n), d0 < std::pow(2.0, -in.n),
        in.d0_promise_only ? "certified by extension promise only (no later stage built)"
                           : "measured next-stage telescope plus certified tail");
    v.all_pass = true;
    for (auto& item : v.items) v.all_pass = v.all_pass && item.pass;
    return v;
}

}  // namespace akat
