#include "akat/tower_smooth.hpp"

#include "akat/map_metrics.hpp"
#include "akat/tower_analytic.hpp"
#include "akat/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace akat {

int smooth_k_default(int n) { return n * n; }

// ---------------------------------------------------------------------------
// phi_n node

namespace {

class SmoothShearNode final : public MapNode {
public:
    SmoothShearNode(int64_t q, std::shared_ptr<const StandardSquareMap> square)
        : q_(q), sq_(std::move(square)) {}

    DDPoint fwd(DDPoint p, Wrap) const override { return apply(p, false); }
    DDPoint inv(DDPoint p, Wrap) const override { return apply(p, true); }

    Mat2 jac(DDPoint p) const override {
        double theta = dd::to_double(dd::frac(p.theta));
        double r = dd::to_double(p.r);
        double qd = static_cast<double>(q_);
        double u = theta * qd;
        double frac_j = u - std::floor(u);  // position within D_{n,j}, in units of 1/q
        if (frac_j >= 0.5) return {};       // D^2: identity
        Vec2 x{4.0 * frac_j - 1.0, 2.0 * r - 1.0};
        Mat2 j = sq_->jacobian(x);
        // conjugation by C(theta,r) = (4q(theta-j/q)-1, 2r-1)
        return {j.a, j.b * 2.0 / (4.0 * qd), j.c * 4.0 * qd / 2.0, j.d};
    }

    double seam_distance(DDPoint p) const override {
        double theta = dd::to_double(dd::frac(p.theta));
        double r = dd::to_double(p.r);
        double qd = static_cast<double>(q_);
        double u = theta * qd;
        double frac_j = u - std::floor(u);
        // distance to the half-domain lines theta = k/(2q)
        double t2 = 2.0 * frac_j;
        double dt = std::min(t2 - std::floor(t2), std::ceil(t2) - t2) / (2.0 * qd);
        if (frac_j >= 0.5) return dt;
        Vec2 x{4.0 * frac_j - 1.0, 2.0 * r - 1.0};
        return std::min(dt, sq_->seam_distance(x) / (4.0 * qd));
    }

    std::string describe() const override {
        return "phi_smooth[q=" + std::to_string(q_) + ",eps=" + std::to_string(sq_->epsilon()) +
               "]";
    }

private:
    DDPoint apply(DDPoint p, bool inverse) const {
        double theta = dd::to_double(dd::frac(p.theta));
        double r = dd::to_double(p.r);
        double qd = static_cast<double>(q_);
        double u = theta * qd;
        double base = std::floor(u);
        double frac_j = u - base;
        if (frac_j >= 0.5) return p;  // identity on D^2
        Vec2 x{4.0 * frac_j - 1.0, 2.0 * r - 1.0};
        Vec2 y = inverse ? sq_->inverse(x) : sq_->forward(x);
        // displacement form keeps the lift exact across periods
        double dtheta = (y.x - x.x) / (4.0 * qd);
        double dr = (y.y - x.y) / 2.0;
        p.theta = dd::add(p.theta, dtheta);
        p.r = dd::add(p.r, dr);
        return p;
    }

    int64_t q_;
    std::shared_ptr<const StandardSquareMap> sq_;
};

}  // namespace

PlanarMap smooth_shear_map(Surface surface, int64_t q,
                           std::shared_ptr<const StandardSquareMap> square) {
    if (q < 1) throw std::invalid_argument("smooth_shear_map: q must be >= 1");
    return PlanarMap::custom(surface, std::make_shared<SmoothShearNode>(q, std::move(square)));
}

// ---------------------------------------------------------------------------

BigRational compute_a_n(const BigInt& m_n, const BigInt& q_n, const BigRational& alpha_next) {
    BigRational period(BigInt(1), q_n);
    BigRational x = alpha_next * BigRational(m_n) - BigRational(BigInt(1), 2 * q_n);
    BigRational y = x - BigRational((x * BigRational(q_n)).floor()) * period;  // [0, 1/q)
    if (y > period * BigRational(BigInt(1), BigInt(2))) y -= period;
    BigRational bound(BigInt(1), alpha_next.den());
    if (y.abs() > bound)
        throw std::logic_error("a_n exceeds 1/q_{n+1}: growth condition violated upstream");
    return y;
}

SmoothStage build_smooth_stage(int n, const BigRational& alpha_n, const BigRational& alpha_next,
                               const SmoothStage* prev, const SmoothTowerSettings& settings) {
    SmoothStage s;
    s.n = n;
    s.alpha_n = alpha_n;
    s.alpha_next = alpha_next;
    s.sigma = settings.sigma;
    const BigInt& q = alpha_n.den();
    s.b_n = twist_coefficient(n, q, settings.sigma);
    s.m_n = mixing_index(q, alpha_next.num(), alpha_next.den());
    s.residual = mixing_residual(s.m_n, q, alpha_next);
    s.a_n = compute_a_n(s.m_n, q, alpha_next);

    s.square = standard_map_cached(1.0 / (3.0 * n), settings.moser);
    Surface surf = settings.surface;
    s.phi = smooth_shear_map(surf, s.q_i64(), s.square);
    s.g = PlanarMap::twist(surf, s.b_n.convert_to<int64_t>());
    s.h = s.phi.then(s.g);
    s.H = prev ? s.h.then(prev->H) : s.h;
    s.f = conjugated_rotation_power(s.H, alpha_next, BigInt(1));
    s.Phi = conjugated_rotation_power(s.phi, alpha_next, s.m_n);
    return s;
}

SmoothTower build_smooth_tower(const std::vector<BigInt>& q_values,
                               const SmoothTowerSettings& settings,
                               std::optional<BigInt> q_ext,
                               std::optional<BigRational> alpha_target) {
    if (q_values.empty()) throw std::invalid_argument("smooth tower: no stages requested");
    SmoothTower tower;
    tower.settings = settings;
    tower.seq.regime = Regime::smooth;
    tower.seq.sigma = settings.sigma;
    tower.seq.target = alpha_target;

    tower.seq.entries.emplace_back(BigInt(1), q_values[0]);
    for (size_t i = 1; i < q_values.size(); ++i) {
        if (q_values[i] <= q_values[i - 1])
            throw std::invalid_argument("smooth tower: q values must increase");
        tower.seq.entries.push_back(extend_entry(tower.seq.entries.back(), q_values[i]));
    }

    CkRule ck{settings.ck_factor};
    size_t n_stages = q_values.size();

    // Stage maps first: H_n does not depend on alpha_{n+1}, and the
    // extension denominator is chosen from the measured norms (growth
    // 10 n^2 q_N plus the iterate-proximity demand 2^{N+2} q_N |||H_N|||_1,
    // so the telescoping d_0 bound at the previous stage can close).
    std::vector<SmoothStage> protos;
    for (size_t idx = 0; idx < n_stages; ++idx) {
        int n = static_cast<int>(idx) + 1;
        SmoothStage s;
        s.n = n;
        s.alpha_n = tower.seq.entries[idx];
        s.sigma = settings.sigma;
        s.b_n = twist_coefficient(n, s.q(), settings.sigma);
        s.square = standard_map_cached(1.0 / (3.0 * n), settings.moser);
        s.phi = smooth_shear_map(settings.surface, s.q_i64(), s.square);
        s.g = PlanarMap::twist(settings.surface, s.b_n.convert_to<int64_t>());
        s.h = s.phi.then(s.g);
        s.H = idx == 0 ? s.h : s.h.then(protos.back().H);
        protos.push_back(std::move(s));
    }

    if (!q_ext) {
        const BigInt& q_last = q_values.back();
        auto n_last = static_cast<int64_t>(n_stages);
        double h1 = norm_triple(protos.back().H, 1, settings.norm_grid, settings.seed,
                                1e-3 / static_cast<double>(protos.back().q_i64()));
        BigInt growth_need = BigInt(10) * n_last * n_last * q_last;
        long double ln_need = (static_cast<long double>(n_stages) + 2.0L) * 0.6931471805599453L +
                              log_bigint(q_last) + std::logl(std::max(1.0, h1)) + 2.0L;
        q_ext = next_pow10_exceeding(ln_need, growth_need);
    }
    tower.seq.entries.push_back(extend_entry(tower.seq.entries.back(), *q_ext));

    std::string structural = tower.seq.check_structure();
    if (!structural.empty()) throw std::invalid_argument("smooth tower: " + structural);

    for (size_t idx = 0; idx < n_stages; ++idx) {
        int n = static_cast<int>(idx) + 1;
        SmoothStage s = std::move(protos[idx]);
        s.alpha_next = tower.seq.entries[idx + 1];
        s.m_n = mixing_index(s.q(), s.alpha_next.num(), s.alpha_next.den());
        s.residual = mixing_residual(s.m_n, s.q(), s.alpha_next);
        s.a_n = compute_a_n(s.m_n, s.q(), s.alpha_next);
        s.f = conjugated_rotation_power(s.H, s.alpha_next, BigInt(1));
        s.Phi = conjugated_rotation_power(s.phi, s.alpha_next, s.m_n);

        int kn = idx < settings.k_seq.size() ? settings.k_seq[idx] : smooth_k_default(n);
        int norm_order = std::min(kn + 1, 4);
        SmoothStageBounds b;
        double fd = 1e-3 / static_cast<double>(s.q_i64());
        b.h_norm_high = norm_estimate(s, norm_order, settings.norm_grid, settings.seed);
        b.norm_order = norm_order;
        b.h_norm_1 = norm_triple(s.H, 1, settings.norm_grid, settings.seed, fd);
        b.dh0_sup = idx == 0 ? 1.0
                             : jacobian_entry_sup(tower.stages[idx - 1].H, settings.norm_grid,
                                                  settings.seed);
        tower.h_norms_1.push_back(b.h_norm_1);

        const BigInt* q_prev = idx == 0 ? nullptr : &tower.seq.entries[idx - 1].den();
        auto rows = smooth_stage_rows(n, tower.seq.gap(idx).log_abs(), s.q(), q_prev, kn, ck, b);
        bool pass = true;
        for (auto& r : rows) {
            pass = pass && r.pass;
            tower.conditions.rows.push_back(std::move(r));
        }
        if (!pass && settings.enforce == "all") {
            const ConditionRow* fail = tower.conditions.first_failure();
            throw std::invalid_argument("smooth tower: condition " +
                                        (fail ? fail->name : std::string("?")) +
                                        " failed at stage " + std::to_string(n) +
                                        "; refusing to build");
        }
        tower.stages.push_back(std::move(s));
    }
    return tower;
}

// ---------------------------------------------------------------------------
// eta and Lemma-5.8 verification

PartialDecomposition build_eta_smooth(const SmoothStage& stage, int heights) {
    PartialDecomposition out;
    out.surface = Surface::annulus;
    int n = stage.n;
    int64_t q = stage.q_i64();
    BigRational inv_q(BigInt(1), stage.q());
    BigRational margin(BigInt(1), BigInt(6) * n * stage.q());
    BigRational half(BigInt(1), BigInt(2) * stage.q());
    BigRational d2_guard = margin - stage.a_n.abs();
    if (d2_guard <= BigRational(0))
        throw std::logic_error("eta: Ibar atoms leak outside D^2 (|a_n| bound failed)");

    long id = 0;
    for (int64_t j = 0; j < q; ++j) {
        BigRational base(BigInt(j), stage.q());
        // I_{n,j} = [j/q + 1/(6nq), j/q + 1/(2q) - 1/(6nq)]
        ThetaAtom a;
        a.lo = (base + margin).to_double();
        a.hi = (base + half - margin).to_double();
        a.branch = static_cast<int>(j);
        a.kind = 0;
        a.id = id++;
        out.atoms.push_back(a);
        // Ibar_{n,j} = [j/q + 1/(2q) + 1/(6nq) - a_n, (j+1)/q - 1/(6nq) - a_n]
        ThetaAtom b;
        b.lo = (base + half + margin - stage.a_n).to_double();
        b.hi = (base + inv_q - margin - stage.a_n).to_double();
        b.branch = static_cast<int>(j);
        b.kind = 1;
        b.id = id++;
        out.atoms.push_back(b);
    }
    double r_lo = 1.0 / (3.0 * n), r_hi = 1.0 - 1.0 / (3.0 * n);
    out.heights.reserve(heights);
    for (int k = 0; k < heights; ++k)
        out.heights.push_back(heights == 1 ? 0.5 * (r_lo + r_hi)
                                           : r_lo + (r_hi - r_lo) * k / (heights - 1));
    return out;
}

namespace {

// Does theta land in the open half-domain D^i (i=1,2) of width 1/(2q)?
bool in_half_domain(const BigRational& theta, const BigInt& q, int half) {
    BigRational t = theta.frac();
    BigRational scaled = t * BigRational(q);
    BigRational frac_j = scaled - BigRational(scaled.floor());
    BigRational h(BigInt(1), BigInt(2));
    return half == 1 ? frac_j < h : frac_j > h;
}

}  // namespace

VerticalImageReport verify_vertical_images(const SmoothStage& stage,
                                           const PartialDecomposition& eta, double tol,
                                           int samples_per_atom) {
    VerticalImageReport rep;
    int n = stage.n;
    double r_lo = 1.0 / (3.0 * n), r_hi = 1.0 - 1.0 / (3.0 * n);
    BigRational shift = (stage.alpha_next * BigRational(stage.m_n)).frac();

    size_t n_atoms = eta.atoms.size();
    std::vector<std::vector<VerticalImageRow>> rows(n_atoms);
    parallel_chunks(n_atoms, [&](size_t ai) {
        const ThetaAtom& atom = eta.atoms[ai];
        // intermediate inclusion, exact: I-atoms shift into D^2, Ibar into D^1
        BigRational lo = rational_from_double(atom.lo) + shift;
        BigRational hi = rational_from_double(atom.hi) + shift;
        int target_half = atom.kind == 0 ? 2 : 1;
        bool intermediate =
            in_half_domain(lo, stage.q(), target_half) && in_half_domain(hi, stage.q(), target_half);
        for (double r : eta.heights) {
            VerticalImageRow row;
            row.atom_id = atom.id;
            row.kind = atom.kind;
            row.height = r;
            row.intermediate_ok = intermediate;
            double min_theta = 2, max_theta = -1, min_r = 2, max_r = -1;
            double theta_ref = -1;
            double spread = 0;
            for (int k = 0; k < samples_per_atom; ++k) {
                double t = samples_per_atom == 1
                               ? 0.5
                               : static_cast<double>(k) / (samples_per_atom - 1);
                SurfacePoint p{atom.lo + (atom.hi - atom.lo) * t, r};
                SurfacePoint img = stage.Phi.forward(p);
                if (theta_ref < 0) theta_ref = img.theta;
                spread = std::max(spread, circle_dist(img.theta, theta_ref));
                min_theta = std::min(min_theta, img.theta);
                max_theta = std::max(max_theta, img.theta);
                min_r = std::min(min_r, img.r);
                max_r = std::max(max_r, img.r);
            }
            row.theta_spread = spread;
            row.r_lo = min_r;
            row.r_hi = max_r;
            double extent_err = std::max(std::fabs(min_r - r_lo), std::fabs(max_r - r_hi));
            row.pass = intermediate && spread <= tol && extent_err <= tol;
            rows[ai].push_back(row);
        }
    });

    rep.all_pass = true;
    for (auto& group : rows)
        for (auto& row : group) {
            rep.max_theta_spread = std::max(rep.max_theta_spread, row.theta_spread);
            rep.max_extent_error =
                std::max(rep.max_extent_error,
                         std::max(std::fabs(row.r_lo - r_lo), std::fabs(row.r_hi - r_hi)));
            rep.all_pass = rep.all_pass && row.pass;
            rep.rows.push_back(row);
        }
    return rep;
}

double norm_estimate(const SmoothStage& stage, int k, int grid, uint64_t seed) {
    double fd = 1e-3 / static_cast<double>(stage.q_i64());
    return norm_triple(stage.H, k, grid, seed, fd);
}

}  // namespace akat
