#include "akat/tower_analytic.hpp"

#include "akat/map_metrics.hpp"
#include "akat/parallel.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>

namespace akat {

namespace mp = boost::multiprecision;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;
}  // namespace

// ---------------------------------------------------------------------------
// Resonance cover B_n

BigRational ResonanceCover::measure() const {
    return BigRational(4 * q) * half_width;
}

bool ResonanceCover::contains(const BigRational& theta) const {
    BigRational t = theta.frac();
    BigRational scaled = t * BigRational(2 * q);  // nearest k = round(scaled)
    BigInt k = (scaled + BigRational(BigInt(1), BigInt(2))).floor();
    BigRational center(k, 2 * q);
    return (t - center).abs() <= half_width;
}

std::vector<std::pair<BigRational, BigRational>> ResonanceCover::complement() const {
    std::vector<std::pair<BigRational, BigRational>> out;
    BigInt two_q = 2 * q;
    for (BigInt k = 0; k < two_q; ++k) {
        BigRational lo = BigRational(k, two_q) + half_width;
        BigRational hi = BigRational(k + 1, two_q) - half_width;
        out.emplace_back(lo, hi);
    }
    return out;
}

ResonanceCover resonance_cover(const BigInt& q) {
    if (q < 1) throw std::invalid_argument("resonance_cover: q must be positive");
    BigInt s = mp::sqrt(q);  // floor(sqrt q); exact width when q is a square
    ResonanceCover cover;
    cover.q = q;
    cover.half_width = BigRational(BigInt(1), 2 * q * s);
    if (cover.measure() >= BigRational(1))
        throw DegenerateStageError("resonance cover has measure >= 1 (q too small): q = " +
                                   q.str());
    return cover;
}

// ---------------------------------------------------------------------------
// Stage

int64_t AnalyticStage::q_i64() const { return q().convert_to<int64_t>(); }

// psi_n = -2 q^2 sin(pi c) sin(2 pi q theta + pi c): the product form of
// q^2 (cos(2 pi(q theta + m q alpha)) - cos(2 pi q theta)) avoids the
// cancellation of the difference form.
double AnalyticStage::psi(double theta) const {
    double qd = static_cast<double>(q_i64());
    double u = dd::to_double(dd::frac(dd::mul(dd::from(theta), qd)));
    double c = phase_d();
    return -2.0 * qd * qd * std::sin(kPi * c) * std::sin(kTwoPi * u + kPi * c);
}

double AnalyticStage::psi_prime(double theta) const {
    double qd = static_cast<double>(q_i64());
    double u = dd::to_double(dd::frac(dd::mul(dd::from(theta), qd)));
    double c = phase_d();
    return -2.0 * kTwoPi * qd * qd * qd * std::sin(kPi * c) * std::cos(kTwoPi * u + kPi * c);
}

double AnalyticStage::psi_second(double theta) const {
    double qd = static_cast<double>(q_i64());
    double u = dd::to_double(dd::frac(dd::mul(dd::from(theta), qd)));
    double c = phase_d();
    return 2.0 * kTwoPi * kTwoPi * qd * qd * qd * qd * std::sin(kPi * c) *
           std::sin(kTwoPi * u + kPi * c);
}

BigInt twist_coefficient(int n, const BigInt& q, double sigma) {
    long double x = static_cast<long double>(n) * std::expl(sigma * log_bigint(q));
    auto b = static_cast<int64_t>(std::floorl(x));
    // Near-integer: resolve b <= n q^sigma exactly when sigma has a small
    // dyadic representation (b^d <= n^d q^s for sigma = s/d).
    long double frac_part = x - std::floorl(x);
    if (frac_part < 1e-9L || frac_part > 1.0L - 1e-9L) {
        BigRational sr = rational_from_double(sigma);
        if (sr.den() <= 64 && sr.num() * log_bigint(q) < 5e4L) {
            auto d = sr.den().convert_to<unsigned>();
            auto snum = sr.num().convert_to<unsigned>();
            BigInt rhs = mp::pow(BigInt(n), d) * mp::pow(q, snum);
            BigInt cand = b + 1;
            while (mp::pow(cand, d) <= rhs) ++cand;
            return cand - 1;
        }
    }
    return BigInt(b);
}

AnalyticStage build_analytic_stage(int n, const BigRational& alpha_n,
                                   const BigRational& alpha_next, double sigma,
                                   const AnalyticStage* prev,
                                   const AnalyticTowerSettings& settings) {
    AnalyticStage s;
    s.n = n;
    s.alpha_n = alpha_n;
    s.alpha_next = alpha_next;
    s.sigma = sigma;
    const BigInt& q = alpha_n.den();
    const BigInt& q_next = alpha_next.den();
    s.m_n = mixing_index(q, alpha_next.num(), q_next);
    s.residual = mixing_residual(s.m_n, q, alpha_next);
    if (!(s.residual < BigRational(q, q_next)))
        throw std::logic_error("analytic stage: mixing residual bound violated");
    s.phase = (alpha_next * BigRational(s.m_n * q)).frac();

    if (q <= settings.float_q_limit) {
        s.float_built = true;
        s.b_n = twist_coefficient(n, q, sigma);
        if (s.b_n < 1) throw DegenerateStageError("twist coefficient [n q^sigma] < 1");
        Surface surf = Surface::torus;
        s.phi = PlanarMap::analytic_shear(surf, s.q_i64());
        s.g = PlanarMap::twist(surf, s.b_n.convert_to<int64_t>());
        s.h = s.phi.then(s.g);  // h_n = g_n o phi_n
        s.H = prev ? s.h.then(prev->H) : s.h;  // H_n = H_{n-1} o h_n
        s.f = conjugated_rotation_power(s.H, alpha_next, BigInt(1));
        s.Phi = conjugated_rotation_power(s.phi, alpha_next, s.m_n);
    }
    return s;
}

ConditionRow verify_convergence_bound(int n, const BigInt& q, double sigma, double rho_prev,
                                      long double ln_gap) {
    long double ln_q = log_bigint(q);
    long double q_pow = (1.0L + sigma) * ln_q < 700.0L
                            ? std::expl((1.0L + sigma) * ln_q)
                            : std::numeric_limits<long double>::infinity();
    long double lhs = std::logl(8.0L * std::numbers::pi_v<long double> * n) +
                      (4.0L + sigma) * ln_q +
                      4.0L * std::numbers::pi_v<long double> * n * q_pow * rho_prev + ln_gap;
    long double q_ld = ln_q < 700.0L ? std::expl(ln_q) : std::numeric_limits<long double>::infinity();
    ConditionRow row;
    row.stage = n;
    row.name = "conv4.1a";
    row.lhs = static_cast<double>(lhs);
    row.rhs = static_cast<double>(-q_ld);
    row.log_domain = true;
    row.pass = lhs <= -q_ld;
    return row;
}

AnalyticTower build_analytic_tower(const std::vector<BigInt>& q_values,
                                   const AnalyticTowerSettings& settings,
                                   std::optional<BigRational> alpha_target) {
    if (q_values.empty()) throw std::invalid_argument("analytic tower: no stages requested");
    AnalyticTower tower;
    tower.settings = settings;
    tower.seq.regime = Regime::analytic;
    tower.seq.sigma = settings.sigma;
    tower.seq.delta = settings.delta;
    tower.seq.target = alpha_target;

    // Sequence: alpha_1 = 1/q_1, then nearest coprime p/q for each given q,
    // then one contrived convergent past the last stage. Its denominator is
    // chosen so the final-stage P1 gap is certified by construction.
    tower.seq.entries.emplace_back(BigInt(1), q_values[0]);
    for (size_t i = 1; i < q_values.size(); ++i) {
        if (q_values[i] <= q_values[i - 1])
            throw std::invalid_argument("analytic tower: q values must increase");
        tower.seq.entries.push_back(extend_entry(tower.seq.entries.back(), q_values[i]));
    }
    {
        const BigInt& q_last = q_values.back();
        long double ln_need = (1.0L + 3.0L * settings.sigma) * log_bigint(q_last) + 6.0L;
        if (ln_need > 4.0e6L)
            throw std::invalid_argument(
                "analytic tower: P1-certifying extension denominator exceeds the practical "
                "scale; reduce q or sigma");
        BigInt q_ext = next_pow10_exceeding(ln_need, mp::pow(q_last, 7));
        tower.seq.entries.push_back(extend_entry(tower.seq.entries.back(), q_ext));
    }

    std::string structural = tower.seq.check_structure();
    if (!structural.empty()) throw std::invalid_argument("analytic tower: " + structural);

    std::vector<StagePrim> prims;  // built stages feeding the strip calculus
    tower.rho_bounds.push_back(settings.rho);

    size_t n_stages = q_values.size();
    for (size_t idx = 0; idx < n_stages; ++idx) {
        int n = static_cast<int>(idx) + 1;
        const BigRational& alpha_n = tower.seq.entries[idx];
        const BigRational& alpha_next = tower.seq.entries[idx + 1];

        AnalyticStageBounds bounds;
        bounds.rho_prev = tower.rho_bounds[idx];
        bounds.jac_strip_log =
            static_cast<double>(dh_strip_bound(std::span(prims), settings.rho).ln);
        bounds.dh0_sup = idx == 0 ? 1.0
                                  : jacobian_entry_sup(tower.stages[idx - 1].H,
                                                       settings.norm_grid, settings.seed);
        tower.dh0_sups.push_back(bounds.dh0_sup);

        const BigInt* q_prev = idx == 0 ? nullptr : &tower.seq.entries[idx - 1].den();
        auto rows = analytic_stage_rows(n, tower.seq.gap(idx).log_abs(), alpha_n.den(), q_prev,
                                        settings.sigma, bounds);
        bool pass = true;
        for (auto& r : rows) {
            pass = pass && r.pass;
            tower.conditions.rows.push_back(std::move(r));
        }
        if (!pass && settings.enforce == "all") {
            const ConditionRow* fail = tower.conditions.first_failure();
            throw std::invalid_argument("analytic tower: condition " +
                                        (fail ? fail->name : std::string("?")) + " failed at stage " +
                                        std::to_string(n) + "; refusing to build");
        }

        AnalyticStage stage =
            build_analytic_stage(n, alpha_n, alpha_next, settings.sigma,
                                 idx == 0 ? nullptr : &tower.stages[idx - 1], settings);
        tower.conditions.rows.push_back(verify_convergence_bound(
            n, alpha_n.den(), settings.sigma, bounds.rho_prev, tower.seq.gap(idx).log_abs()));

        if (stage.float_built) {
            prims.push_back(StagePrim{log_bigint(stage.q()),
                                      stage.b_n.convert_to<double>()});
            tower.rho_bounds.push_back(strip_norm_bounds(std::span(prims), settings.rho).back());
        } else {
            tower.rho_bounds.push_back(std::numeric_limits<double>::infinity());
        }
        tower.stages.push_back(std::move(stage));
    }
    return tower;
}

// ---------------------------------------------------------------------------
// eta_n

namespace {

// Solve psi(theta) = v on a monotone branch [lo, hi] by bisection.
double bisect_branch(const AnalyticStage& st, double lo, double hi, double v, bool increasing,
                     double tol) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        double mid = 0.5 * (a + b);
        double val = st.psi(mid);
        bool below = increasing ? (val < v) : (val > v);
        if (below)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace

PartialDecomposition build_eta_analytic(const AnalyticStage& stage,
                                        const AnalyticTowerSettings& settings) {
    if (!stage.float_built)
        throw DegenerateStageError("eta: stage was built arithmetic-only (q beyond float range)");
    if (stage.q() > settings.atom_q_limit)
        throw DegenerateStageError("eta: atoms at this q are below float resolution");
    ResonanceCover cover = resonance_cover(stage.q());

    double amp = 2.0 * std::pow(static_cast<double>(stage.q_i64()), 2.0) *
                 std::sin(kPi * stage.phase_d());
    if (!(std::fabs(amp) > 0))
        throw DegenerateStageError("eta: degenerate phase, psi vanishes identically");

    auto complement = cover.complement();
    std::vector<PartialDecomposition> per_branch(complement.size());
    parallel_chunks(complement.size(), [&](size_t bi) {
        double lo = complement[bi].first.to_double();
        double hi = complement[bi].second.to_double();
        PartialDecomposition& local = per_branch[bi];
        double pa = stage.psi(lo), pb = stage.psi(hi);
        // critical points of psi sit strictly inside the cover, so the
        // complement interval is one monotone branch
        bool increasing = pb > pa;
        double vlo = std::min(pa, pb), vhi = std::max(pa, pb);
        double v0 = std::ceil(vlo);
        if (v0 + 1.0 > vhi) {
            local.skipped_branches = 1;  // branch shorter than one unit of image
            return;
        }
        long count = static_cast<long>(std::floor(vhi) - v0);
        double prev_theta = bisect_branch(stage, lo, hi, increasing ? v0 : v0 + count, increasing,
                                          settings.bisect_tol);
        for (long i = 0; i < count; ++i) {
            double v_hi_val = increasing ? v0 + i + 1 : v0 + count - i - 1;
            double theta = bisect_branch(stage, prev_theta, hi, v_hi_val, increasing,
                                         settings.bisect_tol);
            double a = std::min(prev_theta, theta), b = std::max(prev_theta, theta);
            if (b - a >= settings.atom_min_length) {
                ThetaAtom atom;
                atom.lo = a;
                atom.hi = b;
                atom.branch = static_cast<int>(bi);
                atom.id = i;
                local.atoms.push_back(atom);
            } else {
                ++local.dropped_atoms;
            }
            prev_theta = theta;
        }
    });

    PartialDecomposition out;
    out.surface = Surface::torus;
    long id = 0;
    for (auto& pb : per_branch) {
        out.dropped_atoms += pb.dropped_atoms;
        out.skipped_branches += pb.skipped_branches;
        for (auto& a : pb.atoms) {
            a.id = id++;
            out.atoms.push_back(a);
        }
    }
    out.heights.reserve(settings.eta_heights);
    for (int k = 0; k < settings.eta_heights; ++k)
        out.heights.push_back(static_cast<double>(k) / settings.eta_heights);
    return out;
}

}  // namespace akat
