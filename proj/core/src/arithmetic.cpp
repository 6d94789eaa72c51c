#include "akat/arithmetic.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace akat {

namespace mp = boost::multiprecision;

static constexpr long double kInf = std::numeric_limits<long double>::infinity();

// ---------------------------------------------------------------------------

ConvergentList convergents(const BigRational& x, int count) {
    if (count < 1) throw std::invalid_argument("convergents: count must be >= 1");
    if (x <= BigRational(0) || x >= BigRational(1))
        throw std::invalid_argument("convergents: x must lie in (0,1)");

    BigInt u = x.den(), v = x.num();
    BigInt hm1 = 1, h0 = 0, km1 = 0, k0 = 1;  // a0 = 0 convergent skipped
    ConvergentList out;
    while (static_cast<int>(out.entries.size()) < count) {
        if (v == 0) {
            out.truncated = true;
            break;
        }
        BigInt a = u / v;
        BigInt r = u % v;
        BigInt h = a * h0 + hm1;
        BigInt k = a * k0 + km1;
        out.entries.emplace_back(h, k);
        hm1 = h0; h0 = h;
        km1 = k0; k0 = k;
        u = v; v = r;
    }
    return out;
}

// ---------------------------------------------------------------------------

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt r0 = m, r1 = a % m;
    if (r1 < 0) r1 += m;
    BigInt t0 = 0, t1 = 1;
    while (r1 != 0) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        BigInt t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (r0 != 1) throw std::domain_error("mod_inverse: arguments not coprime");
    if (t0 < 0) t0 += m;
    return t0;
}

BigInt mixing_index(const BigInt& q_n, const BigInt& p_next, const BigInt& q_next) {
    if (q_n < 1 || q_next < q_n) throw std::invalid_argument("mixing_index: need 1 <= q_n <= q_next");
    if (mp::gcd(p_next, q_next) != 1)
        throw std::invalid_argument("mixing_index: p_next, q_next must be coprime");

    // Bound q_n/q_next > 1/2: every m qualifies, so m = 1.
    if (2 * q_n > q_next) return 1;

    const BigInt& q = q_next;
    BigInt A = (q_n % q) * (p_next % q) % q;
    if (A < 0) A += q;
    if (A == 0) throw std::logic_error("mixing_index: degenerate orbit");  // impossible for q_n < q

    BigInt g = mp::gcd(A, q);
    BigInt M = q / g;
    BigInt inv = mod_inverse(A / g, M);

    // Candidate residues v = j*g with |2v - q| < 2 q_n; the orbit of m*A mod q
    // is exactly the multiples of g, spaced g <= q_n apart, so the window is
    // non-empty. m for residue j*g is j*inv mod M (0 stands for M).
    BigInt two_g = 2 * g;
    BigInt j = (q - 2 * q_n) / two_g + 1;
    BigInt m_cur = (j % M) * inv % M;
    BigInt best = -1;
    for (; 2 * j * g < q + 2 * q_n; ++j) {
        BigInt v = j * g;
        BigInt dev = 2 * v - q;
        if (dev < 0) dev = -dev;
        if (dev < 2 * q_n) {
            BigInt m = m_cur == 0 ? M : m_cur;
            if (best < 0 || m < best) best = m;
        }
        m_cur += inv;
        if (m_cur >= M) m_cur -= M;
    }
    if (best < 0)
        throw std::logic_error("mixing_index: empty candidate window; growth precondition violated");
    return best;
}

BigRational mixing_residual(const BigInt& m, const BigInt& q_n, const BigRational& alpha_next) {
    if (m < 1) throw std::invalid_argument("mixing_residual: m must be >= 1");
    BigRational x = BigRational(m * q_n) * alpha_next - BigRational(BigInt(1), BigInt(2));
    return x.dist_to_integer();
}

// ---------------------------------------------------------------------------

BigRational ApproximationSequence::gap(size_t i) const {
    const BigRational& alpha = target ? *target : entries.back();
    return (alpha - entries.at(i)).abs();
}

std::string ApproximationSequence::check_structure() const {
    if (entries.empty()) return "empty sequence";
    for (size_t i = 0; i < entries.size(); ++i) {
        const BigRational& a = entries[i];
        if (a <= BigRational(0) || a >= BigRational(1)) return "entry outside (0,1)";
        if (i > 0 && entries[i].den() <= entries[i - 1].den()) return "q not strictly increasing";
    }
    if (target) {
        for (size_t i = 0; i + 1 < entries.size(); ++i)
            if (gap(i + 1) > gap(i)) return "|alpha - alpha_n| not decreasing";
    }
    return {};
}

BigRational extend_entry(const BigRational& prev, const BigInt& q_next) {
    if (q_next <= prev.den()) throw std::invalid_argument("extend_entry: q_next too small");
    BigInt p0 = (prev * BigRational(q_next) + BigRational(BigInt(1), BigInt(2))).floor();

    // Coprimality test; fast path for denominators of the form 2^a 5^b.
    BigInt rest = q_next;
    while (rest % 2 == 0) rest /= 2;
    while (rest % 5 == 0) rest /= 5;
    auto coprime = [&](const BigInt& p) {
        if (rest == 1) return p % 2 != 0 && p % 5 != 0;
        return mp::gcd(p, q_next) == 1;
    };

    for (BigInt off = 0; off < 64; ++off) {
        for (int s : {1, -1}) {
            if (off == 0 && s < 0) continue;
            BigInt p = s > 0 ? p0 + off : p0 - off;
            if (p <= 0 || p >= q_next) continue;
            if (!coprime(p)) continue;
            BigRational cand(p, q_next);
            if (cand != prev) return cand;
        }
    }
    throw std::logic_error("extend_entry: no coprime numerator found near target");
}

BigInt next_pow10_exceeding(long double ln_demand, const BigInt& at_least) {
    int64_t e = decimal_exponent_for_log(ln_demand);
    if (e < 1) e = 1;
    BigInt q = pow10(static_cast<uint64_t>(e));
    while (q < at_least) q *= 10;
    return q;
}

// ---------------------------------------------------------------------------

bool ConditionLedger::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

const ConditionRow* ConditionLedger::first_failure() const {
    for (const auto& r : rows)
        if (!r.pass) return &r;
    return nullptr;
}

long double CkRule::ln(int k) const {
    if (k == 0) return 0.0L;  // C_0 = 1
    return std::lgammal(static_cast<long double>(k) + 2.0L) +
           static_cast<long double>(k) * std::logl(static_cast<long double>(factor));
}

namespace {

ConditionRow make_row(int stage, std::string name, long double lhs, long double rhs,
                      bool log_domain, bool pass, std::string note = {}) {
    ConditionRow row;
    row.stage = stage;
    row.name = std::move(name);
    row.lhs = static_cast<double>(lhs);
    row.rhs = static_cast<double>(rhs);
    row.log_domain = log_domain;
    row.pass = pass;
    row.note = std::move(note);
    return row;
}

}  // namespace

std::vector<ConditionRow> analytic_stage_rows(int n, long double ln_gap, const BigInt& q,
                                              const BigInt* q_prev, double sigma,
                                              const AnalyticStageBounds& b) {
    const long double pi = std::numbers::pi_v<long double>;
    long double ln_q = log_bigint(q);
    std::vector<ConditionRow> rows;

    // (P1)  |alpha - alpha_n| < exp(-q^(1+3 sigma))
    {
        long double exponent = (1.0L + 3.0L * sigma) * ln_q;
        long double rhs = exponent < 11000.0L ? -std::expl(exponent) : -kInf;
        bool pass = ln_gap < rhs || (ln_gap == -kInf);
        rows.push_back(make_row(n, "P1", ln_gap, rhs, true, pass,
                                exponent >= 11000.0L ? "threshold below representable range" : ""));
    }
    // (P2)  q^sigma >= 4 pi n rho_{n-1} + ln(8 pi n q^(sigma+4))
    {
        long double lnp = sigma * ln_q;
        long double lhs = lnp < 11000.0L ? std::expl(lnp) : kInf;
        long double rhs = 4.0L * pi * static_cast<long double>(n) * b.rho_prev +
                          std::logl(8.0L * pi * static_cast<long double>(n)) +
                          (sigma + 4.0L) * ln_q;
        rows.push_back(make_row(n, "P2", lhs, rhs, false, lhs >= rhs));
    }
    // (P3)  q >= ||D(H_{n-1}) R_t o H_{n-1}^{-1}||_rho   (compared in logs)
    rows.push_back(make_row(n, "P3", ln_q, b.jac_strip_log, true, ln_q >= b.jac_strip_log));
    // (P4)  ||D H_{n-1}||_0 <= ln q
    rows.push_back(make_row(n, "P4", b.dh0_sup, ln_q, false, b.dh0_sup <= ln_q));
    // growth  q_{n+1} >= q_n^7
    if (q_prev) {
        bool pass = q >= mp::pow(*q_prev, 7);
        rows.push_back(make_row(n, "growth7", ln_q, 7.0L * log_bigint(*q_prev), true, pass));
    }
    return rows;
}

std::vector<ConditionRow> smooth_stage_rows(int n, long double ln_gap, const BigInt& q,
                                            const BigInt* q_prev, int kn, const CkRule& ck,
                                            const SmoothStageBounds& b) {
    long double ln_q = log_bigint(q);
    std::vector<ConditionRow> rows;

    // (5.5)  |alpha - alpha_n| < 1 / (2 k_n C_{k_n} |||H_n|||_{k_n+1}^{k_n+1})
    {
        long double rhs = -(std::logl(2.0L * kn) + ck.ln(kn) +
                            (static_cast<long double>(kn) + 1.0L) * std::logl(b.h_norm_high));
        std::string note;
        if (b.norm_order < kn + 1)
            note = "norm measured at order " + std::to_string(b.norm_order) +
                   " (finite differences unreliable beyond 4)";
        rows.push_back(make_row(n, "conv5.5", ln_gap, rhs, true, ln_gap < rhs, std::move(note)));
    }
    // (5.6) with m_{n-1} = q_n:  |alpha - alpha_n| < 1 / (2^{n+1} q_n |||H_n|||_1)
    {
        long double rhs = -((static_cast<long double>(n) + 1.0L) * 0.69314718055994530942L + ln_q +
                            std::logl(b.h_norm_1));
        rows.push_back(make_row(n, "conv5.6", ln_gap, rhs, true, ln_gap < rhs));
    }
    // (3.4)  ||D H_{n-1}||_0 <= ln q_n
    rows.push_back(make_row(n, "DH0", b.dh0_sup, ln_q, false, b.dh0_sup <= ln_q));
    // growth  q_{n+1} >= 10 n^2 q_n  (paper numbering: previous stage index)
    if (q_prev) {
        BigInt need = BigInt(10) * static_cast<int64_t>((n - 1) * (n - 1)) * (*q_prev);
        rows.push_back(make_row(n, "growth10n2", ln_q, log_bigint(need), true, q >= need));
    }
    return rows;
}

EnforceResult enforce_analytic_conditions(const ApproximationSequence& candidates,
                                          double sigma, double rho,
                                          std::span<const AnalyticStageBounds> bounds) {
    if (candidates.entries.empty()) throw std::invalid_argument("enforce_analytic: empty input");
    if (!(sigma > 0 && sigma < 1)) throw std::invalid_argument("enforce_analytic: sigma outside (0,1)");
    if (candidates.delta > 0 && !(sigma < candidates.delta / 3.0))
        throw std::invalid_argument("enforce_analytic: need sigma < delta/3");
    (void)rho;  // carried by bounds[0].rho_prev

    EnforceResult res;
    res.sequence.regime = Regime::analytic;
    res.sequence.sigma = sigma;
    res.sequence.delta = candidates.delta;
    res.sequence.target = candidates.target ? candidates.target
                                            : std::optional<BigRational>(candidates.entries.back());

    BigInt q_prev = 0;

    for (size_t i = 0; i < candidates.entries.size(); ++i) {
        size_t n = res.accepted.size() + 1;  // stage this candidate would become
        if (n > bounds.size()) break;
        std::vector<ConditionRow> rows = analytic_stage_rows(
            static_cast<int>(n), candidates.gap(i).log_abs(), candidates.q(i),
            res.accepted.empty() ? nullptr : &q_prev, sigma, bounds[n - 1]);

        bool all = true;
        for (const auto& r : rows) all = all && r.pass;
        for (auto& r : rows) res.ledger.rows.push_back(std::move(r));
        if (all) {
            res.accepted.push_back(i);
            res.sequence.entries.push_back(candidates.entries[i]);
            q_prev = candidates.q(i);
        } else if (res.diagnostic.empty()) {
            for (const auto& r : res.ledger.rows)
                if (!r.pass && r.stage == static_cast<int>(n)) {
                    res.diagnostic = r.name + " at stage " + std::to_string(n);
                    break;
                }
        }
    }
    if (res.accepted.size() == bounds.size()) res.diagnostic.clear();
    return res;
}

EnforceResult enforce_smooth_conditions(const ApproximationSequence& candidates,
                                        std::span<const int> k_seq, const CkRule& ck,
                                        double epsilon_sum,
                                        std::span<const SmoothStageBounds> bounds) {
    if (candidates.entries.empty()) throw std::invalid_argument("enforce_smooth: empty input");
    if (k_seq.size() < bounds.size())
        throw std::invalid_argument("enforce_smooth: k sequence shorter than bounds");
    double partial = 0;
    for (size_t i = 0; i < bounds.size(); ++i) partial += 1.0 / k_seq[i];
    if (!(partial < epsilon_sum))
        throw std::invalid_argument("enforce_smooth: sum 1/k_n exceeds configured epsilon");

    EnforceResult res;
    res.sequence.regime = Regime::smooth;
    res.sequence.sigma = candidates.sigma;
    res.sequence.target = candidates.target ? candidates.target
                                            : std::optional<BigRational>(candidates.entries.back());

    BigInt q_prev = 0;
    for (size_t i = 0; i < candidates.entries.size(); ++i) {
        size_t n = res.accepted.size() + 1;
        if (n > bounds.size()) break;
        std::vector<ConditionRow> rows = smooth_stage_rows(
            static_cast<int>(n), candidates.gap(i).log_abs(), candidates.q(i),
            res.accepted.empty() ? nullptr : &q_prev, k_seq[n - 1], ck, bounds[n - 1]);

        bool all = true;
        for (const auto& r : rows) all = all && r.pass;
        for (auto& r : rows) res.ledger.rows.push_back(std::move(r));
        if (all) {
            res.accepted.push_back(i);
            res.sequence.entries.push_back(candidates.entries[i]);
            q_prev = candidates.q(i);
        } else if (res.diagnostic.empty()) {
            for (const auto& r : res.ledger.rows)
                if (!r.pass && r.stage == static_cast<int>(n)) {
                    res.diagnostic = r.name + " at stage " + std::to_string(n);
                    break;
                }
        }
    }
    if (res.accepted.size() == bounds.size()) res.diagnostic.clear();
    return res;
}

}  // namespace akat
