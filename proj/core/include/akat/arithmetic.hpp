#pragma once

#include "akat/rational.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace akat {

// ---------------------------------------------------------------------------
// Continued fractions

struct ConvergentList {
    std::vector<BigRational> entries;
    bool truncated = false;  // rational input exhausted its expansion
};

// First `count` continued-fraction convergents of x in (0,1), the trivial
// 0/1 convergent excluded. Each satisfies |x - p/q| < 1/q^2.
ConvergentList convergents(const BigRational& x, int count);

// ---------------------------------------------------------------------------
// Mixing-time arithmetic

// Smallest m <= q_next with dist(m * q_n * p_next/q_next, 1/2 mod 1) < q_n/q_next.
// Exact integer arithmetic at any scale; throws if no m qualifies (cannot
// happen for coprime p_next, q_next with q_n <= q_next).
BigInt mixing_index(const BigInt& q_n, const BigInt& p_next, const BigInt& q_next);

// dist(m * q_n * alpha_next - 1/2, Z) as an exact rational.
BigRational mixing_residual(const BigInt& m, const BigInt& q_n, const BigRational& alpha_next);

// Modular inverse of a mod m (gcd(a,m)=1), in [1, m).
BigInt mod_inverse(const BigInt& a, const BigInt& m);

// ---------------------------------------------------------------------------
// Approximation sequences

enum class Regime { analytic, smooth };

struct ApproximationSequence {
    std::vector<BigRational> entries;      // alpha_n = p_n/q_n, q increasing
    std::optional<BigRational> target;     // exact alpha when materialized
    Regime regime = Regime::analytic;
    double sigma = 0.25;
    double delta = 0.0;                    // analytic regime only

    const BigInt& q(size_t i) const { return entries.at(i).den(); }
    const BigInt& p(size_t i) const { return entries.at(i).num(); }

    // Certified |alpha - entries[i]|. With a target, exact; without one,
    // alpha is proxied by the final entry (never materialized beyond it).
    BigRational gap(size_t i) const;

    // Structural invariants: entries in (0,1), coprime, q strictly
    // increasing, gaps decreasing when target present. Returns a diagnostic
    // or empty string.
    std::string check_structure() const;
};

// alpha_next = p/q_next closest to prev with gcd(p, q_next) = 1, value in (0,1).
BigRational extend_entry(const BigRational& prev, const BigInt& q_next);

// Smallest power of ten with ln(10^e) > ln_demand, and >= at_least.
BigInt next_pow10_exceeding(long double ln_demand, const BigInt& at_least);

// ---------------------------------------------------------------------------
// Condition ledgers

struct ConditionRow {
    int stage = 0;          // 1-based
    std::string name;       // "P1".."P4", "growth7", "growth10n2", "conv5.5", ...
    double lhs = 0, rhs = 0;
    bool log_domain = false;  // lhs/rhs are natural logs of the actual sides
    bool pass = false;
    std::string note;
};

struct ConditionLedger {
    std::vector<ConditionRow> rows;
    bool all_pass() const;
    const ConditionRow* first_failure() const;
};

// Per-stage bounds supplied by the analytic tower for already-built prefixes.
struct AnalyticStageBounds {
    double rho_prev = 0;        // certified strip bound of H_{n-1}^{-1} (rho_0 = rho)
    double jac_strip_log = 0;   // ln of certified ||D(H_{n-1}) R_t o H_{n-1}^{-1}||_rho
    double dh0_sup = 1;         // sampled ||D H_{n-1}||_0
};

struct SmoothStageBounds {
    double h_norm_high = 1;     // |||H_n|||_{k_n+1}, finite-difference measurement
    int norm_order = 1;         // derivative order actually measured (capped at 4)
    double h_norm_1 = 1;        // |||H_n|||_1
    double dh0_sup = 1;         // ||D H_{n-1}||_0
};

// C_k rule for the conjugate-rotation distance bound; the default
// (k+1)! * 4^k is a conservative over-estimate, C_0 = 1.
struct CkRule {
    double factor = 4.0;
    long double ln(int k) const;
};

struct EnforceResult {
    std::vector<size_t> accepted;  // indices into the candidate entries
    ApproximationSequence sequence;
    ConditionLedger ledger;
    std::string diagnostic;        // first violated condition if extension stalled
};

// (P1)-(P4) plus q >= q_prev^7 for one candidate stage; ln_gap is the log
// of the certified |alpha - alpha_n|. Shared by the enforcement filter and
// the tower builders.
std::vector<ConditionRow> analytic_stage_rows(int n, long double ln_gap, const BigInt& q,
                                              const BigInt* q_prev, double sigma,
                                              const AnalyticStageBounds& b);

// Smooth-regime rows: (5.5), (5.6) with m_{n-1} = q_n, ||DH_{n-1}||_0 <= ln q,
// growth q >= 10 (n-1)^2 q_prev.
std::vector<ConditionRow> smooth_stage_rows(int n, long double ln_gap, const BigInt& q,
                                            const BigInt* q_prev, int k_n, const CkRule& ck,
                                            const SmoothStageBounds& b);

// Greedy filter of candidate entries into a sequence satisfying (P1)-(P4)
// plus the q_{n+1} >= q_n^7 growth. bounds[n-1] feeds stage n; scanning
// stops when the supplied bounds are exhausted.
EnforceResult enforce_analytic_conditions(const ApproximationSequence& candidates,
                                          double sigma, double rho,
                                          std::span<const AnalyticStageBounds> bounds);

// Same for the smooth regime: growth q_{n+1} >= 10 n^2 q_n, the convergence
// bound with measured |||H_n|||, the iterate-proximity bound with
// m_{n-1} = q_n, and ||DH_{n-1}||_0 <= ln q_n.
EnforceResult enforce_smooth_conditions(const ApproximationSequence& candidates,
                                        std::span<const int> k_seq, const CkRule& ck,
                                        double epsilon_sum,
                                        std::span<const SmoothStageBounds> bounds);

}  // namespace akat
