#pragma once

#include "akat/decomposition.hpp"
#include "akat/planar_map.hpp"
#include "akat/rational.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace akat {

struct DistributionTargets {
    double gamma = 1, delta = 1, eps = 1;
};

// Measured (gamma, delta, eps) of one horizontal interval's image.
struct DistributionReport {
    std::string atom_id;
    double j_start = 0, j_len = 0;  // measured r-projection interval J
    double gamma = 0;               // theta-image strip width
    double delta = 0;               // 1 - lambda(J)
    double eps = 0;                 // worst relative discrepancy over the family
    DistributionTargets targets;
    bool pass = false;
    std::string note;
};

// Direct Def-3.5 measurement: J from the sampled r-images (bisection-refined
// at the extremes), gamma from the theta spread, eps over dyadic
// subintervals of J down to lambda(J)/64 plus seeded random ones.
DistributionReport measure_distribution(const PlanarMap& Phi, double theta_lo, double theta_hi,
                                        double height, const DistributionTargets& targets,
                                        int resolution = 1024, int random_subintervals = 32,
                                        uint64_t seed = 5);

// One-dimensional C^2 function with explicit derivatives.
struct C2Function {
    std::function<double(double)> f, df, d2f;
};

struct StretchReport {
    double inf_df = 0, sup_d2f = 0;
    double lhs_spread = 0;      // inf|f'| * lambda(I)
    double rhs_spread = 0;      // required k
    double lhs_flat = 0;        // sup|f''| * lambda(I)
    double rhs_flat = 0;        // eps * inf|f'|
    bool pass = false;
    double crosscheck_worst = 0;  // direct distribution measurement
    bool crosscheck_pass = false;
};

// Derivative criterion for (eps,k)-uniform stretch, with a direct
// measurement of the conclusion on 16 dyadic value-subintervals as an
// independent cross-check.
StretchReport check_uniform_stretch(const C2Function& fn, double lo, double hi, double eps,
                                    double k, long samples = 100000,
                                    int crosscheck_subintervals = 16);

struct Interval {
    BigRational lo, hi;
    BigRational length() const { return hi - lo; }
};

struct StripCheckResult {
    BigRational lambda_q;  // exact measure of Q
    BigRational lhs;       // |lambda(Q) - lambda(K) lambda(L)|
    BigRational bound;     // gamma lambda(K) + 2 lambda(L)/b + 2 gamma/b
    bool pass = false;
};

// Exact piecewise-linear preimage measure of the strip lemma:
// Q = { r in K : b r mod 1 in [l1 - gamma, l2] - c }.
StripCheckResult strip_distribution_check(const BigInt& b, const BigRational& gamma,
                                          const BigRational& c, const Interval& K,
                                          const Interval& L);

struct Rect {
    double th_lo = 0, th_hi = 1, r_lo = 0, r_hi = 1;
    double measure() const { return (th_hi - th_lo) * (r_hi - r_lo); }
    bool contains(const SurfacePoint& p) const {
        return p.theta >= th_lo && p.theta < th_hi && p.r >= r_lo && p.r < r_hi;
    }
};

struct SquareCheckResult {
    double lhs = 0;    // |lambda(I cap Phi^{-1} g^{-1} S) lambda(J) - lambda(I) mu(S)|
    double bound = 0;  // (8/n) lambda(I) mu(S)
    double measured = 0;
    bool pass = false;
};

// Lemma-3.8 measurement for one atom and one square S of side q^{-sigma}.
SquareCheckResult square_distribution_check(const PlanarMap& Phi, const PlanarMap& g,
                                            double theta_lo, double theta_hi, double height,
                                            double j_len, const Rect& S, int n,
                                            int resolution = 4096);

struct CriterionItem {
    std::string name;
    double value = 0, threshold = 0;
    bool pass = false;
    std::string note;
};

struct CriterionVerdict {
    std::vector<CriterionItem> items;
    bool all_pass = false;
};

struct CriterionInputs {
    int n = 0;
    double inv_q = 0;             // 1/q_n
    double atom_max_length = 0;
    double coverage = 0;               // measured decomposition measure
    double coverage_floor = 0;         // stage target (trend toward 1)
    double distribution_worst_eps = 0;
    double distribution_eps_target = 0;
    bool distribution_all_pass = false;
    double dh0_sup = 0;
    double ln_q = 0;
    double d0_proxy = 0;          // measured d0(f_{n+1}^{m_n}, f_n^{m_n}), or 0
    double d0_tail_promise = 0;    // certified tail bound for unbuilt stages
    bool d0_promise_only = false;
};

// Stage-level aggregation of the weak-mixing criterion conditions.
CriterionVerdict aggregate_criterion(const CriterionInputs& in);

}  // namespace akat
