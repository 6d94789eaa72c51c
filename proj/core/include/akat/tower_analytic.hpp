#pragma once

#include "akat/arithmetic.hpp"
#include "akat/decomposition.hpp"
#include "akat/planar_map.hpp"
#include "akat/strip_bounds.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace akat {

struct DegenerateStageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Union of the arcs [k/(2q) - w, k/(2q) + w] mod 1 around the zeros of
// sin(2 pi q theta), with w >= 1/(2 q^{3/2}) certified (w = 1/(2 q s),
// s = floor(sqrt q); exact when q is a perfect square).
struct ResonanceCover {
    BigInt q;
    BigRational half_width;               // w
    BigRational measure() const;          // 2q * 2w
    bool contains(const BigRational& theta) const;
    // the 2q open complement intervals (k/(2q)+w, (k+1)/(2q)-w)
    std::vector<std::pair<BigRational, BigRational>> complement() const;
};

ResonanceCover resonance_cover(const BigInt& q);  // throws DegenerateStageError if measure >= 1

struct AnalyticStage {
    int n = 0;
    BigRational alpha_n, alpha_next;
    double sigma = 0;
    BigInt b_n;            // [n q^sigma]
    BigInt m_n;            // mixing time
    BigRational residual;  // dist(m q alpha_next - 1/2, Z)
    BigRational phase;     // c = frac(m_n q_n alpha_next)
    bool float_built = false;  // maps and geometry materialized
    PlanarMap phi, g, h, H, f, Phi;

    const BigInt& q() const { return alpha_n.den(); }
    const BigInt& p() const { return alpha_n.num(); }
    int64_t q_i64() const;
    double phase_d() const { return phase.to_double(); }

    // psi_n(theta) = q^2 (cos(2 pi (q theta + c q ... )) - cos(2 pi q theta))
    //             = -2 q^2 sin(pi c) sin(2 pi q theta + pi c), c = phase.
    double psi(double theta) const;
    double psi_prime(double theta) const;
    double psi_second(double theta) const;
};

struct AnalyticTowerSettings {
    double sigma = 0.25;
    double rho = 0.01;
    double delta = 0.0;         // informational
    int eta_heights = 64;
    double atom_min_length = 1e-10;   // below float resolution: dropped
    double bisect_tol = 1e-12;
    int64_t float_q_limit = int64_t(1) << 40;   // beyond: arithmetic-only stage
    int64_t atom_q_limit = 100000;              // beyond: geometry skipped
    // "all": refuse to build on any (P1)-(P4)/growth failure;
    // "geometry": build, record the ledger; "none": record only.
    std::string enforce = "geometry";
    int norm_grid = 128;
    uint64_t seed = 20240901;
};

struct AnalyticTower {
    AnalyticTowerSettings settings;
    ApproximationSequence seq;          // stages + one entry beyond
    std::vector<AnalyticStage> stages;
    ConditionLedger conditions;         // P1..P4, growth7, conv4.1a rows
    std::vector<double> rho_bounds;     // rho_0..rho_N (strip calculus)
    std::vector<double> dh0_sups;       // ||DH_{n-1}||_0 per stage
};

// Builds stage n from consecutive sequence entries; prev supplies H_{n-1}.
AnalyticStage build_analytic_stage(int n, const BigRational& alpha_n,
                                   const BigRational& alpha_next, double sigma,
                                   const AnalyticStage* prev,
                                   const AnalyticTowerSettings& settings);

// Full tower from explicit q values; the sequence is extended by one
// contrived convergent past the last stage (certifying P1 by construction
// when the auto rule is used).
AnalyticTower build_analytic_tower(const std::vector<BigInt>& q_values,
                                   const AnalyticTowerSettings& settings,
                                   std::optional<BigRational> alpha_target = {});

// B_n-complement decomposition: on each monotone branch of psi_n, maximal
// consecutive intervals with psi_n-image an exact unit interval, endpoints
// by bisection, replicated over the configured height grid.
PartialDecomposition build_eta_analytic(const AnalyticStage& stage,
                                        const AnalyticTowerSettings& settings);

// Lemma-4.1(a) proof chain: ln lhs = ln(8 pi n) + (4+sigma) ln q
// + 4 pi n q^{1+sigma} rho_{n-1} + ln|alpha - alpha_n|, compared with -q.
ConditionRow verify_convergence_bound(int n, const BigInt& q, double sigma, double rho_prev,
                                      long double ln_gap);

// floor(n * q^sigma) with an exact integer check when representable.
BigInt twist_coefficient(int n, const BigInt& q, double sigma);

}  // namespace akat
