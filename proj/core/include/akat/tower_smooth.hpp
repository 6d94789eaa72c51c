#pragma once

#include "akat/arithmetic.hpp"
#include "akat/decomposition.hpp"
#include "akat/planar_map.hpp"
#include "akat/standard_map.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace akat {

struct SmoothStage {
    int n = 0;
    BigRational alpha_n, alpha_next;
    double sigma = 0;
    BigInt b_n;
    BigInt m_n;
    BigRational residual;
    BigRational a_n;  // (m_n alpha_{n+1} - 1/(2 q_n)) mod 1/q_n, symmetric representative
    std::shared_ptr<const StandardSquareMap> square;
    PlanarMap phi, g, h, H, f, Phi;

    const BigInt& q() const { return alpha_n.den(); }
    const BigInt& p() const { return alpha_n.num(); }
    int64_t q_i64() const { return q().convert_to<int64_t>(); }
};

struct SmoothTowerSettings {
    double sigma = 0.25;
    Surface surface = Surface::annulus;
    int eta_heights = 33;
    MoserSettings moser;
    std::vector<int> k_seq;       // empty: k_n = n^2
    double ck_factor = 4.0;       // C_k = (k+1)! * factor^k
    double epsilon_sum = 2.0;     // required: sum 1/k_n < epsilon_sum
    std::string enforce = "geometry";  // "all" | "geometry" | "none"
    int norm_grid = 48;
    uint64_t seed = 20240902;
};

struct SmoothTower {
    SmoothTowerSettings settings;
    ApproximationSequence seq;  // stages + one entry beyond
    std::vector<SmoothStage> stages;
    ConditionLedger conditions;
    std::vector<double> h_norms_1;  // |||H_n|||_1 per stage (measured)
};

int smooth_k_default(int n);

// phi_n: C_n-conjugated standard square map on each half-domain D^1_{n,j},
// identity on D^2_{n,j}, periodically extended.
PlanarMap smooth_shear_map(Surface surface, int64_t q,
                           std::shared_ptr<const StandardSquareMap> square);

// a_n = (m_n alpha_{n+1} - 1/(2 q_n)) mod 1/q_n, symmetric representative;
// asserts |a_n| <= 1/q_{n+1}.
BigRational compute_a_n(const BigInt& m_n, const BigInt& q_n, const BigRational& alpha_next);

SmoothStage build_smooth_stage(int n, const BigRational& alpha_n, const BigRational& alpha_next,
                               const SmoothStage* prev, const SmoothTowerSettings& settings);

// Full tower from explicit q values; the extension entry past the last
// stage is auto-chosen (power of ten) so the growth rule and the measured
// iterate-proximity demand hold, unless q_ext is given.
SmoothTower build_smooth_tower(const std::vector<BigInt>& q_values,
                               const SmoothTowerSettings& settings,
                               std::optional<BigInt> q_ext = {},
                               std::optional<BigRational> alpha_target = {});

// The I_{n,j} x {r} and (a_n-shifted) Ibar_{n,j} x {r} decomposition over
// the configured height grid of [1/(3n), 1-1/(3n)].
PartialDecomposition build_eta_smooth(const SmoothStage& stage, int heights);

struct VerticalImageRow {
    long atom_id = 0;
    int kind = 0;
    double height = 0;
    double theta_spread = 0;   // circular spread of image theta
    double r_lo = 0, r_hi = 0;  // sampled image extent
    bool intermediate_ok = false;  // R^{m}(atom) lands in the right half-domain
    bool pass = false;
};

struct VerticalImageReport {
    std::vector<VerticalImageRow> rows;
    double max_theta_spread = 0;
    double max_extent_error = 0;
    bool all_pass = false;
};

// Lemma-5.8 style verification: atom images are vertical intervals
// {theta} x [1/(3n), 1-1/(3n)] within tol.
VerticalImageReport verify_vertical_images(const SmoothStage& stage,
                                           const PartialDecomposition& eta,
                                           double tol = 1e-6, int samples_per_atom = 11);

// |||H_n|||_k measurement (finite differences, k <= 4).
double norm_estimate(const SmoothStage& stage, int k, int grid, uint64_t seed);

}  // namespace akat
