#pragma once

#include "akat/rational.hpp"

#include <span>
#include <vector>

namespace akat {

// Certified closed-form bounds over complex strips for the analytic tower.
// Everything is tracked in the log domain with +inf saturation, since the
// bounds explode doubly-exponentially in the stage index by design.

struct LogVal {
    long double ln = 0;  // natural log of a nonnegative quantity

    static LogVal zero() { return {-1e4932L}; }
    static LogVal from_value(long double v);
    double value() const;  // +inf when out of double range

    LogVal operator*(LogVal o) const { return {ln + o.ln}; }
    LogVal operator+(LogVal o) const;  // logsumexp
    bool operator<(LogVal o) const { return ln < o.ln; }
};

// Per-coordinate sup |Im| bounds over a strip.
struct StripBox {
    LogVal im_theta, im_r;
    LogVal rho() const { return im_theta < im_r ? im_r : im_theta; }
};

// Stage primitive parameters of h_n = g_{b} o phi_{q}.
struct StagePrim {
    long double ln_q = 0;  // ln q_n
    double b = 0;          // twist coefficient [n q^sigma]
};

// Im bound of the r-coordinate gained by one analytic shear applied on a
// box: q^2 * exp(2 pi q * im_theta), saturating.
LogVal phi_im_gain(long double ln_q, LogVal im_theta);

// Im box of H_n^{-1} over A^rho after folding stages 1..n (apply h_1^{-1}
// first). Index 0 is the initial box (rho, rho).
std::vector<StripBox> fold_inverse_chain(std::span<const StagePrim> stages, double rho);

// rho_k = max coordinate Im bound of H_k^{-1} over A^rho, k = 0..n.
std::vector<double> strip_norm_bounds(std::span<const StagePrim> stages, double rho);

// ln of a certified bound of || D(H_n) R_t o H_n^{-1} ||_rho (entrywise),
// for all real t: the chain-rule product of per-stage Jacobian entry
// bounds, each stage evaluated on the Im box its argument can reach.
LogVal dh_strip_bound(std::span<const StagePrim> stages, double rho);

}  // namespace akat
