#include "akat/strip_bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace akat {

namespace {
constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;
constexpr long double kLnMax = 1.0e4900L;
}  // namespace

LogVal LogVal::from_value(long double v) {
    if (v <= 0) return zero();
    return {std::logl(v)};
}

double LogVal::value() const {
    if (ln > 700.0L) return std::numeric_limits<double>::infinity();
    if (ln < -700.0L) return 0.0;
    return static_cast<double>(std::expl(ln));
}

LogVal LogVal::operator+(LogVal o) const {
    long double hi = std::max(ln, o.ln), lo = std::min(ln, o.ln);
    if (hi - lo > 60.0L) return {hi};
    return {hi + std::log1pl(std::expl(lo - hi))};
}

LogVal phi_im_gain(long double ln_q, LogVal im_theta) {
    // q^2 * exp(2 pi q * t): ln = 2 ln q + 2 pi e^{ln q} * t
    long double ln_qt = ln_q + im_theta.ln;
    long double exponent = ln_qt > 40.0L ? kLnMax : kTwoPi * std::expl(ln_qt);
    long double ln = 2.0L * ln_q + exponent;
    return {std::min(ln, kLnMax)};
}

std::vector<StripBox> fold_inverse_chain(std::span<const StagePrim> stages, double rho) {
    std::vector<StripBox> out;
    StripBox box{LogVal::from_value(rho), LogVal::from_value(rho)};
    out.push_back(box);
    for (const auto& st : stages) {
        // h^{-1} = phi^{-1} o g^{-1}: theta' = theta - b r, then r' = r -+ q^2 cos(..)
        box.im_theta = box.im_theta + LogVal::from_value(std::fabs(st.b)) * box.im_r;
        box.im_r = box.im_r + phi_im_gain(st.ln_q, box.im_theta);
        out.push_back(box);
    }
    return out;
}

std::vector<double> strip_norm_bounds(std::span<const StagePrim> stages, double rho) {
    std::vector<double> out;
    for (const auto& box : fold_inverse_chain(stages, rho)) out.push_back(box.rho().value());
    return out;
}

namespace {

// Entrywise absolute bound matrix, log domain.
struct LogMat {
    LogVal a{-1e4932L}, b{-1e4932L}, c{-1e4932L}, d{-1e4932L};
    static LogMat identity() {
        LogMat m;
        m.a = m.d = LogVal{0};
        return m;
    }
    LogMat operator*(const LogMat& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    LogVal max_entry() const {
        LogVal m = a;
        for (LogVal v : {b, c, d})
            if (m < v) m = v;
        return m;
    }
};

// |D h| entry bounds over an Im box: Dh = Dg * Dphi = [[1 + b A, b], [A, 1]]
// with A = 2 pi q^3 exp(2 pi q * im_theta).
LogMat dh_entry_bound(const StagePrim& st, const StripBox& box) {
    long double ln_qt = st.ln_q + box.im_theta.ln;
    long double exponent = ln_qt > 40.0L ? kLnMax : kTwoPi * std::expl(ln_qt);
    LogVal A{std::min(std::logl(kTwoPi) + 3.0L * st.ln_q + exponent, kLnMax)};
    LogVal babs = LogVal::from_value(std::fabs(st.b));
    LogMat m;
    m.a = LogVal{0} + babs * A;
    m.b = babs;
    m.c = A;
    m.d = LogVal{0};
    return m;
}

// Forward Im-box fold of one stage h = g o phi (phi first).
StripBox fold_forward(const StagePrim& st, StripBox box) {
    box.im_r = box.im_r + phi_im_gain(st.ln_q, box.im_theta);
    box.im_theta = box.im_theta + LogVal::from_value(std::fabs(st.b)) * box.im_r;
    return box;
}

}  // namespace

LogVal dh_strip_bound(std::span<const StagePrim> stages, double rho) {
    if (stages.empty()) return LogVal{0};  // DH_0 = Id
    // Argument of D h_k is (h_{k+1} o ... o h_n)(w) with w in the box of
    // H_n^{-1}(A^rho); R_t (t real) adds nothing.
    StripBox box = fold_inverse_chain(stages, rho).back();
    LogMat total = LogMat::identity();
    for (size_t k = stages.size(); k-- > 0;) {
        total = dh_entry_bound(stages[k], box) * total;
        if (k > 0) box = fold_forward(stages[k], box);
    }
    return total.max_entry();
}

}  // namespace akat
