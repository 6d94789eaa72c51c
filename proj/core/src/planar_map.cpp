#include "akat/planar_map.hpp"

#include <cmath>
#include <numbers>

namespace akat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int64_t kBigAngleThreshold = int64_t(1) << 20;  // dd reduction above this q

DDPoint wrap_surface(DDPoint p, Surface s, Wrap mode = Wrap::surface) {
    if (mode == Wrap::lift) return p;
    p.theta = dd::frac(p.theta);
    if (s == Surface::torus) {
        p.r = dd::frac(p.r);
    } else {
        double r = dd::to_double(p.r);
        if (r < -kAnnulusEscapeTol || r > 1.0 + kAnnulusEscapeTol)
            throw MapDefectError("annulus point escaped [0,1]: r = " + std::to_string(r));
        if (r < 0.0) p.r = dd::from(0.0);
        if (r > 1.0) p.r = dd::from(1.0);
    }
    return p;
}

class RotationNode final : public MapNode {
public:
    explicit RotationNode(BigRational t) : t_(t.frac()) {
        t_dd_.hi = t_.to_double();
        t_dd_.lo = (t_ - rational_from_double(t_dd_.hi)).to_double();
    }

    const BigRational& amount() const { return t_; }
    DDouble amount_dd() const { return t_dd_; }

    DDPoint fwd(DDPoint p, Wrap) const override {
        p.theta = dd::add(p.theta, t_dd_);
        return p;
    }
    DDPoint inv(DDPoint p, Wrap) const override {
        p.theta = dd::sub(p.theta, t_dd_);
        return p;
    }
    Mat2 jac(DDPoint) const override { return {}; }
    std::string describe() const override { return "R[" + t_.to_string() + "]"; }

private:
    BigRational t_;
    DDouble t_dd_;
};

class AnalyticShearNode final : public MapNode {
public:
    AnalyticShearNode(int64_t q, int sign) : q_(q), sign_(sign) {}

    DDPoint fwd(DDPoint p, Wrap) const override { return apply(p, sign_); }
    DDPoint inv(DDPoint p, Wrap) const override { return apply(p, -sign_); }

    Mat2 jac(DDPoint p) const override {
        double qd = static_cast<double>(q_);
        double s;
        if (q_ > kBigAngleThreshold) {
            DDouble sn, cs;
            dd::sincos_turn(dd::mul(p.theta, qd), sn, cs);
            s = dd::to_double(sn);
        } else {
            s = std::sin(kTwoPi * qd * dd::to_double(p.theta));
        }
        Mat2 j;
        j.c = -sign_ * kTwoPi * qd * qd * qd * s;
        return j;
    }

    std::string describe() const override {
        return (sign_ > 0 ? "phi[q=" : "phi_inv[q=") + std::to_string(q_) + "]";
    }

private:
    DDPoint apply(DDPoint p, int sign) const {
        double qd = static_cast<double>(q_);
        DDouble value;
        if (q_ > kBigAngleThreshold) {
            DDouble sn, cs;
            dd::sincos_turn(dd::mul(p.theta, qd), sn, cs);
            DDouble amp = dd::two_prod(qd, qd);  // q^2 exactly
            value = dd::mul(cs, amp);
        } else {
            double c = std::cos(kTwoPi * qd * dd::to_double(p.theta));
            value = dd::mul(dd::two_prod(qd, qd), c);
        }
        p.r = sign > 0 ? dd::add(p.r, value) : dd::sub(p.r, value);
        return p;
    }

    int64_t q_;
    int sign_;
};

class TwistNode final : public MapNode {
public:
    explicit TwistNode(int64_t b) : b_(b) {}

    DDPoint fwd(DDPoint p, Wrap) const override {
        p.theta = dd::add(p.theta, dd::mul(p.r, static_cast<double>(b_)));
        return p;
    }
    DDPoint inv(DDPoint p, Wrap) const override {
        p.theta = dd::sub(p.theta, dd::mul(p.r, static_cast<double>(b_)));
        return p;
    }
    Mat2 jac(DDPoint) const override { return {1, static_cast<double>(b_), 0, 1}; }
    std::string describe() const override { return "g[b=" + std::to_string(b_) + "]"; }

private:
    int64_t b_;
};

class InverseNode final : public MapNode {
public:
    InverseNode(MapNodePtr child, Surface s) : child_(std::move(child)), surface_(s) {}

    DDPoint fwd(DDPoint p, Wrap mode) const override { return child_->inv(p, mode); }
    DDPoint inv(DDPoint p, Wrap mode) const override { return child_->fwd(p, mode); }
    Mat2 jac(DDPoint p) const override {
        DDPoint y = wrap_surface(child_->inv(p, Wrap::surface), surface_);
        return child_->jac(y).inverse();
    }
    double seam_distance(DDPoint p) const override {
        DDPoint y = wrap_surface(child_->inv(p, Wrap::surface), surface_);
        return std::min(child_->seam_distance(p), child_->seam_distance(y));
    }
    std::string describe() const override { return "inv(" + child_->describe() + ")"; }

    const MapNodePtr& child() const { return child_; }

private:
    MapNodePtr child_;
    Surface surface_;
};

class CompositionNode final : public MapNode {
public:
    CompositionNode(std::vector<MapNodePtr> chain, Surface s)
        : chain_(std::move(chain)), surface_(s) {}

    DDPoint fwd(DDPoint p, Wrap mode) const override {
        for (const auto& n : chain_) p = wrap_surface(n->fwd(p, mode), surface_, mode);
        return p;
    }
    DDPoint inv(DDPoint p, Wrap mode) const override {
        for (auto it = chain_.rbegin(); it != chain_.rend(); ++it)
            p = wrap_surface((*it)->inv(p, mode), surface_, mode);
        return p;
    }
    Mat2 jac(DDPoint p) const override {
        Mat2 total;
        for (const auto& n : chain_) {
            total = n->jac(p) * total;
            p = wrap_surface(n->fwd(p, Wrap::surface), surface_);
        }
        return total;
    }
    double seam_distance(DDPoint p) const override {
        double best = 1.0;
        for (const auto& n : chain_) {
            best = std::min(best, n->seam_distance(p));
            p = wrap_surface(n->fwd(p, Wrap::surface), surface_);
        }
        return best;
    }
    std::string describe() const override {
        std::string s = "[";
        for (size_t i = 0; i < chain_.size(); ++i) {
            if (i) s += " ; ";
            s += chain_[i]->describe();
        }
        return s + "]";
    }

    const std::vector<MapNodePtr>& chain() const { return chain_; }

private:
    std::vector<MapNodePtr> chain_;
    Surface surface_;
};

class IterateNode final : public MapNode {
public:
    IterateNode(MapNodePtr child, long long power, Surface s)
        : child_(std::move(child)), power_(power), surface_(s) {}

    DDPoint fwd(DDPoint p, Wrap mode) const override { return run(p, power_, mode); }
    DDPoint inv(DDPoint p, Wrap mode) const override { return run(p, -power_, mode); }

    Mat2 jac(DDPoint p) const override {
        Mat2 total;
        long long n = power_ < 0 ? -power_ : power_;
        for (long long i = 0; i < n; ++i) {
            if (power_ > 0) {
                total = child_->jac(p) * total;
                p = wrap_surface(child_->fwd(p, Wrap::surface), surface_);
            } else {
                DDPoint y = wrap_surface(child_->inv(p, Wrap::surface), surface_);
                total = child_->jac(y).inverse() * total;
                p = y;
            }
        }
        return total;
    }
    double seam_distance(DDPoint p) const override {
        double best = 1.0;
        long long n = power_ < 0 ? -power_ : power_;
        for (long long i = 0; i < n && best > 0; ++i) {
            best = std::min(best, child_->seam_distance(p));
            p = wrap_surface(power_ > 0 ? child_->fwd(p, Wrap::surface) : child_->inv(p, Wrap::surface),
                             surface_);
        }
        return best;
    }
    std::string describe() const override {
        return child_->describe() + "^" + std::to_string(power_);
    }

private:
    DDPoint run(DDPoint p, long long power, Wrap mode) const {
        long long n = power < 0 ? -power : power;
        for (long long i = 0; i < n; ++i)
            p = wrap_surface(power > 0 ? child_->fwd(p, mode) : child_->inv(p, mode),
                             surface_, mode);
        return p;
    }

    MapNodePtr child_;
    long long power_;
    Surface surface_;
};

}  // namespace

double Mat2::max_abs() const {
    return std::max(std::max(std::fabs(a), std::fabs(b)), std::max(std::fabs(c), std::fabs(d)));
}

double wrap_unit(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;
    if (f < 0.0) f = 0.0;
    return f;
}

double circle_dist(double a, double b) {
    double d = std::fabs(wrap_unit(a) - wrap_unit(b));
    return d <= 0.5 ? d : 1.0 - d;
}

PlanarMap PlanarMap::identity(Surface s) {
    PlanarMap m;
    m.surface_ = s;
    return m;
}

PlanarMap PlanarMap::rotation(Surface s, BigRational t) {
    PlanarMap m;
    m.surface_ = s;
    m.node_ = std::make_shared<RotationNode>(std::move(t));
    return m;
}

PlanarMap PlanarMap::rotation_times(Surface s, const BigRational& alpha, const BigInt& m) {
    return rotation(s, (alpha * BigRational(m)).frac());
}

PlanarMap PlanarMap::analytic_shear(Surface s, int64_t q, int sign) {
    if (q < 1) throw std::invalid_argument("analytic_shear: q must be >= 1");
    PlanarMap m;
    m.surface_ = s;
    m.node_ = std::make_shared<AnalyticShearNode>(q, sign >= 0 ? 1 : -1);
    return m;
}

PlanarMap PlanarMap::twist(Surface s, int64_t b) {
    PlanarMap m;
    m.surface_ = s;
    m.node_ = std::make_shared<TwistNode>(b);
    return m;
}

PlanarMap PlanarMap::custom(Surface s, MapNodePtr node) {
    PlanarMap m;
    m.surface_ = s;
    m.node_ = std::move(node);
    return m;
}

PlanarMap PlanarMap::then(const PlanarMap& next) const {
    if (surface_ != next.surface_ && node_ && next.node_)
        throw std::invalid_argument("PlanarMap::then: surface mismatch");
    if (!node_) return next;
    if (!next.node_) return *this;
    std::vector<MapNodePtr> chain;
    auto append = [&chain](const MapNodePtr& n) {
        if (auto* c = dynamic_cast<const CompositionNode*>(n.get()))
            for (const auto& sub : c->chain()) chain.push_back(sub);
        else
            chain.push_back(n);
    };
    append(node_);
    append(next.node_);
    PlanarMap m;
    m.surface_ = surface_;
    m.node_ = std::make_shared<CompositionNode>(std::move(chain), surface_);
    return m;
}

PlanarMap PlanarMap::inverse_map() const {
    if (!node_) return *this;
    PlanarMap m;
    m.surface_ = surface_;
    if (auto* inv = dynamic_cast<const InverseNode*>(node_.get()))
        m.node_ = inv->child();
    else if (auto* rot = dynamic_cast<const RotationNode*>(node_.get()))
        return rotation(surface_, -rot->amount());
    else
        m.node_ = std::make_shared<InverseNode>(node_, surface_);
    return m;
}

PlanarMap PlanarMap::iterate(long long power) const {
    if (!node_ || power == 0) return identity(surface_);
    if (power == 1) return *this;
    if (power == -1) return inverse_map();
    if (auto* rot = dynamic_cast<const RotationNode*>(node_.get()))
        return rotation_times(surface_, rot->amount(), BigInt(power));
    PlanarMap m;
    m.surface_ = surface_;
    m.node_ = std::make_shared<IterateNode>(node_, power, surface_);
    return m;
}

DDPoint PlanarMap::wrap(DDPoint p) const { return wrap_surface(p, surface_); }

DDPoint PlanarMap::forward_dd(DDPoint p) const {
    p = wrap(p);
    if (!node_) return p;
    return wrap(node_->fwd(p, Wrap::surface));
}

DDPoint PlanarMap::inverse_dd(DDPoint p) const {
    p = wrap(p);
    if (!node_) return p;
    return wrap(node_->inv(p, Wrap::surface));
}

DDPoint PlanarMap::forward_lift(DDPoint p) const {
    if (!node_) return p;
    return node_->fwd(p, Wrap::lift);
}

DDPoint PlanarMap::inverse_lift(DDPoint p) const {
    if (!node_) return p;
    return node_->inv(p, Wrap::lift);
}

SurfacePoint PlanarMap::forward(SurfacePoint p) const {
    DDPoint q = forward_dd({dd::from(p.theta), dd::from(p.r)});
    return {dd::to_double(q.theta), dd::to_double(q.r)};
}

SurfacePoint PlanarMap::inverse(SurfacePoint p) const {
    DDPoint q = inverse_dd({dd::from(p.theta), dd::from(p.r)});
    return {dd::to_double(q.theta), dd::to_double(q.r)};
}

Mat2 PlanarMap::jacobian(SurfacePoint p, double seam_eps) const {
    DDPoint q = wrap({dd::from(p.theta), dd::from(p.r)});
    if (!node_) return {};
    if (node_->seam_distance(q) < seam_eps)
        throw SeamError("jacobian queried on a declared seam");
    return node_->jac(q);
}

double PlanarMap::seam_distance(SurfacePoint p) const {
    if (!node_) return 1.0;
    return node_->seam_distance(wrap({dd::from(p.theta), dd::from(p.r)}));
}

std::string PlanarMap::describe() const { return node_ ? node_->describe() : "Id"; }

PlanarMap conjugated_rotation_power(const PlanarMap& h, const BigRational& alpha, const BigInt& m) {
    PlanarMap rot = PlanarMap::rotation_times(h.surface(), alpha, m);
    if (h.is_identity()) return rot;
    return h.inverse_map().then(rot).then(h);
}

}  // namespace akat
