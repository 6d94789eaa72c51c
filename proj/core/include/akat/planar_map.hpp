#pragma once

#include "akat/rational.hpp"
#include "akat/surface.hpp"

#include <memory>
#include <string>
#include <vector>

namespace akat {

// Wrapping policy while evaluating a chain. `surface` reduces coordinates
// between stages (and checks the annulus range); `lift` evaluates the true
// lift to R^2, which finite-difference metrics need for branch-free values.
enum class Wrap { surface, lift };

// One node of a map chain. Nodes are immutable and Z^2-equivariant, so
// wrapping between stages is sound. fwd/inv receive and return unwrapped
// double-double points; composite nodes wrap their intermediate stages
// according to the mode.
class MapNode {
public:
    virtual ~MapNode() = default;
    virtual DDPoint fwd(DDPoint p, Wrap mode) const = 0;
    virtual DDPoint inv(DDPoint p, Wrap mode) const = 0;
    // Jacobian of the forward map at p (away from seams).
    virtual Mat2 jac(DDPoint p) const = 0;
    // Distance from p to the nearest declared piecewise seam of this node
    // (1 when the node is seamless).
    virtual double seam_distance(DDPoint) const { return 1.0; }
    virtual std::string describe() const = 0;
};

using MapNodePtr = std::shared_ptr<const MapNode>;

// Composable invertible map of the torus or annulus with closed-form
// forward, inverse and Jacobian evaluation.
class PlanarMap {
public:
    PlanarMap() = default;

    static PlanarMap identity(Surface s);
    static PlanarMap rotation(Surface s, BigRational t);
    // R_{m*alpha mod 1} with the multiple reduced exactly before any float
    // conversion.
    static PlanarMap rotation_times(Surface s, const BigRational& alpha, const BigInt& m);
    // (theta, r) -> (theta, r + sign * q^2 cos(2 pi q theta)).
    static PlanarMap analytic_shear(Surface s, int64_t q, int sign = +1);
    // (theta, r) -> (theta + b r, r).
    static PlanarMap twist(Surface s, int64_t b);
    static PlanarMap custom(Surface s, MapNodePtr node);

    Surface surface() const { return surface_; }
    bool is_identity() const { return !node_; }
    const MapNode* node() const { return node_.get(); }

    // Apply *this first, then next.
    PlanarMap then(const PlanarMap& next) const;
    PlanarMap inverse_map() const;
    // power may be negative; pure rotations collapse to a single rotation.
    PlanarMap iterate(long long power) const;

    SurfacePoint forward(SurfacePoint p) const;
    SurfacePoint inverse(SurfacePoint p) const;
    DDPoint forward_dd(DDPoint p) const;
    DDPoint inverse_dd(DDPoint p) const;
    // True-lift evaluation (no wrapping, no annulus range checks).
    DDPoint forward_lift(DDPoint p) const;
    DDPoint inverse_lift(DDPoint p) const;

    // Jacobian of the forward map; throws SeamError within seam_eps of a
    // declared seam of any chain node.
    Mat2 jacobian(SurfacePoint p, double seam_eps = 1e-12) const;
    double seam_distance(SurfacePoint p) const;

    std::string describe() const;

private:
    DDPoint wrap(DDPoint p) const;

    MapNodePtr node_;
    Surface surface_ = Surface::torus;
};

// H o R_{m alpha} o H^{-1}: the exact-collapse form of the m-th iterate of
// H o R_alpha o H^{-1}.
PlanarMap conjugated_rotation_power(const PlanarMap& h, const BigRational& alpha, const BigInt& m);

// Tolerance for annulus chains: r may exceed [0,1] by at most this much
// before evaluation reports a broken measure-preserving chain.
inline constexpr double kAnnulusEscapeTol = 1e-6;

}  // namespace akat
