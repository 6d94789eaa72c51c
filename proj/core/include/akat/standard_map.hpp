#pragma once

#include "akat/surface.hpp"

#include <memory>
#include <vector>

namespace akat {

struct Vec2 {
    double x = 0, y = 0;
};

struct MoserSettings {
    int steps = 256;        // RK4 steps of the corrector flow
    int grid = 0;           // displacement/field grid per axis; 0 = auto from epsilon
    double tolerance = 1e-3;
    int quality_grid = 96;  // construction-time FD det verification grid
};

struct DegenerateDeformationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorrectorQualityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The measure-preserving square map phi(eps) on Delta = [-1,1]^2: identity
// outside Delta(eps) (exact, all three factors), the rotation
// (x,y) -> (y,-x) on Delta(2 eps), glued by a scaler psi, a radial rotator
// eta and a volume corrector nu obtained by integrating the deformation
// field of the density family Omega_t.
class StandardSquareMap {
public:
    explicit StandardSquareMap(double epsilon, const MoserSettings& settings = {});

    double epsilon() const { return eps_; }
    const MoserSettings& settings() const { return set_; }
    int gauge_power() const { return p_; }
    // 0: phi = phi_tilde o nu (corrector first); 1: phi = nu o phi_tilde.
    int composition_order() const { return order_; }
    double det_quality() const { return det_quality_; }
    double corrector_grid_error() const { return corrector_err_; }

    Vec2 forward(Vec2 v) const;
    Vec2 inverse(Vec2 v) const;
    Mat2 jacobian(Vec2 v) const;

    bool in_outer_identity(Vec2 v) const;  // outside Delta(eps)
    bool in_rotation_core(Vec2 v) const;   // inside Delta(2 eps)
    bool in_transition(Vec2 v) const;
    // distance to the declared piece boundaries (Delta(eps), Delta(2 eps),
    // the rotator circles)
    double seam_distance(Vec2 v) const;

    Vec2 scaler_forward(Vec2 v) const;
    Vec2 scaler_inverse(Vec2 v) const;
    Vec2 rotator_forward(Vec2 v) const;
    Vec2 rotator_inverse(Vec2 v) const;
    Vec2 tilde_forward(Vec2 v) const;
    Vec2 tilde_inverse(Vec2 v) const;
    Mat2 tilde_jacobian(Vec2 v) const;

    Vec2 corrector_forward(Vec2 v) const;   // nu via the displacement grid
    Vec2 corrector_inverse(Vec2 v) const;
    Mat2 corrector_jacobian(Vec2 v) const;
    Mat2 corrector_inverse_jacobian(Vec2 v) const;
    // direct RK4 flow of the deformation field (cross-check path)
    Vec2 corrector_direct(Vec2 v, int steps, bool backward) const;

private:
    struct Grid;
    void build_field_grid();
    void build_displacement_grids();
    void select_order_and_verify();
    Vec2 scaler_inverse_with_state(Vec2 v, double& warm) const;
    Vec2 flow_field(double t, Vec2 v) const;  // X_t from the field grid

    double eps_;
    MoserSettings set_;
    int p_ = 4;                 // gauge power
    double gauge_a_, gauge_b_;  // profile ramp interval in gauge units
    double rot_r0_, rot_r1_;    // rotator ramp radii
    int order_ = 0;
    double det_quality_ = 0;
    double corrector_err_ = 0;
    std::shared_ptr<Grid> grid_;
};

// Process-wide construction cache (standard maps depend only on epsilon
// and the Moser settings).
std::shared_ptr<const StandardSquareMap> standard_map_cached(double epsilon,
                                                             const MoserSettings& settings = {});

}  // namespace akat
