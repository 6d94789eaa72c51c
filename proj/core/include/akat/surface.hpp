#pragma once

#include "akat/ddouble.hpp"

#include <stdexcept>

namespace akat {

enum class Surface { torus, annulus };

// Point on T^2 or A = T x [0,1]; theta in [0,1), r in [0,1) with wraparound
// on the torus, r in [0,1] without wraparound on the annulus.
struct SurfacePoint {
    double theta = 0, r = 0;
};

// Chain-internal point, carried in double-double so that analytic shears
// with large q keep their fractional parts.
struct DDPoint {
    DDouble theta, r;
};

// 2x2 real matrix, row-major: [[a,b],[c,d]] with rows d(theta'), d(r').
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        double dt = det();
        if (dt == 0.0) throw std::domain_error("Mat2: singular");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    double max_abs() const;
};

struct MapDefectError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Circle distance |a-b| mod 1, in [0, 1/2].
double circle_dist(double a, double b);

// Reduce x into [0,1).
double wrap_unit(double x);

}  // namespace akat
