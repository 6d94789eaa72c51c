#pragma once

#include "akat/surface.hpp"

#include <string>
#include <vector>

namespace akat {

// Horizontal interval [lo, hi] x {r}; the decomposition stores the theta
// intervals once and replicates them over a finite r-grid.
struct ThetaAtom {
    double lo = 0, hi = 0;
    long id = 0;       // stable id within the stage
    int branch = 0;    // analytic: monotone branch index; smooth: j
    int kind = 0;      // smooth: 0 = I_{n,j} (in D^1), 1 = Ibar_{n,j} (in D^2)
    double length() const { return hi - lo; }
};

struct PartialDecomposition {
    Surface surface = Surface::torus;
    std::vector<ThetaAtom> atoms;
    std::vector<double> heights;
    long dropped_atoms = 0;     // below float resolution, logged
    long skipped_branches = 0;  // branch shorter than one unit of image

    double theta_measure() const {
        double s = 0;
        for (const auto& a : atoms) s += a.length();
        return s;
    }
    size_t total_atoms() const { return atoms.size() * heights.size(); }
    double max_length() const {
        double m = 0;
        for (const auto& a : atoms) m = std::max(m, a.length());
        return m;
    }
};

}  // namespace akat
