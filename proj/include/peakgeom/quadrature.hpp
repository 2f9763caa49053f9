#pragma once

#include "peakgeom/types.hpp"

#include <functional>
#include <vector>

namespace peakgeom::quad {

struct Box {
    RealVec lo;
    RealVec hi;
    int dim() const { return int(lo.size()); }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim(); ++a) v *= hi[a] - lo[a];
        return v;
    }
};

struct Options {
    double abs_tol = 1e-8;
    int max_cells = 20000;
    // interior cut coordinates per axis; the box is pre-partitioned along
    // these before adaptive refinement starts
    std::vector<std::vector<double>> initial_cuts;
};

struct Result {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    long cells = 0;
    long evaluations = 0;
    bool converged = false;
};

using Integrand = std::function<Complex(const RealVec&)>;

// Tensor Gauss(7)/Kronrod(15) rule per cell; the G7/K15 difference drives
// dyadic subdivision of the worst cell (split along its widest axis) until
// the summed estimate drops below abs_tol or the cell budget runs out.
// Cell processing order and the final compensated sum are deterministic.
Result integrate(const Integrand& f, const Box& box, const Options& opt = {});

struct RealResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long cells = 0;
    bool converged = false;
};

RealResult integrate_real(const std::function<double(const RealVec&)>& f,
                          const Box& box, const Options& opt = {});

} // namespace peakgeom::quad
