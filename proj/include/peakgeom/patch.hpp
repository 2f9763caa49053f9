#pragma once

#include "peakgeom/domain.hpp"
#include "peakgeom/grid.hpp"
#include "peakgeom/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace peakgeom {

// Parametrized boundary piece gamma : B_d(0;R) -> boundary, supplied as
// evaluators for the map and its first two parameter derivatives.
struct PatchModel {
    int dim_d = 1;
    double radius = 0.0;
    std::string name;
    std::function<CplxVec(const RealVec&)> eval;                  // n
    std::function<CplxMat(const RealVec&)> jacobian;              // n x d
    std::function<std::vector<CplxMat>(const RealVec&)> second;   // n entries of d x d

    bool contains(const RealVec& x) const { return x.norm() < radius; }
};

// complex n x d Jacobian -> real (2n) x d, rows ordered (x1,y1,...,xn,yn)
RealMat real_jacobian(const CplxMat& J);

// H(x) = dgamma(x)^T Hess(rho)(gamma(x)) dgamma(x) and its half M = H/2.
struct PullbackForm {
    RealMat H;
    RealMat M;
    RealVec at;
};

PullbackForm pullback_form(const PatchModel& patch, const DomainModel& domain, const RealVec& x);

// det H(x); same arithmetic path as pullback_form
double pullback_det(const PatchModel& patch, const DomainModel& domain, const RealVec& x);

struct PatchAudit {
    long nodes = 0;
    double max_boundary_residual = 0.0;
    RealVec boundary_witness;
    double min_jacobian_sv = 0.0;
    double max_jacobian_sv = 0.0;
    RealVec immersion_witness;
    double max_tangency_residual = 0.0;
    RealVec tangency_witness;
    bool boundary_ok = false;
    bool immersion_ok = false;
    bool tangency_ok = false;
    bool pass = false;
    double tangency_tol = 1e-9;
    Json to_json() const;
};

// Checks boundary membership, immersion (singular values of the real
// Jacobian), and complex tangency sum_j d rho/d z_j dgamma_j/dx_mu = 0
// over the lattice nodes of the grid.
PatchAudit patch_audit(const PatchModel& patch, const DomainModel& domain, const Grid& grid,
                       double tangency_tol = 1e-9);

struct NondegeneracyMap {
    Grid grid;
    double tol = 0.0;
    std::vector<RealVec> points;
    std::vector<double> min_eigenvalues;
    std::vector<bool> nondegenerate;
    double min_over_grid = 0.0;
    RealVec argmin;
    long degenerate_count = 0;
    Json to_json() const;
};

// Flags lattice nodes where the pullback form loses rank: lambda_min(H) <= tol.
NondegeneracyMap nondegeneracy_map(const PatchModel& patch, const DomainModel& domain,
                                   const Grid& grid, double tol);

} // namespace peakgeom
