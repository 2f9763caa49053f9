#include "peakgeom/patch.hpp"

#include <cmath>
#include <stdexcept>

namespace peakgeom {

RealMat real_jacobian(const CplxMat& J) {
    RealMat R(2 * J.rows(), J.cols());
    for (int j = 0; j < J.rows(); ++j)
        for (int m = 0; m < J.cols(); ++m) {
            R(2 * j, m) = J(j, m).real();
            R(2 * j + 1, m) = J(j, m).imag();
        }
    return R;
}

PullbackForm pullback_form(const PatchModel& patch, const DomainModel& domain, const RealVec& x) {
    if (int(x.size()) != patch.dim_d)
        throw std::invalid_argument("pullback_form: parameter dimension mismatch");
    CplxVec g = patch.eval(x);
    RealVec p = to_real(g);
    if (!domain.on_boundary(p))
        throw std::invalid_argument("pullback_form: patch point violates boundary tolerance");
    RealMat J = real_jacobian(patch.jacobian(x));
    PullbackForm f;
    f.at = x;
    f.H = J.transpose() * domain.hessian(p) * J;
    f.M = 0.5 * f.H;
    return f;
}

double pullback_det(const PatchModel& patch, const DomainModel& domain, const RealVec& x) {
    return pullback_form(patch, domain, x).H.determinant();
}

PatchAudit patch_audit(const PatchModel& patch, const DomainModel& domain, const Grid& grid,
                       double tangency_tol) {
    grid.validate();
    if (grid.dim() != patch.dim_d)
        throw std::invalid_argument("patch_audit: grid dimension does not match patch");
    PatchAudit a;
    a.tangency_tol = tangency_tol;
    a.max_boundary_residual = 0.0;
    a.min_jacobian_sv = std::numeric_limits<double>::infinity();
    a.max_jacobian_sv = 0.0;
    a.max_tangency_residual = 0.0;

    for (const RealVec& x : grid.nodes()) {
        ++a.nodes;
        CplxVec g = patch.eval(x);
        RealVec p = to_real(g);
        double resid = std::abs(domain.eval(p));
        if (resid > a.max_boundary_residual) {
            a.max_boundary_residual = resid;
            a.boundary_witness = x;
        }
        RealMat J = real_jacobian(patch.jacobian(x));
        Eigen::JacobiSVD<RealMat> svd(J);
        double smin = svd.singularValues().minCoeff();
        double smax = svd.singularValues().maxCoeff();
        a.max_jacobian_sv = std::max(a.max_jacobian_sv, smax);
        if (smin < a.min_jacobian_sv) {
            a.min_jacobian_sv = smin;
            a.immersion_witness = x;
        }
        CplxVec d = domain.wirtinger_first(p);
        CplxMat Jc = patch.jacobian(x);
        for (int mu = 0; mu < patch.dim_d; ++mu) {
            Complex s(0.0, 0.0);
            for (int j = 0; j < d.size(); ++j) s += d[j] * Jc(j, mu);
            double r = std::abs(s);
            if (r > a.max_tangency_residual) {
                a.max_tangency_residual = r;
                a.tangency_witness = x;
            }
        }
    }

    // boundary tolerance is scale-aware; take the loosest over witnesses
    double btol = domain.boundary_tolerance(to_real(patch.eval(a.boundary_witness)));
    a.boundary_ok = a.max_boundary_residual <= btol;
    a.immersion_ok = a.min_jacobian_sv > 1e-8 * a.max_jacobian_sv;
    a.tangency_ok = a.max_tangency_residual <= tangency_tol;
    a.pass = a.boundary_ok && a.immersion_ok && a.tangency_ok;
    return a;
}

NondegeneracyMap nondegeneracy_map(const PatchModel& patch, const DomainModel& domain,
                                   const Grid& grid, double tol) {
    grid.validate();
    NondegeneracyMap m;
    m.grid = grid;
    m.tol = tol;
    m.min_over_grid = std::numeric_limits<double>::infinity();
    for (const RealVec& x : grid.nodes()) {
        PullbackForm f = pullback_form(patch, domain, x);
        Eigen::SelfAdjointEigenSolver<RealMat> es(f.H);
        double lmin = es.eigenvalues()[0];
        m.points.push_back(x);
        m.min_eigenvalues.push_back(lmin);
        bool good = lmin > tol;
        m.nondegenerate.push_back(good);
        if (!good) ++m.degenerate_count;
        if (lmin < m.min_over_grid) {
            m.min_over_grid = lmin;
            m.argmin = x;
        }
    }
    return m;
}

namespace {
std::vector<double> vec_of(const RealVec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}
} // namespace

Json PatchAudit::to_json() const {
    Json j;
    j["pass"] = pass;
    j["nodes"] = nodes;
    j["boundary_ok"] = boundary_ok;
    j["max_boundary_residual"] = max_boundary_residual;
    j["boundary_witness"] = boundary_witness.size() ? vec_of(boundary_witness) : std::vector<double>{};
    j["immersion_ok"] = immersion_ok;
    j["min_jacobian_singular_value"] = min_jacobian_sv;
    j["max_jacobian_singular_value"] = max_jacobian_sv;
    j["immersion_witness"] = immersion_witness.size() ? vec_of(immersion_witness) : std::vector<double>{};
    j["tangency_ok"] = tangency_ok;
    j["max_tangency_residual"] = max_tangency_residual;
    j["tangency_tol"] = tangency_tol;
    j["tangency_witness"] = tangency_witness.size() ? vec_of(tangency_witness) : std::vector<double>{};
    return j;
}

Json NondegeneracyMap::to_json() const {
    Json j;
    j["grid"] = grid.to_json();
    j["tol"] = tol;
    j["min_over_grid"] = min_over_grid;
    j["argmin"] = argmin.size() ? vec_of(argmin) : std::vector<double>{};
    j["degenerate_count"] = degenerate_count;
    Json rows = Json::array();
    for (size_t i = 0; i < points.size(); ++i) {
        Json row;
        row["x"] = vec_of(points[i]);
        row["min_eigenvalue"] = min_eigenvalues[i];
        row["nondegenerate"] = bool(nondegenerate[i]);
        rows.push_back(row);
    }
    j["samples"] = rows;
    return j;
}

} // namespace peakgeom
