#pragma once

#include "peakgeom/defining_function.hpp"
#include "peakgeom/report.hpp"
#include "peakgeom/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace peakgeom {

// First and second complex derivatives of the defining function at a point:
//   first[j]        = d rho / d z_j
//   second_holo     = d^2 rho / (d z_j d z_k)      (symmetric)
//   second_mixed    = d^2 rho / (d z_j d conj z_k) (Hermitian)
// assembled from the exact real partials via d/dz_j = (d/dx_j - i d/dy_j)/2.
struct WirtingerJet {
    CplxVec first;
    CplxMat second_holo;
    CplxMat second_mixed;
};

// Tangent-space data of the boundary at a point: gradient, real Hessian,
// an orthonormal tangent basis, and the Hessian restricted to it.
struct BoundaryFrame {
    RealVec point;
    RealVec gradient;
    RealMat hessian;
    RealMat tangent_basis;   // (2n) x (2n-1), columns orthonormal, _|_ gradient
    RealMat restricted_form; // (2n-1) x (2n-1) symmetric
};

struct NullSpace {
    int dimension = 0;
    RealMat basis;       // tangent-space vectors (ambient coords), one column per null direction
    RealVec eigenvalues; // spectrum of the restricted form, ascending
    double tol = 0.0;
};

struct ConvexityAudit {
    long samples_requested = 0;
    long samples_used = 0;
    long rays_skipped = 0;
    double min_restricted_eigenvalue = 0.0;
    RealVec eigenvalue_witness;
    double min_gradient_norm = 0.0;
    long pairs_used = 0;
    double max_midpoint_value = 0.0; // largest rho((a+b)/2) over boundary pairs
    RealVec midpoint_witness_a, midpoint_witness_b;
    double eigenvalue_tol = 1e-9;
    bool curvature_ok = false;
    bool gradient_ok = false;
    bool midpoint_ok = false;
    bool pass = false;
    Json to_json() const;
};

// Convex domain {rho < 0} given by a real polynomial defining function.
class DomainModel {
public:
    DomainModel() = default;
    DomainModel(std::string name, DefiningFunction rho, RealVec interior_witness,
                double bounding_radius);

    const std::string& name() const { return name_; }
    int ambient_n() const { return rho_.vars() / 2; }
    int real_dim() const { return rho_.vars(); }
    double bounding_radius() const { return bounding_radius_; }
    const RealVec& interior_witness() const { return interior_witness_; }
    const DefiningFunction& rho() const { return rho_; }

    double eval(const RealVec& p) const { return rho_.eval(p); }
    double eval_complex(const CplxVec& z) const { return rho_.eval(to_real(z)); }
    RealVec gradient(const RealVec& p) const;
    RealMat hessian(const RealVec& p) const;

    // scale-aware boundary membership: |rho(p)| <= 1e-9 (1 + |p|^deg)
    double boundary_tolerance(const RealVec& p) const;
    bool on_boundary(const RealVec& p) const;

    CplxVec wirtinger_first(const RealVec& p) const;
    WirtingerJet wirtinger_jet(const RealVec& p) const;

    Json to_json() const;
    static DomainModel from_json(const nlohmann::json& j);

private:
    std::string name_;
    DefiningFunction rho_;
    std::vector<DefiningFunction> grad_;          // 2n first partials
    std::vector<DefiningFunction> hess_;          // packed upper triangle, row-major
    RealVec interior_witness_;
    double bounding_radius_ = 0.0;
};

BoundaryFrame boundary_frame(const DomainModel& domain, const RealVec& p);

double default_null_tolerance(const BoundaryFrame& frame); // 1e-8 * lambda_max
NullSpace null_space(const BoundaryFrame& frame, double tol);

// pairing(zeta, z) = sum_j d rho/d zeta_j (zeta_j - z_j); zeta must lie on
// the boundary. Re >= 0 on the closure of a convex domain, zero iff z = zeta.
Complex peak_pairing(const DomainModel& domain, const CplxVec& zeta, const CplxVec& z);
Complex peak_pairing_unchecked(const DomainModel& domain, const CplxVec& zeta, const CplxVec& z);

// Deterministic boundary sampler: seeded directions, ray-shoot from the
// interior witness, bisection to |rho| <= 1e-12. Rays that never exit
// (possible only on non-convex control surfaces) are skipped.
std::vector<RealVec> sample_boundary(const DomainModel& domain, long count,
                                     std::uint64_t seed, long* rays_skipped = nullptr);

ConvexityAudit convexity_audit(const DomainModel& domain, long sample_count,
                               std::uint64_t seed, int threads = 1);

} // namespace peakgeom
