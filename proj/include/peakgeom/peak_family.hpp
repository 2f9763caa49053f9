#pragma once

#include "peakgeom/domain.hpp"
#include "peakgeom/patch.hpp"
#include "peakgeom/quadrature.hpp"
#include "peakgeom/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace peakgeom {

// Constants controlling where the peak-integral family is valid:
//   positivity_coeff / positivity_radius : Re pairing >= C |x-y|^2 on the ball
//   second_order_coeff / second_order_radius : quadratic bound on the pairing
//       increment at interior minimizers
//   working_radius : min{1/2, positivity_radius/2, second_order_radius/3, R/8}
//   separation_coeff : off-patch lower bound ratio for the pairing
struct PeakConstants {
    double positivity_coeff = 0.0;
    double positivity_radius = 0.0;
    double second_order_coeff = 0.0;
    double second_order_radius = 0.0;
    double working_radius = 0.0;
    double separation_coeff = 0.0;
    Json details;
    Json to_json() const;
};

// Compactly supported profile with values in [0, scale]; optionally equal to
// scale on a plateau. Radial in the parameter variable.
struct BumpFunction {
    enum class Kind { SmoothExp, Cosine };
    Kind kind = Kind::SmoothExp;
    double support_radius = 0.0;
    double plateau_radius = 0.0;
    double scale = 1.0;

    double value(double r) const;
    double operator()(const RealVec& x) const { return value(x.norm()); }
};

struct MinimizerResult {
    RealVec y;
    double value = 0.0;
    bool interior = false;
    double gradient_norm = 0.0;
};

struct SecondOrderEstimate {
    double coeff = 0.0;
    double radius = 0.0;
    std::vector<std::pair<double, double>> table; // (probe radius, max ratio)
    long samples_used = 0;
};

struct NormalizerCache {
    std::vector<RealVec> points;
    std::vector<double> values;
    double sup_f_over_g = 0.0;
    double max_rel_diff_vs_quadrature = 0.0;
    Json to_json() const;
};

struct FamilyOptions {
    BumpFunction::Kind bump_kind = BumpFunction::Kind::SmoothExp;
    double support_scale = 0.8; // support radius = support_scale * working radius
    long pair_samples = 10000;
    long tube_samples = 20;
    std::uint64_t seed = 20240809;
    double quad_abs_tol = 1e-8;
    int quad_max_cells = 20000;
    int threads = 1;
};

struct PeakFamily {
    PatchModel patch;
    DomainModel domain;
    PeakConstants constants;
    BumpFunction bump;
    NormalizerCache cache;
    double quad_abs_tol = 1e-8;
    int quad_max_cells = 20000;
    std::uint64_t seed = 0;
};

// -- constants ---------------------------------------------------------------

// Halving search from min{1/2, R}: accepts the first radius where the
// sampled minimum of Re pairing / |x-y|^2 clears a quarter of the smallest
// eigenvalue of M seen on the ball; the coefficient keeps a 10% margin
// below the sampled minimum. Throws if no radius works (degenerate patch).
std::pair<double, double> positivity_constants(const PatchModel& patch, const DomainModel& domain,
                                               long pair_samples, std::uint64_t seed);

// Samples the pairing increment at interior minimizers for points near the
// patch and fits the quadratic-in-displacement bound; returns the constant
// and the largest probe radius where the bound stays within budget.
SecondOrderEstimate second_order_estimate(const PatchModel& patch, const DomainModel& domain,
                                          long samples, std::uint64_t seed);

double working_radius(double patch_radius, double positivity_radius, double second_order_radius);

double separation_estimate(const PatchModel& patch, const DomainModel& domain,
                           double working_radius, long samples, std::uint64_t seed);

// -- normalization -----------------------------------------------------------

// integral over R^d of (1 + (1/2) v^T M v)^{-d} dv
//   = det(M)^{-1/2} (2 pi)^{d/2} Gamma(d/2) / Gamma(d)
double normalizer_closed_form(const RealMat& M);

enum class NormalizerMethod { ClosedForm, Quadrature };

// Same integral from the pullback form at x; the quadrature route truncates
// where the integrand drops below 1e-14 and integrates adaptively.
double normalizer(const PatchModel& patch, const DomainModel& domain, const RealVec& x,
                  NormalizerMethod method, double abs_tol = 1e-8);

// bound integral with M = coeff * identity
double dominated_bound_integral(int d, double coeff);

// -- family ------------------------------------------------------------------

PeakFamily make_family(const PatchModel& patch, const DomainModel& domain,
                       const FamilyOptions& opt = {});

struct PeakValue {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    double min_denominator_re = 0.0;
    long cells = 0;
    bool converged = false;
};

// h_delta(z) = int delta^d f(x)/G(x) / {delta^2 + pairing(gamma(x), z)}^d dx
// over the bump support; z must lie in the domain closure.
PeakValue eval_peak(const PeakFamily& family, double delta, const CplxVec& z);

// Multi-start minimization of x -> Re pairing(gamma(x), z) over the closed
// ball |x| <= 2r. Ties break to the smallest parameter norm, then
// lexicographically. Boundary minimizers are legal and flagged.
MinimizerResult local_min(const PatchModel& patch, const DomainModel& domain,
                          const CplxVec& z, double r);

// Tangential first-order term of the pairing at the minimizer; equals the
// gradient norm there for complex-tangential patches. Throws when the
// minimizer is not interior.
double critical_residual(const PatchModel& patch, const DomainModel& domain,
                         const CplxVec& z, double r);

struct LimitProbeRow {
    double delta = 0.0;
    double probe = 0.0;  // Re pairing(gamma(x+delta v), gamma(x)) / delta^2
    double target = 0.0; // (1/2) <v|M(x)|v>
    double error = 0.0;
};

std::vector<LimitProbeRow> pairing_limit_probe(const PatchModel& patch, const DomainModel& domain,
                                               const RealVec& x, const RealVec& v,
                                               const std::vector<double>& deltas);

struct LimitAuditRow {
    double delta = 0.0;
    std::string z_id;
    Complex h{0.0, 0.0};
    double bound = 0.0;
    double err_vs_target = 0.0;
};

struct LimitAudit {
    std::vector<double> deltas;
    std::vector<LimitAuditRow> rows;
    double bound = 0.0;
    double sup_abs_h = 0.0;
    bool bound_ok = false;
    bool onpatch_decreasing = false;
    bool offpatch_decreasing = false;
    bool pass = false;
    std::string to_csv(const std::string& header_comment) const;
    Json to_json() const;
};

// Evaluates the family on patch points (error vs the bump), off-patch
// points, and bulk closure points; checks the uniform dominating bound and
// that both error sequences shrink along the given delta order.
LimitAudit limit_audit(const PeakFamily& family, const std::vector<double>& deltas,
                       const std::vector<RealVec>& z_on_params,
                       const std::vector<CplxVec>& z_off,
                       const std::vector<CplxVec>& z_bulk, int threads = 1);

// -- nested compacts ---------------------------------------------------------

struct NestedCompacts {
    double working_radius = 0.0;
    double base_radius = 0.0;
    // radius of level nu: base * (1 + 1/nu), clipped to the working radius
    double radius(int nu) const;
    // plateau bump equal to 1 on level nu+1, supported in level nu
    BumpFunction indicator(int nu) const;
};

NestedCompacts shrinking_compacts(double working_radius, double support_radius);

} // namespace peakgeom
