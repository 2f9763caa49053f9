#include "peakgeom/peak_family.hpp"

#include "peakgeom/parallel.hpp"
#include "peakgeom/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace peakgeom {

namespace {

const double kPi = 3.14159265358979323846;

std::vector<double> vec_of(const RealVec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

RealVec clamp_to_ball(const RealVec& x, double radius) {
    double n = x.norm();
    if (n <= radius) return x;
    return x * (radius / n);
}

double pairing_re(const DomainModel& domain, const CplxVec& zeta, const CplxVec& z) {
    return peak_pairing_unchecked(domain, zeta, z).real();
}

// d/dx_mu of Re pairing(gamma(x), z); drop_first_order removes the
// tangential term sum_j drho_j dgamma_j/dx_mu (zero on tangential patches).
RealVec pairing_gradient(const PatchModel& patch, const DomainModel& domain, const RealVec& x,
                         const CplxVec& z, bool drop_first_order) {
    CplxVec g = patch.eval(x);
    WirtingerJet jet = domain.wirtinger_jet(to_real(g));
    CplxMat J = patch.jacobian(x);
    CplxVec diff = g - z;
    const int n = int(g.size());
    RealVec out(patch.dim_d);
    for (int mu = 0; mu < patch.dim_d; ++mu) {
        Complex s(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            Complex dj(0.0, 0.0);
            for (int k = 0; k < n; ++k)
                dj += jet.second_holo(j, k) * J(k, mu) +
                      jet.second_mixed(j, k) * std::conj(J(k, mu));
            s += dj * diff[j];
        }
        if (!drop_first_order)
            for (int j = 0; j < n; ++j) s += jet.first[j] * J(j, mu);
        out[mu] = s.real();
    }
    return out;
}

RealMat numeric_hessian(const PatchModel& patch, const DomainModel& domain, const RealVec& x,
                        const CplxVec& z) {
    const int d = patch.dim_d;
    const double h = 1e-5 * (1.0 + x.norm());
    RealMat H(d, d);
    for (int j = 0; j < d; ++j) {
        RealVec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        RealVec gp = pairing_gradient(patch, domain, xp, z, false);
        RealVec gm = pairing_gradient(patch, domain, xm, z, false);
        H.col(j) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

struct Candidate {
    RealVec x;
    double f;
};

bool better(const Candidate& a, const Candidate& b) {
    if (std::abs(a.f - b.f) > 1e-12 * (1.0 + std::abs(b.f))) return a.f < b.f;
    double na = a.x.norm(), nb = b.x.norm();
    if (std::abs(na - nb) > 1e-12) return na < nb;
    for (int i = 0; i < a.x.size(); ++i)
        if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    return false;
}

std::vector<RealVec> ball_lattice(int d, double radius, long per_axis) {
    std::vector<RealVec> pts;
    if (d == 1) {
        for (long i = 0; i <= per_axis; ++i) {
            RealVec x(1);
            x[0] = -radius + (2.0 * radius * double(i)) / double(per_axis);
            pts.push_back(x);
        }
    } else {
        for (long i = 0; i <= per_axis; ++i)
            for (long j = 0; j <= per_axis; ++j) {
                RealVec x(2);
                x[0] = -radius + (2.0 * radius * double(i)) / double(per_axis);
                x[1] = -radius + (2.0 * radius * double(j)) / double(per_axis);
                if (x.norm() <= radius) pts.push_back(x);
            }
    }
    return pts;
}

} // namespace

// -- bump ---------------------------------------------------------------------

double BumpFunction::value(double r) const {
    if (!(support_radius > 0.0)) return 0.0;
    if (r >= support_radius) return 0.0;
    if (r <= plateau_radius) return scale;
    if (plateau_radius > 0.0) {
        // smooth partition ramp on (plateau, support)
        double s = (r - plateau_radius) / (support_radius - plateau_radius);
        auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
        if (kind == Kind::Cosine) {
            double c = std::cos(0.5 * kPi * s);
            return scale * c * c;
        }
        return scale * g(1.0 - s) / (g(s) + g(1.0 - s));
    }
    double t = r / support_radius;
    if (kind == Kind::Cosine) {
        double c = std::cos(0.5 * kPi * t);
        return scale * c * c;
    }
    return scale * std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// -- constants ---------------------------------------------------------------

std::pair<double, double> positivity_constants(const PatchModel& patch, const DomainModel& domain,
                                               long pair_samples, std::uint64_t seed) {
    const int d = patch.dim_d;
    double delta = std::min(0.5, patch.radius);
    const long eig_stride = std::max<long>(1, pair_samples / 512);
    for (int attempt = 0; attempt < 48; ++attempt, delta *= 0.5) {
        Rng rng(Rng::mix(seed, 100 + attempt));
        double min_ratio = std::numeric_limits<double>::infinity();
        double min_lambda = std::numeric_limits<double>::infinity();
        long used = 0;
        for (long k = 0; k < pair_samples; ++k) {
            RealVec x = rng.in_ball(d, delta);
            RealVec y = rng.in_ball(d, delta);
            double sep2 = (x - y).squaredNorm();
            if (sep2 < 1e-24) continue;
            ++used;
            double re = pairing_re(domain, patch.eval(x), patch.eval(y));
            min_ratio = std::min(min_ratio, re / sep2);
            if (k % eig_stride == 0) {
                PullbackForm f = pullback_form(patch, domain, x);
                Eigen::SelfAdjointEigenSolver<RealMat> es(f.M);
                min_lambda = std::min(min_lambda, es.eigenvalues()[0]);
            }
        }
        double threshold = 0.25 * min_lambda;
        if (used > pair_samples / 2 && min_ratio > threshold && min_ratio > 0.0)
            return {0.9 * min_ratio, delta};
    }
    throw std::runtime_error(
        "positivity_constants: no positive radius found; patch is degenerate, re-stratify first");
}

SecondOrderEstimate second_order_estimate(const PatchModel& patch, const DomainModel& domain,
                                          long samples, std::uint64_t seed) {
    const int d = patch.dim_d;
    const double R = patch.radius;
    const double eps0 = std::min(1.0, 0.5 * R);
    const int levels = 7;

    Rng rng(Rng::mix(seed, 7));
    std::vector<std::pair<CplxVec, RealVec>> zy; // (z, minimizer y)
    long attempts = 0;
    while (long(zy.size()) < samples && attempts < 20 * samples + 40) {
        ++attempts;
        RealVec x0 = rng.in_ball(d, 0.25 * R);
        RealVec p = to_real(patch.eval(x0));
        RealVec g = domain.gradient(p);
        g /= g.norm();
        double t = rng.uniform(5e-4, 2e-2);
        RealVec pz = p - t * g;
        if (domain.eval(pz) > domain.boundary_tolerance(pz)) continue;
        CplxVec z = to_complex(pz);
        MinimizerResult mr = local_min(patch, domain, z, 0.25 * R);
        if (!mr.interior) continue;
        if ((to_real(patch.eval(mr.y)) - pz).norm() < 1e-9) continue;
        zy.emplace_back(std::move(z), mr.y);
    }

    std::vector<RealVec> dirs;
    for (int k = 0; k < 2 * d + 4; ++k) dirs.push_back(rng.unit_vector(d));

    std::vector<double> ratio_max(levels, 0.0);
    for (const auto& [z, y] : zy) {
        CplxVec gy = patch.eval(y);
        CplxVec dy = domain.wirtinger_first(to_real(gy));
        CplxVec diff = gy - z;
        double dist = diff.norm();
        for (const RealVec& v : dirs)
            for (int k = 0; k < levels; ++k) {
                double eps = eps0 / double(1 << k);
                RealVec yp = y + eps * v;
                if (yp.norm() >= R) continue;
                CplxVec dp = domain.wirtinger_first(to_real(patch.eval(yp)));
                Complex s(0.0, 0.0);
                for (int j = 0; j < diff.size(); ++j) s += (dp[j] - dy[j]) * diff[j];
                double ratio = std::abs(s.real()) / (eps * eps * dist);
                ratio_max[k] = std::max(ratio_max[k], ratio);
            }
    }

    SecondOrderEstimate est;
    est.samples_used = long(zy.size());
    for (int k = 0; k < levels; ++k)
        est.table.emplace_back(eps0 / double(1 << k), ratio_max[k]);
    double asym = std::max({ratio_max[levels - 1], ratio_max[levels - 2], 1e-9});
    est.coeff = 1.25 * asym;
    est.radius = eps0 / double(1 << (levels - 1));
    for (int k = 0; k < levels; ++k)
        if (ratio_max[k] <= 2.0 * est.coeff) {
            est.radius = eps0 / double(1 << k);
            break;
        }
    return est;
}

double working_radius(double patch_radius, double positivity_radius, double second_order_radius) {
    return std::min(std::min(0.5, 0.5 * positivity_radius),
                    std::min(second_order_radius / 3.0, patch_radius / 8.0));
}

double separation_estimate(const PatchModel& patch, const DomainModel& domain,
                           double working_radius, long samples, std::uint64_t seed) {
    const int d = patch.dim_d;
    std::vector<RealVec> lattice = ball_lattice(d, working_radius, d == 1 ? 64 : 16);
    std::vector<CplxVec> images;
    images.reserve(lattice.size());
    for (const RealVec& x : lattice) images.push_back(patch.eval(x));
    CplxVec center = patch.eval(RealVec::Zero(d));

    std::vector<RealVec> bdry = sample_boundary(domain, 4 * samples, Rng::mix(seed, 11));
    Rng rng(Rng::mix(seed, 12));
    const RealVec& w = domain.interior_witness();

    double cmin = std::numeric_limits<double>::infinity();
    long kept = 0;
    for (const RealVec& b : bdry) {
        if (kept >= samples) break;
        double s = 0.25 + 0.75 * rng.uniform();
        RealVec pz = w + s * (b - w);
        CplxVec z = to_complex(pz);
        double dist = std::numeric_limits<double>::infinity();
        for (const CplxVec& img : images) dist = std::min(dist, (img - z).norm());
        if (dist < 1e-2) continue;
        ++kept;
        for (size_t i = 0; i < images.size(); ++i) {
            double den = pairing_re(domain, images[i], center);
            if (den <= 1e-10) continue;
            double num = pairing_re(domain, images[i], z);
            cmin = std::min(cmin, num / den);
        }
    }
    if (!std::isfinite(cmin)) return 0.0;
    return std::max(cmin, 0.0);
}

// -- normalization -----------------------------------------------------------

double normalizer_closed_form(const RealMat& M) {
    const int d = int(M.rows());
    Eigen::SelfAdjointEigenSolver<RealMat> es(M);
    if (es.eigenvalues()[0] <= 0.0)
        throw std::runtime_error("normalizer: quadratic form is singular at this point");
    double det = es.eigenvalues().prod();
    return std::pow(det, -0.5) * std::pow(2.0 * kPi, 0.5 * d) * std::tgamma(0.5 * d) /
           std::tgamma(double(d));
}

namespace {
double normalizer_quadrature_of(const RealMat& M, double abs_tol) {
    const int d = int(M.rows());
    Eigen::SelfAdjointEigenSolver<RealMat> es(M);
    double lmin = es.eigenvalues()[0];
    double lmax = es.eigenvalues()[d - 1];
    if (lmin <= 0.0)
        throw std::runtime_error("normalizer: quadratic form is singular at this point");
    // truncate where the integrand falls below 1e-14
    double rcut = std::sqrt(2.0 * (std::pow(1e14, 1.0 / d) - 1.0) / lmin);
    quad::Box box;
    box.lo = RealVec::Constant(d, -rcut);
    box.hi = RealVec::Constant(d, rcut);
    quad::Options opt;
    opt.abs_tol = abs_tol;
    opt.max_cells = 60000;
    // dyadic pre-grading down to the unit core scale
    int K = std::max(1, int(std::ceil(std::log2(rcut * std::sqrt(lmax)))));
    opt.initial_cuts.assign(d, {});
    for (int a = 0; a < d; ++a) {
        opt.initial_cuts[a].push_back(0.0);
        for (int k = 1; k <= K; ++k) {
            double c = rcut / double(1L << k);
            opt.initial_cuts[a].push_back(c);
            opt.initial_cuts[a].push_back(-c);
        }
    }
    auto f = [&](const RealVec& v) {
        double q = v.dot(M * v);
        return std::pow(1.0 + 0.5 * q, -double(d));
    };
    quad::RealResult r = quad::integrate_real(f, box, opt);
    return r.value;
}
} // namespace

double normalizer(const PatchModel& patch, const DomainModel& domain, const RealVec& x,
                  NormalizerMethod method, double abs_tol) {
    PullbackForm f = pullback_form(patch, domain, x);
    if (method == NormalizerMethod::ClosedForm) return normalizer_closed_form(f.M);
    return normalizer_quadrature_of(f.M, abs_tol);
}

double dominated_bound_integral(int d, double coeff) {
    return normalizer_closed_form(RealMat::Identity(d, d) * coeff);
}

// -- family ------------------------------------------------------------------

PeakFamily make_family(const PatchModel& patch, const DomainModel& domain,
                       const FamilyOptions& opt) {
    if (!(opt.support_scale > 0.0 && opt.support_scale < 1.0))
        throw std::invalid_argument("make_family: support_scale must lie in (0,1)");
    PeakFamily fam;
    fam.patch = patch;
    fam.domain = domain;
    fam.seed = opt.seed;
    fam.quad_abs_tol = opt.quad_abs_tol;
    fam.quad_max_cells = opt.quad_max_cells;

    auto [coeff, radius] = positivity_constants(patch, domain, opt.pair_samples,
                                                Rng::mix(opt.seed, 1));
    fam.constants.positivity_coeff = coeff;
    fam.constants.positivity_radius = radius;

    SecondOrderEstimate so =
        second_order_estimate(patch, domain, opt.tube_samples, Rng::mix(opt.seed, 2));
    fam.constants.second_order_coeff = so.coeff;
    fam.constants.second_order_radius = so.radius;

    fam.constants.working_radius = working_radius(patch.radius, radius, so.radius);
    if (!(fam.constants.working_radius > 0.0))
        throw std::runtime_error("make_family: working radius collapsed to zero");

    fam.constants.separation_coeff = separation_estimate(
        patch, domain, fam.constants.working_radius, 20, Rng::mix(opt.seed, 3));

    Json details;
    details["pair_samples"] = opt.pair_samples;
    details["tube_samples_used"] = so.samples_used;
    Json table = Json::array();
    for (auto& [eps, ratio] : so.table) table.push_back({eps, ratio});
    details["second_order_table"] = table;
    details["seed"] = opt.seed;
    fam.constants.details = std::move(details);

    fam.bump.kind = opt.bump_kind;
    fam.bump.support_radius = opt.support_scale * fam.constants.working_radius;
    fam.bump.plateau_radius = 0.0;
    fam.bump.scale = 1.0;

    // normalizer table over the support plus the oracle cross-check
    const int d = patch.dim_d;
    std::vector<RealVec> pts = ball_lattice(d, fam.bump.support_radius, d == 1 ? 256 : 48);
    fam.cache.points = pts;
    fam.cache.values.reserve(pts.size());
    fam.cache.sup_f_over_g = 0.0;
    for (const RealVec& x : pts) {
        double g = normalizer(patch, domain, x, NormalizerMethod::ClosedForm);
        fam.cache.values.push_back(g);
        fam.cache.sup_f_over_g = std::max(fam.cache.sup_f_over_g, fam.bump(x) / g);
    }
    Rng vr(Rng::mix(opt.seed, 4));
    fam.cache.max_rel_diff_vs_quadrature = 0.0;
    for (int k = 0; k < 5; ++k) {
        RealVec x = k == 0 ? RealVec::Zero(d) : RealVec(vr.in_ball(d, fam.bump.support_radius));
        double cf = normalizer(patch, domain, x, NormalizerMethod::ClosedForm);
        double qd = normalizer(patch, domain, x, NormalizerMethod::Quadrature, opt.quad_abs_tol);
        fam.cache.max_rel_diff_vs_quadrature =
            std::max(fam.cache.max_rel_diff_vs_quadrature, std::abs(cf - qd) / std::abs(cf));
    }
    return fam;
}

PeakValue eval_peak(const PeakFamily& family, double delta, const CplxVec& z) {
    if (!(delta > 0.0)) throw std::invalid_argument("eval_peak: delta must be positive");
    const DomainModel& domain = family.domain;
    const PatchModel& patch = family.patch;
    RealVec zr = to_real(z);
    if (domain.eval(zr) > domain.boundary_tolerance(zr))
        throw std::invalid_argument("eval_peak: z lies outside the domain closure");

    const int d = patch.dim_d;
    const double r = family.bump.support_radius;
    quad::Box box;
    box.lo = RealVec::Constant(d, -r);
    box.hi = RealVec::Constant(d, r);

    // coarse location of the pairing minimizer, to grade cells near the peak
    std::vector<RealVec> scan = ball_lattice(d, r, d == 1 ? 256 : 32);
    RealVec xstar = RealVec::Zero(d);
    double fmin = std::numeric_limits<double>::infinity();
    for (const RealVec& x : scan) {
        double v = pairing_re(domain, patch.eval(x), z);
        if (v < fmin) {
            fmin = v;
            xstar = x;
        }
    }

    quad::Options opt;
    opt.abs_tol = family.quad_abs_tol;
    opt.max_cells = family.quad_max_cells;
    opt.initial_cuts.assign(d, {});
    const int uniform_cuts = d == 1 ? 31 : 7;
    for (int a = 0; a < d; ++a) {
        for (int i = 1; i <= uniform_cuts; ++i)
            opt.initial_cuts[a].push_back(-r + (2.0 * r * i) / (uniform_cuts + 1));
        for (double m : {1.0, 2.0, 4.0, 8.0}) {
            opt.initial_cuts[a].push_back(xstar[a] - m * delta);
            opt.initial_cuts[a].push_back(xstar[a] + m * delta);
        }
    }

    double min_den = std::numeric_limits<double>::infinity();
    const double dpow = std::pow(delta, d);
    auto integrand = [&](const RealVec& x) -> Complex {
        double fx = family.bump(x);
        if (fx == 0.0) return Complex(0.0, 0.0);
        CplxVec gx = patch.eval(x);
        Complex den = Complex(delta * delta, 0.0) + peak_pairing_unchecked(domain, gx, z);
        if (den.real() < min_den) min_den = den.real();
        PullbackForm pf = pullback_form(patch, domain, x);
        double G = normalizer_closed_form(pf.M);
        Complex denp = den;
        for (int k = 1; k < d; ++k) denp *= den;
        return (dpow * fx / G) / denp;
    };
    quad::Result res = quad::integrate(integrand, box, opt);

    PeakValue out;
    out.value = res.value;
    out.error_estimate = res.error_estimate;
    out.min_denominator_re = min_den;
    out.cells = res.cells;
    out.converged = res.converged;
    return out;
}

MinimizerResult local_min(const PatchModel& patch, const DomainModel& domain,
                          const CplxVec& z, double r) {
    if (!(r > 0.0) || !(2.0 * r < patch.radius))
        throw std::invalid_argument("local_min: need 0 < 2r < patch radius");
    RealVec zr = to_real(z);
    if (domain.eval(zr) > domain.boundary_tolerance(zr))
        throw std::invalid_argument("local_min: z lies outside the domain closure");

    const int d = patch.dim_d;
    const double ball = 2.0 * r;
    auto F = [&](const RealVec& x) { return pairing_re(domain, patch.eval(x), z); };

    std::vector<RealVec> lattice = ball_lattice(d, ball, d == 1 ? 1024 : 64);
    std::vector<Candidate> cands;
    cands.reserve(lattice.size());
    for (const RealVec& x : lattice) cands.push_back({x, F(x)});
    std::sort(cands.begin(), cands.end(), better);
    cands.resize(std::min<size_t>(cands.size(), 6));

    Candidate best = cands[0];
    for (Candidate c : cands) {
        RealVec x = c.x;
        double fx = c.f;
        double lambda = 1e-8;
        for (int iter = 0; iter < 80; ++iter) {
            RealVec g = pairing_gradient(patch, domain, x, z, false);
            if (g.norm() <= 1e-13 * (1.0 + zr.norm())) break;
            RealMat H = numeric_hessian(patch, domain, x, z);
            bool accepted = false;
            for (int trial = 0; trial < 14; ++trial) {
                RealMat A = H + lambda * RealMat::Identity(d, d);
                RealVec step = A.ldlt().solve(-g);
                if (!step.allFinite()) {
                    lambda = std::max(lambda * 8.0, 1e-8);
                    continue;
                }
                RealVec xn = clamp_to_ball(x + step, ball);
                double fn = F(xn);
                if (fn < fx) {
                    x = xn;
                    fx = fn;
                    lambda = std::max(lambda / 4.0, 1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 8.0;
            }
            if (!accepted) break;
        }
        Candidate polished{x, fx};
        if (better(polished, best)) best = polished;
    }

    MinimizerResult out;
    out.y = best.x;
    out.value = best.f;
    out.gradient_norm = pairing_gradient(patch, domain, best.x, z, false).norm();
    out.interior = best.x.norm() < ball - 1e-9 * (1.0 + ball);
    return out;
}

double critical_residual(const PatchModel& patch, const DomainModel& domain,
                         const CplxVec& z, double r) {
    MinimizerResult mr = local_min(patch, domain, z, r);
    if (!mr.interior)
        throw std::runtime_error("critical_residual: minimizer is not interior");
    RealVec g = pairing_gradient(patch, domain, mr.y, z, true);
    return g.cwiseAbs().maxCoeff();
}

std::vector<LimitProbeRow> pairing_limit_probe(const PatchModel& patch, const DomainModel& domain,
                                               const RealVec& x, const RealVec& v,
                                               const std::vector<double>& deltas) {
    if (x.norm() >= patch.radius)
        throw std::invalid_argument("pairing_limit_probe: base point outside patch ball");
    CplxVec gx = patch.eval(x);
    PullbackForm f = pullback_form(patch, domain, x);
    double target = 0.5 * v.dot(f.M * v);
    std::vector<LimitProbeRow> rows;
    for (double delta : deltas) {
        RealVec xp = x + delta * v;
        if (xp.norm() >= patch.radius)
            throw std::invalid_argument("pairing_limit_probe: step leaves the patch ball");
        double probe = pairing_re(domain, patch.eval(xp), gx) / (delta * delta);
        rows.push_back({delta, probe, target, std::abs(probe - target)});
    }
    return rows;
}

LimitAudit limit_audit(const PeakFamily& family, const std::vector<double>& deltas,
                       const std::vector<RealVec>& z_on_params,
                       const std::vector<CplxVec>& z_off,
                       const std::vector<CplxVec>& z_bulk, int threads) {
    LimitAudit audit;
    audit.deltas = deltas;
    audit.bound = family.cache.sup_f_over_g *
                  dominated_bound_integral(family.patch.dim_d, family.constants.positivity_coeff);

    struct Probe {
        std::string id;
        CplxVec z;
        double target; // |h - target| is the reported error
        bool monotone_on;
        bool monotone_off;
    };
    std::vector<Probe> probes;
    for (size_t i = 0; i < z_on_params.size(); ++i) {
        Probe p;
        p.id = "on:" + std::to_string(i);
        p.z = family.patch.eval(z_on_params[i]);
        p.target = family.bump(z_on_params[i]);
        p.monotone_on = true;
        p.monotone_off = false;
        probes.push_back(std::move(p));
    }
    for (size_t i = 0; i < z_off.size(); ++i)
        probes.push_back({"off:" + std::to_string(i), z_off[i], 0.0, false, true});
    for (size_t i = 0; i < z_bulk.size(); ++i)
        probes.push_back({"bulk:" + std::to_string(i), z_bulk[i], 0.0, false, false});

    const long nrows = long(deltas.size() * probes.size());
    std::vector<LimitAuditRow> rows(nrows);
    parallel_for(nrows, threads, [&](long k) {
        size_t di = size_t(k) / probes.size();
        size_t pi = size_t(k) % probes.size();
        PeakValue pv = eval_peak(family, deltas[di], probes[pi].z);
        LimitAuditRow row;
        row.delta = deltas[di];
        row.z_id = probes[pi].id;
        row.h = pv.value;
        row.bound = audit.bound;
        row.err_vs_target = std::abs(pv.value - Complex(probes[pi].target, 0.0));
        rows[k] = std::move(row);
    });
    audit.rows = std::move(rows);

    audit.sup_abs_h = 0.0;
    for (const auto& row : audit.rows) audit.sup_abs_h = std::max(audit.sup_abs_h, std::abs(row.h));
    audit.bound_ok = audit.sup_abs_h <= audit.bound + 1e-3;

    auto decreasing = [&](const Probe& p) {
        double prev = std::numeric_limits<double>::infinity();
        for (size_t di = 0; di < deltas.size(); ++di) {
            size_t pi = &p - probes.data();
            const LimitAuditRow& row = audit.rows[di * probes.size() + pi];
            if (!(row.err_vs_target < prev)) return false;
            prev = row.err_vs_target;
        }
        return true;
    };
    audit.onpatch_decreasing = true;
    audit.offpatch_decreasing = true;
    for (const Probe& p : probes) {
        if (p.monotone_on && !decreasing(p)) audit.onpatch_decreasing = false;
        if (p.monotone_off && !decreasing(p)) audit.offpatch_decreasing = false;
    }
    audit.pass = audit.bound_ok && audit.onpatch_decreasing && audit.offpatch_decreasing;
    return audit;
}

std::string LimitAudit::to_csv(const std::string& header_comment) const {
    std::ostringstream out;
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "delta,z_id,re_h,im_h,abs_h,bound,err_vs_target\n";
    for (const auto& row : rows)
        out << fmt_double(row.delta) << "," << row.z_id << "," << fmt_double(row.h.real()) << ","
            << fmt_double(row.h.imag()) << "," << fmt_double(std::abs(row.h)) << ","
            << fmt_double(row.bound) << "," << fmt_double(row.err_vs_target) << "\n";
    return out.str();
}

Json LimitAudit::to_json() const {
    Json j;
    j["deltas"] = deltas;
    j["bound"] = bound;
    j["sup_abs_h"] = sup_abs_h;
    j["bound_ok"] = bound_ok;
    j["onpatch_decreasing"] = onpatch_decreasing;
    j["offpatch_decreasing"] = offpatch_decreasing;
    j["pass"] = pass;
    Json rws = Json::array();
    for (const auto& row : rows) {
        Json r;
        r["delta"] = row.delta;
        r["z_id"] = row.z_id;
        r["re_h"] = row.h.real();
        r["im_h"] = row.h.imag();
        r["abs_h"] = std::abs(row.h);
        r["err_vs_target"] = row.err_vs_target;
        rws.push_back(r);
    }
    j["rows"] = rws;
    return j;
}

Json PeakConstants::to_json() const {
    Json j;
    j["positivity_coeff"] = positivity_coeff;
    j["positivity_radius"] = positivity_radius;
    j["second_order_coeff"] = second_order_coeff;
    j["second_order_radius"] = second_order_radius;
    j["working_radius"] = working_radius;
    j["separation_coeff"] = separation_coeff;
    j["details"] = details;
    return j;
}

Json NormalizerCache::to_json() const {
    Json j;
    j["points"] = points.size();
    j["sup_f_over_g"] = sup_f_over_g;
    j["max_rel_diff_vs_quadrature"] = max_rel_diff_vs_quadrature;
    if (!points.empty()) {
        Json sample = Json::array();
        size_t stride = std::max<size_t>(1, points.size() / 16);
        for (size_t i = 0; i < points.size(); i += stride) {
            Json row;
            row["x"] = vec_of(points[i]);
            row["g"] = values[i];
            sample.push_back(row);
        }
        j["table_sample"] = sample;
    }
    return j;
}

// -- nested compacts ---------------------------------------------------------

double NestedCompacts::radius(int nu) const {
    if (nu < 1) throw std::invalid_argument("nested compacts: level must be >= 1");
    return std::min(base_radius * (1.0 + 1.0 / double(nu)), working_radius);
}

BumpFunction NestedCompacts::indicator(int nu) const {
    double outer = radius(nu);
    double inner = radius(nu + 1);
    if (!(inner < outer))
        throw std::runtime_error("nested compacts: levels collapsed (support too close to the working radius)");
    BumpFunction b;
    b.kind = BumpFunction::Kind::SmoothExp;
    b.support_radius = outer;
    b.plateau_radius = inner;
    b.scale = 1.0;
    return b;
}

NestedCompacts shrinking_compacts(double working_radius, double support_radius) {
    if (!(support_radius > 0.0) || !(support_radius < working_radius))
        throw std::invalid_argument("shrinking_compacts: need 0 < support radius < working radius");
    NestedCompacts nc;
    nc.working_radius = working_radius;
    nc.base_radius = support_radius;
    return nc;
}

} // namespace peakgeom
