#include "peakgeom/domain.hpp"

#include "peakgeom/parallel.hpp"
#include "peakgeom/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace peakgeom {

namespace {
int packed_index(int i, int j, int n) {
    // upper triangle (i <= j), row-major
    if (i > j) std::swap(i, j);
    return i * n - (i * (i - 1)) / 2 + (j - i);
}
} // namespace

DomainModel::DomainModel(std::string name, DefiningFunction rho, RealVec interior_witness,
                         double bounding_radius)
    : name_(std::move(name)),
      rho_(std::move(rho)),
      interior_witness_(std::move(interior_witness)),
      bounding_radius_(bounding_radius) {
    const int n = rho_.vars();
    if (int(interior_witness_.size()) != n)
        throw std::invalid_argument("interior witness dimension does not match defining function");
    if (rho_.eval(interior_witness_) >= 0.0)
        throw std::invalid_argument("interior witness is not inside the domain (rho >= 0 there)");
    if (!(bounding_radius_ > 0.0))
        throw std::invalid_argument("bounding radius must be positive");
    grad_.reserve(n);
    for (int i = 0; i < n; ++i) grad_.push_back(rho_.partial(i));
    hess_.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) hess_.push_back(grad_[i].partial(j));
}

RealVec DomainModel::gradient(const RealVec& p) const {
    const int n = real_dim();
    RealVec g(n);
    for (int i = 0; i < n; ++i) g[i] = grad_[i].eval(p);
    return g;
}

RealMat DomainModel::hessian(const RealVec& p) const {
    const int n = real_dim();
    RealMat h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = hess_[packed_index(i, j, n)].eval(p);
            h(i, j) = v;
            h(j, i) = v;
        }
    return h;
}

double DomainModel::boundary_tolerance(const RealVec& p) const {
    return 1e-9 * (1.0 + std::pow(p.norm(), double(rho_.total_degree())));
}

bool DomainModel::on_boundary(const RealVec& p) const {
    return std::abs(eval(p)) <= boundary_tolerance(p);
}

CplxVec DomainModel::wirtinger_first(const RealVec& p) const {
    const int n = ambient_n();
    CplxVec w(n);
    for (int j = 0; j < n; ++j) {
        double gx = grad_[2 * j].eval(p);
        double gy = grad_[2 * j + 1].eval(p);
        w[j] = 0.5 * Complex(gx, -gy);
    }
    return w;
}

WirtingerJet DomainModel::wirtinger_jet(const RealVec& p) const {
    const int n = ambient_n();
    const int N = real_dim();
    WirtingerJet jet;
    jet.first = wirtinger_first(p);
    jet.second_holo = CplxMat(n, n);
    jet.second_mixed = CplxMat(n, n);
    RealMat h(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            double v = hess_[packed_index(i, j, N)].eval(p);
            h(i, j) = v;
            h(j, i) = v;
        }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double xx = h(2 * j, 2 * k), yy = h(2 * j + 1, 2 * k + 1);
            double xy = h(2 * j, 2 * k + 1), yx = h(2 * j + 1, 2 * k);
            jet.second_holo(j, k) = 0.25 * Complex(xx - yy, -(xy + yx));
            jet.second_mixed(j, k) = 0.25 * Complex(xx + yy, xy - yx);
        }
    return jet;
}

Json DomainModel::to_json() const {
    Json j;
    j["name"] = name_;
    j["ambient_n"] = ambient_n();
    j["monomials"] = rho_.to_json();
    j["interior_witness"] =
        std::vector<double>(interior_witness_.data(), interior_witness_.data() + interior_witness_.size());
    j["bounding_radius"] = bounding_radius_;
    return j;
}

DomainModel DomainModel::from_json(const nlohmann::json& j) {
    int n = j.at("ambient_n").get<int>();
    if (n < 2) throw std::invalid_argument("ambient_n must be >= 2");
    DefiningFunction rho = DefiningFunction::from_json(j.at("monomials"), 2 * n);
    auto w = j.at("interior_witness").get<std::vector<double>>();
    RealVec witness = Eigen::Map<const RealVec>(w.data(), w.size());
    return DomainModel(j.at("name").get<std::string>(), std::move(rho), std::move(witness),
                       j.at("bounding_radius").get<double>());
}

BoundaryFrame boundary_frame(const DomainModel& domain, const RealVec& p) {
    if (int(p.size()) != domain.real_dim())
        throw std::invalid_argument("boundary_frame: point dimension mismatch");
    if (!domain.on_boundary(p))
        throw std::invalid_argument("boundary_frame: point is not on the boundary");
    BoundaryFrame f;
    f.point = p;
    f.gradient = domain.gradient(p);
    double gnorm = f.gradient.norm();
    if (gnorm < 1e-12)
        throw std::invalid_argument("boundary_frame: gradient vanishes at the point");
    f.hessian = domain.hessian(p);

    // Householder reflection taking e_k to the unit normal; the remaining
    // columns give an orthonormal tangent basis. With an axis-aligned normal
    // the basis reduces to the other coordinate axes.
    const int N = domain.real_dim();
    RealVec nu = f.gradient / gnorm;
    int k = 0;
    for (int i = 1; i < N; ++i)
        if (std::abs(nu[i]) > std::abs(nu[k])) k = i;
    double s = nu[k] >= 0.0 ? 1.0 : -1.0;
    RealVec w = nu;
    w[k] += s;
    RealMat H = RealMat::Identity(N, N) - (2.0 / w.squaredNorm()) * (w * w.transpose());
    // column k of H is -s*nu; the rest span the tangent space
    f.tangent_basis = RealMat(N, N - 1);
    int c = 0;
    for (int i = 0; i < N; ++i) {
        if (i == k) continue;
        f.tangent_basis.col(c++) = H.col(i);
    }
    f.restricted_form = f.tangent_basis.transpose() * f.hessian * f.tangent_basis;
    return f;
}

double default_null_tolerance(const BoundaryFrame& frame) {
    Eigen::SelfAdjointEigenSolver<RealMat> es(frame.restricted_form);
    double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    return 1e-8 * std::max(lmax, 1e-300);
}

NullSpace null_space(const BoundaryFrame& frame, double tol) {
    Eigen::SelfAdjointEigenSolver<RealMat> es(frame.restricted_form);
    const RealVec& ev = es.eigenvalues(); // ascending
    if (ev[0] < -tol)
        throw std::runtime_error(
            "null_space: restricted form has a negative eigenvalue (convexity audit should fail)");
    NullSpace ns;
    ns.eigenvalues = ev;
    ns.tol = tol;
    int dim = 0;
    while (dim < ev.size() && ev[dim] < tol) ++dim;
    ns.dimension = dim;
    ns.basis = RealMat(frame.tangent_basis.rows(), dim);
    for (int i = 0; i < dim; ++i)
        ns.basis.col(i) = frame.tangent_basis * es.eigenvectors().col(i);
    return ns;
}

Complex peak_pairing_unchecked(const DomainModel& domain, const CplxVec& zeta, const CplxVec& z) {
    CplxVec d = domain.wirtinger_first(to_real(zeta));
    Complex sum(0.0, 0.0);
    for (int j = 0; j < d.size(); ++j) sum += d[j] * (zeta[j] - z[j]);
    return sum;
}

Complex peak_pairing(const DomainModel& domain, const CplxVec& zeta, const CplxVec& z) {
    if (zeta.size() != domain.ambient_n() || z.size() != domain.ambient_n())
        throw std::invalid_argument("peak_pairing: point dimension mismatch");
    if (!domain.on_boundary(to_real(zeta)))
        throw std::invalid_argument("peak_pairing: zeta is not on the boundary");
    return peak_pairing_unchecked(domain, zeta, z);
}

std::vector<RealVec> sample_boundary(const DomainModel& domain, long count,
                                     std::uint64_t seed, long* rays_skipped) {
    const int N = domain.real_dim();
    const RealVec& w = domain.interior_witness();
    Rng rng(seed);
    std::vector<RealVec> pts;
    pts.reserve(count);
    long skipped = 0;
    long attempts = 0;
    const long max_attempts = 16 * count + 64;
    while (long(pts.size()) < count && attempts < max_attempts) {
        ++attempts;
        RealVec dir = rng.unit_vector(N);
        // bracket the crossing: rho(w) < 0, march until rho > 0
        double t_hi = domain.bounding_radius();
        bool bracketed = false;
        for (int k = 0; k < 8; ++k) {
            if (domain.eval(w + t_hi * dir) > 0.0) {
                bracketed = true;
                break;
            }
            t_hi *= 2.0;
        }
        if (!bracketed) {
            ++skipped;
            continue;
        }
        double t_lo = 0.0;
        RealVec p = w + t_hi * dir;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (t_lo + t_hi);
            p = w + mid * dir;
            double v = domain.eval(p);
            if (std::abs(v) <= 1e-12) break;
            if (v > 0.0)
                t_hi = mid;
            else
                t_lo = mid;
            if (t_hi - t_lo <= 1e-16 * (1.0 + t_hi)) break;
        }
        if (!domain.on_boundary(p)) {
            ++skipped;
            continue;
        }
        pts.push_back(p);
    }
    if (rays_skipped) *rays_skipped = skipped;
    return pts;
}

ConvexityAudit convexity_audit(const DomainModel& domain, long sample_count,
                               std::uint64_t seed, int threads) {
    ConvexityAudit audit;
    audit.samples_requested = sample_count;
    std::vector<RealVec> pts =
        sample_boundary(domain, sample_count, Rng::mix(seed, 1), &audit.rays_skipped);
    audit.samples_used = long(pts.size());
    if (pts.empty()) {
        audit.pass = false;
        return audit;
    }

    struct Local {
        double min_eig = std::numeric_limits<double>::infinity();
        double min_grad = std::numeric_limits<double>::infinity();
        long witness = -1;
    };
    std::vector<Local> locals(pts.size());
    parallel_for(long(pts.size()), threads, [&](long i) {
        BoundaryFrame f = boundary_frame(domain, pts[i]);
        Eigen::SelfAdjointEigenSolver<RealMat> es(f.restricted_form);
        locals[i].min_eig = es.eigenvalues()[0];
        locals[i].min_grad = f.gradient.norm();
        locals[i].witness = i;
    });
    audit.min_restricted_eigenvalue = std::numeric_limits<double>::infinity();
    audit.min_gradient_norm = std::numeric_limits<double>::infinity();
    long eig_witness = 0;
    for (long i = 0; i < long(pts.size()); ++i) {
        if (locals[i].min_eig < audit.min_restricted_eigenvalue) {
            audit.min_restricted_eigenvalue = locals[i].min_eig;
            eig_witness = i;
        }
        audit.min_gradient_norm = std::min(audit.min_gradient_norm, locals[i].min_grad);
    }
    audit.eigenvalue_witness = pts[eig_witness];

    // midpoint heuristic: boundary line segments would make rho vanish at
    // the midpoint of some boundary pair
    Rng pair_rng(Rng::mix(seed, 2));
    audit.max_midpoint_value = -std::numeric_limits<double>::infinity();
    long pairs = 0;
    for (long k = 0; k < sample_count; ++k) {
        long a = long(pair_rng.next_u64() % pts.size());
        long b = long(pair_rng.next_u64() % pts.size());
        if ((pts[a] - pts[b]).norm() < 1e-6) continue;
        ++pairs;
        double v = domain.eval(0.5 * (pts[a] + pts[b]));
        if (v > audit.max_midpoint_value) {
            audit.max_midpoint_value = v;
            audit.midpoint_witness_a = pts[a];
            audit.midpoint_witness_b = pts[b];
        }
    }
    audit.pairs_used = pairs;

    audit.curvature_ok = audit.min_restricted_eigenvalue >= -audit.eigenvalue_tol;
    audit.gradient_ok = audit.min_gradient_norm > 1e-9;
    audit.midpoint_ok = pairs == 0 || audit.max_midpoint_value < 0.0;
    audit.pass = audit.curvature_ok && audit.gradient_ok && audit.midpoint_ok &&
                 audit.samples_used == audit.samples_requested;
    return audit;
}

Json ConvexityAudit::to_json() const {
    auto vec = [](const RealVec& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    Json j;
    j["pass"] = pass;
    j["samples_requested"] = samples_requested;
    j["samples_used"] = samples_used;
    j["rays_skipped"] = rays_skipped;
    j["curvature_ok"] = curvature_ok;
    j["min_restricted_eigenvalue"] = min_restricted_eigenvalue;
    j["eigenvalue_tol"] = eigenvalue_tol;
    j["eigenvalue_witness"] = eigenvalue_witness.size() ? vec(eigenvalue_witness) : std::vector<double>{};
    j["gradient_ok"] = gradient_ok;
    j["min_gradient_norm"] = min_gradient_norm;
    j["midpoint_ok"] = midpoint_ok;
    j["pairs_used"] = pairs_used;
    j["max_midpoint_value"] = max_midpoint_value;
    j["midpoint_witness_a"] =
        midpoint_witness_a.size() ? vec(midpoint_witness_a) : std::vector<double>{};
    j["midpoint_witness_b"] =
        midpoint_witness_b.size() ? vec(midpoint_witness_b) : std::vector<double>{};
    return j;
}

} // namespace peakgeom
