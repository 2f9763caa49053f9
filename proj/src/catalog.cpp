#include "peakgeom/catalog.hpp"

#include <cmath>
#include <stdexcept>

namespace peakgeom::catalog {

namespace {

const double kPi = 3.14159265358979323846;

long long binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Monomial mono(int vars, std::initializer_list<std::pair<int, int>> var_exps, double coeff) {
    Monomial m;
    m.exps.assign(vars, 0);
    for (auto [v, e] : var_exps) m.exps[v] = e;
    m.coeff = coeff;
    return m;
}

double get_param(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

} // namespace

DomainModel make_domain(const std::string& name, int param) {
    if (name == "ball") {
        int n = param;
        if (n < 2) throw std::invalid_argument("ball: complex dimension must be >= 2");
        int vars = 2 * n;
        std::vector<Monomial> terms;
        for (int i = 0; i < vars; ++i) terms.push_back(mono(vars, {{i, 2}}, 1.0));
        terms.push_back(mono(vars, {}, -1.0));
        return DomainModel("ball(" + std::to_string(n) + ")",
                           DefiningFunction(vars, std::move(terms)), RealVec::Zero(vars), 1.5);
    }
    if (name == "egg") {
        int m = param;
        if (m < 2) throw std::invalid_argument("egg: exponent m must be >= 2");
        int vars = 4;
        std::vector<Monomial> terms;
        terms.push_back(mono(vars, {{0, 2}}, 1.0));
        terms.push_back(mono(vars, {{1, 2}}, 1.0));
        // (x2^2 + y2^2)^m expanded exactly
        for (int k = 0; k <= m; ++k)
            terms.push_back(mono(vars, {{2, 2 * k}, {3, 2 * (m - k)}}, double(binomial(m, k))));
        terms.push_back(mono(vars, {}, -1.0));
        return DomainModel("egg(" + std::to_string(m) + ")",
                           DefiningFunction(vars, std::move(terms)), RealVec::Zero(vars), 1.5);
    }
    throw std::invalid_argument("unknown catalog domain: " + name);
}

DomainModel make_control_surface() {
    int vars = 4;
    std::vector<Monomial> terms;
    terms.push_back(mono(vars, {{0, 2}}, 1.0));
    terms.push_back(mono(vars, {{1, 2}}, 1.0));
    terms.push_back(mono(vars, {{2, 2}}, 1.0));
    terms.push_back(mono(vars, {{3, 2}}, -1.0));
    terms.push_back(mono(vars, {}, -1.0));
    return DomainModel("hyperboloid", DefiningFunction(vars, std::move(terms)),
                       RealVec::Zero(vars), 3.0);
}

PatchModel make_patch(const std::string& name, const Params& params) {
    PatchModel p;
    p.name = name;
    if (name == "hopf") {
        const double inv = 1.0 / std::sqrt(2.0);
        p.dim_d = 1;
        p.radius = get_param(params, "radius", kPi);
        p.eval = [inv](const RealVec& x) {
            CplxVec z(2);
            z[0] = inv * std::polar(1.0, x[0]);
            z[1] = inv * std::polar(1.0, -x[0]);
            return z;
        };
        p.jacobian = [inv](const RealVec& x) {
            CplxMat J(2, 1);
            J(0, 0) = Complex(0, 1) * inv * std::polar(1.0, x[0]);
            J(1, 0) = Complex(0, -1) * inv * std::polar(1.0, -x[0]);
            return J;
        };
        p.second = [inv](const RealVec& x) {
            std::vector<CplxMat> s(2, CplxMat(1, 1));
            s[0](0, 0) = -inv * std::polar(1.0, x[0]);
            s[1](0, 0) = -inv * std::polar(1.0, -x[0]);
            return s;
        };
        return p;
    }
    if (name == "real_circle") {
        p.dim_d = 1;
        p.radius = get_param(params, "radius", kPi);
        p.eval = [](const RealVec& x) {
            CplxVec z(2);
            z[0] = std::cos(x[0]);
            z[1] = std::sin(x[0]);
            return z;
        };
        p.jacobian = [](const RealVec& x) {
            CplxMat J(2, 1);
            J(0, 0) = -std::sin(x[0]);
            J(1, 0) = std::cos(x[0]);
            return J;
        };
        p.second = [](const RealVec& x) {
            std::vector<CplxMat> s(2, CplxMat(1, 1));
            s[0](0, 0) = -std::cos(x[0]);
            s[1](0, 0) = -std::sin(x[0]);
            return s;
        };
        return p;
    }
    if (name == "egg_curve") {
        double center = get_param(params, "center", 0.0);
        double radius = get_param(params, "radius", 0.85);
        if (std::abs(center) + radius > 0.9)
            throw std::invalid_argument("egg_curve: |center| + radius must stay <= 0.9");
        p.dim_d = 1;
        p.radius = radius;
        auto u_of = [center](const RealVec& x) { return center + x[0]; };
        p.eval = [u_of](const RealVec& x) {
            double u = u_of(x);
            CplxVec z(2);
            z[0] = std::sqrt(1.0 - u * u * u * u);
            z[1] = u;
            return z;
        };
        p.jacobian = [u_of](const RealVec& x) {
            double u = u_of(x);
            double w = 1.0 - u * u * u * u;
            CplxMat J(2, 1);
            J(0, 0) = -2.0 * u * u * u / std::sqrt(w);
            J(1, 0) = 1.0;
            return J;
        };
        p.second = [u_of](const RealVec& x) {
            double u = u_of(x);
            double w = 1.0 - u * u * u * u;
            double u2 = u * u, u3 = u2 * u, u6 = u3 * u3;
            std::vector<CplxMat> s(2, CplxMat(1, 1));
            s[0](0, 0) = -6.0 * u2 / std::sqrt(w) - 4.0 * u6 / (w * std::sqrt(w));
            s[1](0, 0) = 0.0;
            return s;
        };
        return p;
    }
    if (name == "torus3") {
        const double inv = 1.0 / std::sqrt(3.0);
        p.dim_d = 2;
        p.radius = get_param(params, "radius", 1.0);
        p.eval = [inv](const RealVec& x) {
            CplxVec z(3);
            z[0] = inv * std::polar(1.0, x[0]);
            z[1] = inv * std::polar(1.0, x[1]);
            z[2] = inv * std::polar(1.0, -(x[0] + x[1]));
            return z;
        };
        p.jacobian = [inv](const RealVec& x) {
            const Complex i(0, 1);
            CplxMat J = CplxMat::Zero(3, 2);
            J(0, 0) = i * inv * std::polar(1.0, x[0]);
            J(1, 1) = i * inv * std::polar(1.0, x[1]);
            J(2, 0) = -i * inv * std::polar(1.0, -(x[0] + x[1]));
            J(2, 1) = J(2, 0);
            return J;
        };
        p.second = [inv](const RealVec& x) {
            std::vector<CplxMat> s(3, CplxMat::Zero(2, 2));
            s[0](0, 0) = -inv * std::polar(1.0, x[0]);
            s[1](1, 1) = -inv * std::polar(1.0, x[1]);
            Complex third = -inv * std::polar(1.0, -(x[0] + x[1]));
            s[2] << third, third, third, third;
            return s;
        };
        return p;
    }
    if (name == "nontangential_circle") {
        p.dim_d = 1;
        p.radius = get_param(params, "radius", kPi);
        p.eval = [](const RealVec& x) {
            CplxVec z(2);
            z[0] = std::polar(1.0, x[0]);
            z[1] = 0.0;
            return z;
        };
        p.jacobian = [](const RealVec& x) {
            CplxMat J(2, 1);
            J(0, 0) = Complex(0, 1) * std::polar(1.0, x[0]);
            J(1, 0) = 0.0;
            return J;
        };
        p.second = [](const RealVec& x) {
            std::vector<CplxMat> s(2, CplxMat(1, 1));
            s[0](0, 0) = -std::polar(1.0, x[0]);
            s[1](0, 0) = 0.0;
            return s;
        };
        return p;
    }
    throw std::invalid_argument("unknown catalog patch: " + name);
}

DomainModel default_domain_for(const std::string& patch_name) {
    if (patch_name == "hopf" || patch_name == "real_circle" ||
        patch_name == "nontangential_circle")
        return make_domain("ball", 2);
    if (patch_name == "egg_curve") return make_domain("egg", 2);
    if (patch_name == "torus3") return make_domain("ball", 3);
    throw std::invalid_argument("unknown catalog patch: " + patch_name);
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> list = [] {
        std::vector<Entry> v;
        v.push_back({"ball", "domain", "unit ball |z|^2 - 1 in C^n (param n >= 2)", {{"n", 2}},
                     Json{{"restricted_hessian_eigenvalues", 2.0}}});
        v.push_back({"egg", "domain", "|z1|^2 + |z2|^(2m) - 1 in C^2 (param m >= 2)", {{"m", 2}},
                     Json{{"degenerate_locus", "z2 = 0"}}});
        v.push_back({"hyperboloid", "control",
                     "indefinite surface x1^2+y1^2+x2^2-y2^2-1; curvature audit must fail",
                     {},
                     Json{{"hessian_diagonal", {2.0, 2.0, 2.0, -2.0}}}});
        v.push_back({"hopf", "patch", "(e^{it}, e^{-it})/sqrt2 on ball(2)", {{"radius", kPi}},
                     Json{{"pullback_form", 2.0},
                          {"normalizer", 4.442882938158366},
                          {"tangency_residual", 0.0}}});
        v.push_back({"real_circle", "patch", "(cos t, sin t) on ball(2)", {{"radius", kPi}},
                     Json{{"pullback_form", 2.0}, {"tangency_residual", 0.0}}});
        v.push_back({"egg_curve", "patch",
                     "(sqrt(1-u^4), u) on egg(2), u = center + t, |center|+radius <= 0.9",
                     {{"center", 0.0}, {"radius", 0.85}},
                     Json{{"pullback_form", "12u^2 + 8u^6/(1-u^4)"}, {"tangency_residual", 0.0}}});
        v.push_back({"torus3", "patch", "(e^{is}, e^{it}, e^{-i(s+t)})/sqrt3 on ball(3)",
                     {{"radius", 1.0}},
                     Json{{"pullback_form", {{4.0 / 3.0, 2.0 / 3.0}, {2.0 / 3.0, 4.0 / 3.0}}},
                          {"normalizer", 10.882796185405306},
                          {"tangency_residual", 0.0}}});
        v.push_back({"nontangential_circle", "patch",
                     "(e^{it}, 0) on ball(2); tangency audit must fail with residual 1",
                     {{"radius", kPi}},
                     Json{{"tangency_residual", 1.0}}});
        return v;
    }();
    return list;
}

} // namespace peakgeom::catalog
