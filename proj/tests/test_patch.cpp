#include "peakgeom/catalog.hpp"
#include "peakgeom/patch.hpp"
#include "peakgeom/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace peakgeom;

namespace {

Grid grid1(double lo, double hi, int steps) {
    Grid g;
    g.lo = RealVec::Constant(1, lo);
    g.hi = RealVec::Constant(1, hi);
    g.steps = {steps};
    return g;
}

Grid grid2(double lo, double hi, int steps) {
    Grid g;
    g.lo = RealVec::Constant(2, lo);
    g.hi = RealVec::Constant(2, hi);
    g.steps = {steps, steps};
    return g;
}

double egg_curve_H(double u) { // closed form of the 1x1 pullback form
    double u2 = u * u, u4 = u2 * u2, u6 = u4 * u2;
    return 12.0 * u2 + 8.0 * u6 / (1.0 - u4);
}

RealVec x1(double t) {
    RealVec x(1);
    x[0] = t;
    return x;
}

} // namespace

TEST_CASE("tangency residuals: positive catalog patches and the control") {
    struct Case {
        const char* patch;
        double expected;
    };
    for (const Case& c : {Case{"hopf", 0.0}, Case{"real_circle", 0.0}, Case{"egg_curve", 0.0},
                          Case{"torus3", 0.0}, Case{"nontangential_circle", 1.0}}) {
        PatchModel p = catalog::make_patch(c.patch);
        DomainModel dom = catalog::default_domain_for(c.patch);
        Grid g = p.dim_d == 1 ? grid1(-0.8 * p.radius, 0.8 * p.radius, 40)
                              : grid2(-0.8 * p.radius, 0.8 * p.radius, 12);
        PatchAudit a = patch_audit(p, dom, g);
        if (c.expected == 0.0) {
            CHECK(a.pass);
            CHECK(a.max_tangency_residual <= 1e-12);
        } else {
            CHECK_FALSE(a.pass);
            CHECK(a.boundary_ok);
            CHECK(a.immersion_ok);
            CHECK_FALSE(a.tangency_ok);
            CHECK(a.max_tangency_residual == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(a.max_boundary_residual <= 1e-12);
    }
}

TEST_CASE("pullback form closed forms") {
    {
        PatchModel hopf = catalog::make_patch("hopf");
        DomainModel ball = catalog::make_domain("ball", 2);
        for (double t : {-1.0, 0.0, 0.7, 2.5}) {
            PullbackForm f = pullback_form(hopf, ball, x1(t));
            CHECK(f.H(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
            CHECK(f.M(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(pullback_det(hopf, ball, x1(t)) == doctest::Approx(2.0).epsilon(1e-13));
        }
    }
    {
        PatchModel curve = catalog::make_patch("egg_curve");
        DomainModel egg = catalog::make_domain("egg", 2);
        PullbackForm f0 = pullback_form(curve, egg, x1(0.0));
        CHECK(f0.H(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(pullback_det(curve, egg, x1(0.0)) == doctest::Approx(0.0).epsilon(1e-15));
        for (double u : {-0.49, -0.3, -0.1, 0.1, 0.2, 0.35, 0.49}) {
            PullbackForm f = pullback_form(curve, egg, x1(u));
            double expected = egg_curve_H(u);
            CHECK(std::abs(f.H(0, 0) - expected) <= 1e-8 * std::abs(expected));
        }
    }
    {
        PatchModel torus = catalog::make_patch("torus3");
        DomainModel ball3 = catalog::make_domain("ball", 3);
        RealVec x(2);
        x << 0.3, -0.4;
        PullbackForm f = pullback_form(torus, ball3, x);
        RealMat expected(2, 2);
        expected << 4.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0;
        CHECK(f.H.isApprox(expected, 1e-12));
        CHECK(pullback_det(torus, ball3, x) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("pullback form is symmetric and PSD on audited patches") {
    for (const char* name : {"hopf", "real_circle", "egg_curve", "torus3"}) {
        PatchModel p = catalog::make_patch(name);
        DomainModel dom = catalog::default_domain_for(name);
        Rng rng(fnv1a64(name));
        for (int k = 0; k < 40; ++k) {
            RealVec x = rng.in_ball(p.dim_d, 0.8 * p.radius);
            PullbackForm f = pullback_form(p, dom, x);
            CHECK((f.H - f.H.transpose()).norm() <= 1e-12);
            Eigen::SelfAdjointEigenSolver<RealMat> es(f.H);
            CHECK(es.eigenvalues()[0] >= -1e-9);
            CHECK((f.M - 0.5 * f.H).norm() == 0.0);
        }
    }
}

TEST_CASE("pullback form matches second differences of the pairing") {
    // Re pairing(gamma(x+h u), gamma(x)) ~ (h^2/4) <u|H(x)|u>; symmetric
    // differencing plus polarization recovers H to O(h^2)
    const double h = 1e-3;
    for (const char* name : {"hopf", "egg_curve", "torus3"}) {
        PatchModel p = catalog::make_patch(name);
        DomainModel dom = catalog::default_domain_for(name);
        const int d = p.dim_d;
        Rng rng(fnv1a64(name) + 1);
        for (int k = 0; k < 10; ++k) {
            RealVec x = rng.in_ball(d, 0.5 * p.radius);
            CplxVec gx = p.eval(x);
            auto q = [&](const RealVec& u) {
                RealVec xp = x + h * u;
                RealVec xm = x - h * u;
                double a = peak_pairing_unchecked(dom, p.eval(xp), gx).real();
                double b = peak_pairing_unchecked(dom, p.eval(xm), gx).real();
                return 2.0 * (a + b) / (h * h); // -> <u|H|u>
            };
            PullbackForm f = pullback_form(p, dom, x);
            RealMat Hfd(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    RealVec ei = RealVec::Zero(d), ej = RealVec::Zero(d);
                    ei[i] = 1;
                    ej[j] = 1;
                    double qij;
                    if (i == j) {
                        qij = q(ei);
                    } else {
                        RealVec sum = ei + ej;
                        qij = 0.5 * (q(sum) - q(ei) - q(ej));
                    }
                    Hfd(i, j) = qij;
                    Hfd(j, i) = qij;
                }
            CHECK((Hfd - f.H).cwiseAbs().maxCoeff() <= 1e-4);
        }
    }
}

TEST_CASE("nondegeneracy map on catalog patches") {
    {
        PatchModel hopf = catalog::make_patch("hopf");
        DomainModel ball = catalog::make_domain("ball", 2);
        NondegeneracyMap m = nondegeneracy_map(hopf, ball, grid1(-1, 1, 100), 1e-6);
        CHECK(m.degenerate_count == 0);
        CHECK(m.min_over_grid == doctest::Approx(2.0).epsilon(1e-12));
    }
    {
        PatchModel rc = catalog::make_patch("real_circle");
        DomainModel ball = catalog::make_domain("ball", 2);
        NondegeneracyMap m = nondegeneracy_map(rc, ball, grid1(-1, 1, 100), 1e-6);
        CHECK(m.degenerate_count == 0);
        CHECK(m.min_over_grid == doctest::Approx(2.0).epsilon(1e-12));
    }
    {
        PatchModel curve = catalog::make_patch("egg_curve");
        DomainModel egg = catalog::make_domain("egg", 2);
        const double tol = 1e-6;
        NondegeneracyMap m = nondegeneracy_map(curve, egg, grid1(-0.5, 0.5, 200), tol);
        CHECK(m.degenerate_count > 0);
        // degenerate samples cluster symmetrically around u = 0 with
        // |u| <~ sqrt(tol/12)
        double limit = 1.2 * std::sqrt(tol / 12.0) + 0.011; // node spacing slack
        for (size_t i = 0; i < m.points.size(); ++i) {
            if (!m.nondegenerate[i]) CHECK(std::abs(m.points[i][0]) <= limit);
        }
        CHECK(std::abs(m.argmin[0]) <= 0.011);
    }
}

TEST_CASE("degenerate direction lies in the boundary null space") {
    // cross-module consistency at the egg flat point: the eigenvector of
    // H with zero eigenvalue maps to a boundary null direction
    PatchModel curve = catalog::make_patch("egg_curve");
    DomainModel egg = catalog::make_domain("egg", 2);
    RealVec x0 = RealVec::Zero(1);
    PullbackForm f = pullback_form(curve, egg, x0);
    CHECK(f.H(0, 0) <= 1e-12);

    RealMat J = real_jacobian(curve.jacobian(x0));
    RealVec dir = J.col(0).normalized();
    BoundaryFrame frame = boundary_frame(egg, to_real(curve.eval(x0)));
    NullSpace ns = null_space(frame, default_null_tolerance(frame));
    CHECK(ns.dimension == 2);
    // dir must lie in the span of the null basis columns
    RealVec proj = ns.basis * (ns.basis.transpose() * dir);
    CHECK((dir - proj).norm() <= 1e-9);
}

TEST_CASE("patch audit rejects mismatched grid") {
    PatchModel torus = catalog::make_patch("torus3");
    DomainModel ball3 = catalog::make_domain("ball", 3);
    CHECK_THROWS_AS((void)patch_audit(torus, ball3, grid1(-1, 1, 8)), std::invalid_argument);
}
