#include "peakgeom/catalog.hpp"
#include "peakgeom/peak_family.hpp"
#include "peakgeom/quadrature.hpp"
#include "peakgeom/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace peakgeom;

namespace {

const double kPi = 3.14159265358979323846;
const double kSqrt2Pi = 4.442882938158366; // sqrt(2) * pi

RealVec x1(double t) {
    RealVec x(1);
    x[0] = t;
    return x;
}

PeakFamily hopf_family() {
    static const PeakFamily fam = [] {
        PatchModel hopf = catalog::make_patch("hopf");
        DomainModel ball = catalog::make_domain("ball", 2);
        return make_family(hopf, ball, FamilyOptions{});
    }();
    return fam;
}

double bump_integral(const BumpFunction& bump, int d) {
    quad::Box box;
    box.lo = RealVec::Constant(d, -bump.support_radius);
    box.hi = RealVec::Constant(d, bump.support_radius);
    quad::Options opt;
    opt.abs_tol = 1e-12;
    opt.max_cells = 40000;
    auto r = quad::integrate_real([&](const RealVec& x) { return bump(x); }, box, opt);
    return r.value;
}

} // namespace

TEST_CASE("positivity constants for the hopf curve") {
    PatchModel hopf = catalog::make_patch("hopf");
    DomainModel ball = catalog::make_domain("ball", 2);
    auto [coeff, radius] = positivity_constants(hopf, ball, 10000, 99);
    CHECK(radius == 0.5); // first halving candidate min{1/2, R} is accepted
    // sampled min of (1-cos s)/s^2 over |s| < 1 approaches (1-cos 1) ~ 0.4597
    CHECK(coeff > 0.40);
    CHECK(coeff < 0.42);

    // no violations over fresh pairs
    Rng rng(12345);
    for (int k = 0; k < 10000; ++k) {
        RealVec x = rng.in_ball(1, radius);
        RealVec y = rng.in_ball(1, radius);
        double re = peak_pairing_unchecked(ball, hopf.eval(x), hopf.eval(y)).real();
        CHECK(re >= coeff * (x - y).squaredNorm() - 1e-15);
    }
}

TEST_CASE("positivity constants for the recentered egg sub-patch") {
    PatchModel sub = catalog::make_patch("egg_curve", {{"center", 0.3}, {"radius", 0.2}});
    DomainModel egg = catalog::make_domain("egg", 2);
    auto [coeff, radius] = positivity_constants(sub, egg, 10000, 7);
    CHECK(radius > 0.0);
    CHECK(coeff > 0.0);
    Rng rng(999);
    for (int k = 0; k < 10000; ++k) {
        RealVec x = rng.in_ball(1, radius);
        RealVec y = rng.in_ball(1, radius);
        double re = peak_pairing_unchecked(egg, sub.eval(x), sub.eval(y)).real();
        CHECK(re >= coeff * (x - y).squaredNorm() - 1e-15);
    }
}

TEST_CASE("positivity search rejects a rank-zero map") {
    // constant map: every pairing value is zero, no radius can be accepted
    PatchModel flat;
    flat.name = "constant";
    flat.dim_d = 1;
    flat.radius = 0.9;
    flat.eval = [](const RealVec&) {
        CplxVec z(2);
        z << 1.0, 0.0;
        return z;
    };
    flat.jacobian = [](const RealVec&) { return CplxMat::Zero(2, 1); };
    flat.second = [](const RealVec&) { return std::vector<CplxMat>(2, CplxMat::Zero(1, 1)); };
    DomainModel egg = catalog::make_domain("egg", 2);
    CHECK_THROWS_AS((void)positivity_constants(flat, egg, 200, 3), std::runtime_error);
}

TEST_CASE("working radius combines the caps") {
    CHECK(working_radius(kPi, 0.5, 10.0) == 0.25); // positivity cap binds
    CHECK(working_radius(kPi, 0.5, 10.0) <= 0.5 * 0.5);
    CHECK(working_radius(1.0, 10.0, 10.0) == 1.0 / 8.0);  // patch cap binds
    CHECK(working_radius(10.0, 10.0, 0.3) == 0.1);        // second-order cap binds
}

TEST_CASE("normalizer closed forms and the quadrature oracle") {
    {
        PatchModel hopf = catalog::make_patch("hopf");
        DomainModel ball = catalog::make_domain("ball", 2);
        double cf = normalizer(hopf, ball, x1(0.3), NormalizerMethod::ClosedForm);
        CHECK(cf == doctest::Approx(kSqrt2Pi).epsilon(1e-12));
        double qd = normalizer(hopf, ball, x1(0.3), NormalizerMethod::Quadrature);
        CHECK(std::abs(cf - qd) <= 1e-6 * cf);
    }
    {
        PatchModel torus = catalog::make_patch("torus3");
        DomainModel ball3 = catalog::make_domain("ball", 3);
        RealVec x(2);
        x << -0.2, 0.5;
        double cf = normalizer(torus, ball3, x, NormalizerMethod::ClosedForm);
        CHECK(cf == doctest::Approx(2.0 * kPi * std::sqrt(3.0)).epsilon(1e-12));
        double qd = normalizer(torus, ball3, x, NormalizerMethod::Quadrature);
        CHECK(std::abs(cf - qd) <= 1e-6 * cf);
    }
    {
        PatchModel curve = catalog::make_patch("egg_curve");
        DomainModel egg = catalog::make_domain("egg", 2);
        double cf = normalizer(curve, egg, x1(0.3), NormalizerMethod::ClosedForm);
        double qd = normalizer(curve, egg, x1(0.3), NormalizerMethod::Quadrature);
        CHECK(std::abs(cf - qd) <= 1e-6 * cf);
    }
}

TEST_CASE("normalizer scaling symmetry and singular rejection") {
    Rng rng(4);
    for (int d : {1, 2}) {
        for (int k = 0; k < 10; ++k) {
            RealMat A(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) A(i, j) = rng.uniform(-1, 1);
            RealMat M = A * A.transpose() + 0.1 * RealMat::Identity(d, d);
            double g = normalizer_closed_form(M);
            double g4 = normalizer_closed_form(RealMat(4.0 * M));
            CHECK(g4 == doctest::Approx(g / std::pow(2.0, d)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS((void)normalizer_closed_form(RealMat::Zero(1, 1)), std::runtime_error);
}

TEST_CASE("hopf family constants and cache") {
    PeakFamily fam = hopf_family();
    CHECK(fam.constants.positivity_radius == 0.5);
    CHECK(fam.constants.working_radius == 0.25);
    CHECK(fam.constants.positivity_coeff > 0.40);
    CHECK(fam.constants.second_order_radius >= 0.75); // keeps 1/4 = min{., delta/2}
    CHECK(fam.bump.support_radius == doctest::Approx(0.2));
    CHECK(fam.cache.max_rel_diff_vs_quadrature <= 1e-6);
    CHECK(fam.cache.sup_f_over_g == doctest::Approx(1.0 / kSqrt2Pi).epsilon(1e-9));
    CHECK(fam.constants.separation_coeff >= 0.0);
}

TEST_CASE("peak integral vanishes for the zero bump") {
    PeakFamily fam = hopf_family();
    fam.bump.scale = 0.0;
    CplxVec z(2);
    z << 0.3, 0.1;
    PeakValue v = eval_peak(fam, 0.1, z);
    CHECK(v.value == Complex(0.0, 0.0));
}

TEST_CASE("peak integral at the ball center matches the closed form") {
    PeakFamily fam = hopf_family();
    double intf = bump_integral(fam.bump, 1);
    CplxVec z0 = CplxVec::Zero(2);
    for (double delta : {0.2, 0.1, 0.05, 0.02}) {
        PeakValue v = eval_peak(fam, delta, z0);
        double expected = delta / (delta * delta + 1.0) * intf / kSqrt2Pi;
        CHECK(std::abs(v.value - Complex(expected, 0.0)) <= 1e-6);
        CHECK(std::abs(v.value.imag()) <= 1e-9);
        CHECK(v.min_denominator_re >= delta * delta - 1e-9);
        CHECK(v.converged);
    }
}

TEST_CASE("peak integral concentrates on the patch as delta shrinks") {
    PeakFamily fam = hopf_family();
    CplxVec zg = fam.patch.eval(x1(0.0));
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.2, 0.1, 0.05, 0.02}) {
        PeakValue v = eval_peak(fam, delta, zg);
        double err = std::abs(v.value - Complex(fam.bump(x1(0.0)), 0.0));
        CHECK(err < prev);
        CHECK(v.min_denominator_re >= delta * delta - 1e-9);
        prev = err;
    }
    CHECK(prev < 0.25);
}

TEST_CASE("peak integral rejects exterior points and bad delta") {
    PeakFamily fam = hopf_family();
    CplxVec zout(2);
    zout << 1.2, 0.0;
    CHECK_THROWS_AS((void)eval_peak(fam, 0.1, zout), std::invalid_argument);
    CHECK_THROWS_AS((void)eval_peak(fam, 0.0, CplxVec(CplxVec::Zero(2))), std::invalid_argument);
}

TEST_CASE("local minimization of the pairing") {
    PatchModel hopf = catalog::make_patch("hopf");
    DomainModel ball = catalog::make_domain("ball", 2);
    const double r = 0.25;

    // z on the patch: minimizer is the parameter itself with value 0
    for (double s : {-0.3, 0.0, 0.17, 0.41}) {
        MinimizerResult mr = local_min(hopf, ball, hopf.eval(x1(s)), r);
        CHECK(mr.interior);
        CHECK(std::abs(mr.y[0] - s) <= 1e-7);
        CHECK(std::abs(mr.value) <= 1e-13);
    }

    // constant pairing: tie-break picks the smallest-norm lattice point
    MinimizerResult center = local_min(hopf, ball, CplxVec(CplxVec::Zero(2)), r);
    CHECK(center.y[0] == 0.0);
    CHECK(center.value == doctest::Approx(1.0));
    CHECK(center.interior);

    // z slightly inside the ball under gamma(0)
    double eps = 1e-3;
    CplxVec zin = (1.0 - eps) * hopf.eval(x1(0.0));
    MinimizerResult mr = local_min(hopf, ball, zin, r);
    CHECK(mr.interior);
    CHECK(std::abs(mr.y[0]) <= 1e-6);
    CHECK(mr.gradient_norm <= 1e-9);

    // optimality against a brute-force lattice
    Rng rng(31);
    for (int k = 0; k < 5; ++k) {
        RealVec x0 = rng.in_ball(1, r);
        double t = rng.uniform(1e-4, 5e-3);
        CplxVec z = (1.0 - t) * hopf.eval(x0);
        MinimizerResult m = local_min(hopf, ball, z, r);
        double brute = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 1000; ++i) {
            double t2 = -2 * r + 4.0 * r * i / 1000.0;
            brute = std::min(brute,
                             peak_pairing_unchecked(ball, hopf.eval(x1(t2)), z).real());
        }
        CHECK(m.value <= brute + 1e-9);
    }

    // boundary minimizer is flagged, not thrown
    CplxVec zfar = -hopf.eval(x1(0.0));
    MinimizerResult far = local_min(hopf, ball, zfar, r);
    CHECK_FALSE(far.interior);
    CHECK(std::abs(std::abs(far.y[0]) - 2 * r) <= 1e-12);
}

TEST_CASE("critical residual vanishes at interior minimizers") {
    PatchModel hopf = catalog::make_patch("hopf");
    DomainModel ball = catalog::make_domain("ball", 2);
    const double r = 0.25;

    // z on the patch: all pairing factors vanish at the minimizer
    CHECK(critical_residual(hopf, ball, hopf.eval(x1(0.1)), r) <= 1e-9);
    // ball center: the expression reduces to d/dt |gamma|^2 = 0
    CHECK(critical_residual(hopf, ball, CplxVec(CplxVec::Zero(2)), r) <= 1e-12);

    // seeded draws near each catalog patch
    struct Setup {
        const char* name;
        double r;
        double span;
    };
    for (const Setup& s :
         {Setup{"hopf", 0.25, 0.2}, Setup{"real_circle", 0.25, 0.2},
          Setup{"egg_curve", 0.3, 0.2}, Setup{"torus3", 0.4, 0.25}}) {
        PatchModel p = catalog::make_patch(s.name);
        DomainModel dom = catalog::default_domain_for(s.name);
        Rng rng(fnv1a64(s.name) ^ 17);
        for (int k = 0; k < 20; ++k) {
            RealVec x0 = rng.in_ball(p.dim_d, s.span);
            RealVec bp = to_real(p.eval(x0));
            RealVec g = dom.gradient(bp);
            RealVec zp = bp - rng.uniform(1e-4, 5e-3) * g / g.norm();
            REQUIRE(dom.eval(zp) <= 0.0);
            CplxVec z = to_complex(zp);
            double resid = critical_residual(p, dom, z, s.r);
            CHECK(resid <= 1e-6 * (1.0 + zp.norm()));
        }
    }

    // boundary minimizer: no residual is defined
    CplxVec zfar = -hopf.eval(x1(0.0));
    CHECK_THROWS_AS((void)critical_residual(hopf, ball, zfar, r), std::runtime_error);
}

TEST_CASE("pairing limit probe approaches half the quadratic form") {
    PatchModel hopf = catalog::make_patch("hopf");
    DomainModel ball = catalog::make_domain("ball", 2);
    {
        auto rows = pairing_limit_probe(hopf, ball, x1(0.0), x1(1.0), {0.2, 0.1, 0.05});
        CHECK(rows[1].probe == doctest::Approx(0.49958347219741794).epsilon(1e-10));
        CHECK(rows[1].target == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rows[1].error <= 4.2e-4);
        for (const auto& row : rows) {
            double direct = (1.0 - std::cos(row.delta)) / (row.delta * row.delta);
            CHECK(row.probe == doctest::Approx(direct).epsilon(1e-11));
            CHECK(row.error <= 0.05 * row.delta); // empirically O(delta)
        }
        CHECK(rows[0].error > rows[1].error);
        CHECK(rows[1].error > rows[2].error);
    }
    {
        PatchModel torus = catalog::make_patch("torus3");
        DomainModel ball3 = catalog::make_domain("ball", 3);
        RealVec v = RealVec::Zero(2);
        v[0] = 1.0;
        auto rows = pairing_limit_probe(torus, ball3, RealVec::Zero(2), v, {0.2, 0.1, 0.05});
        for (const auto& row : rows) {
            CHECK(row.target == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
            double direct = (2.0 - 2.0 * std::cos(row.delta)) / (3.0 * row.delta * row.delta);
            CHECK(row.probe == doctest::Approx(direct).epsilon(1e-11));
            CHECK(row.error <= row.delta * row.delta / 6.0);
        }
    }
    {
        auto rows = pairing_limit_probe(hopf, ball, x1(0.3), RealVec(RealVec::Zero(1)), {0.1});
        CHECK(rows[0].probe == 0.0);
        CHECK(rows[0].target == 0.0);
    }
    CHECK_THROWS_AS(
        (void)pairing_limit_probe(hopf, ball, x1(3.0), x1(1.0), {0.2}),
        std::invalid_argument);
}

TEST_CASE("limit audit on the hopf family") {
    PeakFamily fam = hopf_family();
    std::vector<double> deltas{0.2, 0.1, 0.05, 0.02};
    std::vector<RealVec> z_on{x1(0.0), x1(0.1)};
    std::vector<CplxVec> z_off{CplxVec::Zero(2)};
    std::vector<CplxVec> z_bulk;
    {
        CplxVec z(2);
        z << 0.4, Complex(0.1, 0.2);
        z_bulk.push_back(z);
    }
    LimitAudit audit = limit_audit(fam, deltas, z_on, z_off, z_bulk, 2);
    CHECK(audit.pass);
    CHECK(audit.bound_ok);
    CHECK(audit.onpatch_decreasing);
    CHECK(audit.offpatch_decreasing);
    CHECK(audit.rows.size() == deltas.size() * 4);
    CHECK(audit.sup_abs_h <= audit.bound + 1e-3);
    // dominating bound for d=1 reduces to pi sqrt(2/C) / G-sup
    double expect_bound =
        fam.cache.sup_f_over_g * kPi * std::sqrt(2.0 / fam.constants.positivity_coeff);
    CHECK(audit.bound == doctest::Approx(expect_bound).epsilon(1e-12));

    // claim-(ii) rows at the origin match the closed form
    double intf = bump_integral(fam.bump, 1);
    for (const auto& row : audit.rows) {
        if (row.z_id != "off:0") continue;
        double expected = row.delta / (row.delta * row.delta + 1.0) * intf / kSqrt2Pi;
        CHECK(std::abs(std::abs(row.h) - expected) <= 1e-6);
    }

    std::string csv = audit.to_csv("hdr");
    CHECK(csv.find("delta,z_id,re_h,im_h,abs_h,bound,err_vs_target") != std::string::npos);
    CHECK(audit.to_json()["pass"] == true);
}

TEST_CASE("nested compacts shrink toward the support") {
    NestedCompacts nc = shrinking_compacts(0.25, 0.1);
    CHECK(nc.radius(1) == doctest::Approx(0.2));
    for (int nu : {1, 2, 5, 100, 9999})
        CHECK(nc.radius(nu + 1) < nc.radius(nu));

    BumpFunction chi = nc.indicator(3);
    double inner = nc.radius(4), outer = nc.radius(3);
    CHECK(chi.value(0.0) == 1.0);
    CHECK(chi.value(inner * 0.999) == 1.0);
    CHECK(chi.value(outer) == 0.0);
    CHECK(chi.value(outer * 1.2) == 0.0);
    double mid = chi.value(0.5 * (inner + outer));
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);

    CHECK_THROWS_AS((void)shrinking_compacts(0.25, 0.3), std::invalid_argument);
}

TEST_CASE("bump profiles are normalized and compactly supported") {
    for (auto kind : {BumpFunction::Kind::SmoothExp, BumpFunction::Kind::Cosine}) {
        BumpFunction b;
        b.kind = kind;
        b.support_radius = 0.2;
        CHECK(b.value(0.0) == doctest::Approx(1.0));
        CHECK(b.value(0.2) == 0.0);
        CHECK(b.value(0.3) == 0.0);
        for (double r : {0.05, 0.1, 0.15, 0.19}) {
            CHECK(b.value(r) > 0.0);
            CHECK(b.value(r) <= 1.0);
        }
        // radial monotonicity
        double prev = 2.0;
        for (double r = 0.0; r < 0.2; r += 0.01) {
            double v = b.value(r);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
}
