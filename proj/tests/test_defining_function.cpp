#include "peakgeom/catalog.hpp"
#include "peakgeom/defining_function.hpp"
#include "peakgeom/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace peakgeom;

namespace {

RealVec pt4(double a, double b, double c, double d) {
    RealVec p(4);
    p << a, b, c, d;
    return p;
}

// central differences, step 1e-4
double fd_partial(const DefiningFunction& f, const RealVec& p, int var, double h = 1e-4) {
    RealVec pp = p, pm = p;
    pp[var] += h;
    pm[var] -= h;
    return (f.eval(pp) - f.eval(pm)) / (2.0 * h);
}

} // namespace

TEST_CASE("defining function evaluation on catalog domains") {
    DomainModel ball = catalog::make_domain("ball", 2);
    CHECK(ball.eval(pt4(0, 0, 0, 0)) == doctest::Approx(-1.0).epsilon(1e-15));

    DomainModel egg = catalog::make_domain("egg", 2);
    CHECK(egg.eval(pt4(1, 0, 0, 0)) == doctest::Approx(0.0).epsilon(1e-15));
    double s = std::pow(2.0, -0.25);
    CHECK(egg.eval(pt4(0, 0, s, 0)) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("dimension mismatch is rejected") {
    DomainModel ball = catalog::make_domain("ball", 2);
    RealVec p(6);
    p.setZero();
    CHECK_THROWS_AS((void)ball.eval(p), std::invalid_argument);
}

TEST_CASE("formal first and second partials match central differences") {
    std::vector<DomainModel> domains;
    domains.push_back(catalog::make_domain("ball", 2));
    domains.push_back(catalog::make_domain("ball", 3));
    domains.push_back(catalog::make_domain("egg", 2));
    domains.push_back(catalog::make_domain("egg", 3));

    for (const DomainModel& dom : domains) {
        const int N = dom.real_dim();
        std::vector<DefiningFunction> first;
        for (int i = 0; i < N; ++i) first.push_back(dom.rho().partial(i));

        Rng rng(42);
        for (int trial = 0; trial < 100; ++trial) {
            RealVec p(N);
            for (int i = 0; i < N; ++i) p[i] = rng.uniform(-1.0, 1.0);
            RealVec g = dom.gradient(p);
            RealMat H = dom.hessian(p);
            for (int i = 0; i < N; ++i) {
                double fd = fd_partial(dom.rho(), p, i);
                CHECK(std::abs(fd - g[i]) <= 1e-6 * (1.0 + std::abs(g[i])));
                for (int j = 0; j < N; ++j) {
                    double fd2 = fd_partial(first[i], p, j);
                    CHECK(std::abs(fd2 - H(i, j)) <= 1e-6 * (1.0 + std::abs(H(i, j))));
                }
            }
        }
    }
}

TEST_CASE("partial derivative of a constant-free variable is zero") {
    DefiningFunction f(4, {Monomial{{2, 0, 0, 0}, 1.0}, Monomial{{0, 0, 4, 0}, 2.0}});
    DefiningFunction d1 = f.partial(1);
    CHECK(d1.terms().empty());
    DefiningFunction d2 = f.partial(2);
    RealVec p = pt4(0.5, 0.25, 2.0, -1.0);
    CHECK(d2.eval(p) == doctest::Approx(8.0 * 8.0)); // 8 x^3 at x=2
}

TEST_CASE("json round trip preserves evaluation") {
    DomainModel egg = catalog::make_domain("egg", 3);
    Json j = egg.to_json();
    DomainModel back = DomainModel::from_json(nlohmann::json::parse(j.dump()));
    Rng rng(7);
    for (int k = 0; k < 20; ++k) {
        RealVec p(4);
        for (int i = 0; i < 4; ++i) p[i] = rng.uniform(-1.0, 1.0);
        CHECK(back.eval(p) == doctest::Approx(egg.eval(p)).epsilon(1e-15));
    }
}
