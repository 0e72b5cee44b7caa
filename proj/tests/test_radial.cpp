#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qlb/errors.hpp"
#include "qlb/radial.hpp"

using namespace qlb;

namespace {

double max_err(const RadialProfile& u, double lo, double hi, double (*exact)(double)) {
    double e = 0.0;
    for (double r : uniform_grid(lo, hi, 1001)) e = std::max(e, std::abs(u.u(r) - exact(r)));
    return e;
}

}  // namespace

TEST_CASE("shooting reproduces the p = 0 quadratic") {
    const RadialProfile u = solve_lane_emden({3, 0.0, 2.0}, 1.0);
    CHECK(u.kind() == ProfileKind::Shooting);
    const double hi = 0.999 * u.positivity_radius();
    CHECK(max_err(u, 0.0, hi, [](double r) { return 1.0 - r * r / 3.0; }) < 1e-9);
    CHECK(u.positivity_radius() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-8));
}

TEST_CASE("shooting reproduces sin(r)/r for p = 1, d = 3") {
    const RadialProfile u = solve_lane_emden({3, 1.0, 1.0}, 1.0);
    CHECK(max_err(u, 0.0, 3.0, [](double r) { return r == 0.0 ? 1.0 : std::sin(r) / r; }) < 1e-8);
}

TEST_CASE("shooting reproduces (1+r^2)^{-1/2} for p = 5, d = 3, lambda = 3") {
    const RadialProfile u = solve_lane_emden({3, 5.0, 3.0}, 1.0, {20.0, 1e-10, 2000000});
    CHECK(max_err(u, 0.0, 20.0, [](double r) { return 1.0 / std::sqrt(1.0 + r * r); }) < 1e-7);
    // substitution oracle: -Δ(1+r^2)^{-1/2} = 3(1+r^2)^{-5/2}
    for (double r : {0.1, 1.0, 5.0}) {
        const double s = 1.0 + r * r;
        const double du = -r * std::pow(s, -1.5);
        const double d2u = -std::pow(s, -1.5) + 3.0 * r * r * std::pow(s, -2.5);
        CHECK(-(d2u + 2.0 * du / r) == doctest::Approx(3.0 * std::pow(s, -2.5)).epsilon(1e-12));
    }
}

TEST_CASE("closed forms and their positivity radii") {
    const RadialProfile p0 = explicit_p0({4, 0.0, 8.0}, 1.0);
    CHECK(p0.positivity_radius() == doctest::Approx(1.0));
    const RadialProfile p1 = explicit_linear_d3(std::numbers::pi * std::numbers::pi, 1.0);
    CHECK(p1.positivity_radius() == doctest::Approx(1.0));
    for (const RadialProfile* u : {&p0, &p1}) {
        const ResidualReport r = residual(*u, uniform_grid(1e-3, 0.999 * u->positivity_radius(), 1000));
        CHECK(r.sup_rel <= 1e-12);
    }
    CHECK_THROWS_AS(explicit_p0({3, 1.0, 1.0}, 1.0), RegimeError);
}

TEST_CASE("singular profile A r^{-gamma}") {
    const RadialProfile s = singular_profile({5, 2.0, 1.0});
    CHECK(s.singular_at_origin());
    CHECK(*s.singular_exponent() == doctest::Approx(2.0));
    CHECK(s.u(1.0) == doctest::Approx(2.0));
    CHECK(s.u(0.5) == doctest::Approx(8.0));
    CHECK(residual(s, uniform_grid(1e-3, 1.0, 1000)).sup_rel <= 1e-10);
    // d = 4, p = 2.5: γ = 4/3, A = [γ(d-2-γ)]^{2/3}
    const RadialProfile t = singular_profile({4, 2.5, 1.0});
    const double g = 4.0 / 3.0;
    CHECK(t.u(1.0) == doctest::Approx(std::pow(g * (2.0 - g), 2.0 / 3.0)));
    CHECK(residual(t, uniform_grid(1e-3, 1.0, 1000)).sup_rel <= 1e-10);
    CHECK_THROWS_AS(singular_profile({3, 2.0, 1.0}), RegimeError);
    CHECK_THROWS_AS(s.eval(0.0), GeometryError);
}

TEST_CASE("shooting residual at tol 1e-10") {
    for (double p : {0.5, 2.0, 4.0}) {
        const RadialProfile u = solve_lane_emden({3, p, 1.0}, 1.0);
        const double hi = std::min(u.domain_end(), u.positivity_radius());
        CHECK(residual(u, uniform_grid(1e-3 * hi, 0.99 * hi, 1000)).sup_rel <= 1e-7);
    }
    const RadialProfile u = solve_lane_emden({3, 2.0, 1.0}, 1.0);
    CHECK_THROWS_AS(residual(u, uniform_grid(0.1, 2.0 * u.positivity_radius(), 10)), GeometryError);
    CHECK_THROWS_AS(solve_lane_emden({3, 2.0, 1.0}, -1.0), DomainError);
}

TEST_CASE("positive radial solutions are nonincreasing") {
    for (int d : {3, 4, 5})
        for (double p : {0.0, 0.5, 1.0, 2.0, 3.5}) {
            const RadialProfile u = make_solution({d, p, 1.0}, 2.0);
            const double hi = std::min(u.domain_end(), u.positivity_radius());
            for (double r : uniform_grid(0.0, hi, 300)) CHECK(u.du(r) <= 1e-14);
        }
}

TEST_CASE("scaling family stays a solution") {
    const RadialProfile u = solve_lane_emden({3, 2.0, 1.0}, 1.0);
    for (double mu : {0.5, 2.0}) {
        const RadialProfile v = u.rescaled(mu);
        CHECK(v.center_value() == doctest::Approx(std::pow(mu, 2.0) * 1.0));
        const double hi = std::min(v.domain_end(), v.positivity_radius());
        CHECK(residual(v, uniform_grid(1e-3 * hi, 0.99 * hi, 500)).sup_rel <= 1e-7);
    }
}

TEST_CASE("scaled profile is no longer a solution unless p = 1") {
    const RadialProfile u = make_solution({3, 2.0, 1.0}, 1.0);
    const RadialProfile v = u.scaled(1.1);
    const double hi = 0.99 * u.positivity_radius();
    CHECK(residual(v, uniform_grid(1e-3, hi, 300)).sup_abs > 1e-3);
    CHECK(!v.is_solution());
    const RadialProfile w = make_solution({3, 1.0, 1.0}, 1.0).scaled(1.1);
    CHECK(w.is_solution());
}

TEST_CASE("tabulated rows are uniform and interpolate the profile") {
    const RadialProfile u = make_solution({4, 2.5, 1.0}, 1.0);
    const auto rows = u.tabulate(0.0, 1.0, 11);
    REQUIRE(rows.size() == 11);
    CHECK(rows[5].r == doctest::Approx(0.5));
    CHECK(rows[5].u == doctest::Approx(u.u(0.5)));
}
