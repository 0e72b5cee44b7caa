#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qlb/quadrature.hpp"

using namespace qlb;

TEST_CASE("adaptive Gauss-Kronrod on smooth integrands") {
    const QuadResult s = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::abs(s.value - 2.0) <= 3.0 * s.abs_error + 1e-15);
    const QuadResult e = integrate([](double x) { return std::exp(-x * x); }, -5.0, 5.0);
    CHECK(e.value == doctest::Approx(std::sqrt(std::numbers::pi) * std::erf(5.0)).epsilon(1e-13));
}

TEST_CASE("breakpoints handle kinks") {
    const QuadResult k = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, std::vector<double>{0.3});
    CHECK(k.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-14));
}

TEST_CASE("graded substitution for endpoint singularities") {
    // ∫_0^1 r^{-1/2} dr = 2 and ∫_0^1 r^{-0.9} dr = 10
    const QuadResult a = integrate_graded([](double r) { return 1.0 / std::sqrt(r); }, 1.0, 4.0);
    CHECK(a.value == doctest::Approx(2.0).epsilon(1e-11));
    const QuadResult b = integrate_graded([](double r) { return std::pow(r, -0.9); }, 1.0, 20.0);
    CHECK(b.value == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("composite Gauss-Legendre converges at high order") {
    auto f = [](double x) { return std::exp(x); };
    const double exact = std::exp(1.0) - 1.0;
    const double e1 = std::abs(composite_gauss_legendre(f, 0.0, 1.0, 2, 2) - exact);
    const double e2 = std::abs(composite_gauss_legendre(f, 0.0, 1.0, 4, 2) - exact);
    // two-point rule has order 4: halving h gains about 16
    CHECK(e1 / e2 > 12.0);
    CHECK(composite_gauss_legendre(f, 0.0, 1.0, 8, 5) == doctest::Approx(exact).epsilon(1e-15));
}
