#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qlb/constants.hpp"
#include "qlb/errors.hpp"

using namespace qlb;
using std::numbers::e;
using std::numbers::pi;

TEST_CASE("Sobolev constant default and override") {
    CHECK(sobolev_constant(3, 1.0) == 1.0);
    CHECK(sobolev_constant(3) > 0.0);
    CHECK(std::isfinite(sobolev_constant(3)));
    CHECK(sobolev_default(4) < sobolev_default(3));
    // Talenti form [πd(d-2)]^{-1/2}(Γ(d)/Γ(d/2))^{1/d}
    CHECK(sobolev_default(3) ==
          doctest::Approx(std::pow(pi * 3.0, -0.5) * std::pow(std::tgamma(3.0) / std::tgamma(1.5), 1.0 / 3.0)));
    CHECK_THROWS_AS(sobolev_constant(3, 0.0), DomainError);
    CHECK_THROWS_AS(sobolev_constant(3, -1.0), DomainError);
}

TEST_CASE("c1 and k0") {
    const C1Result a = c1_and_k0(3, 1.0, 4.0);
    CHECK(a.c1 == doctest::Approx(4.0));
    CHECK(!a.k0);
    CHECK(!c1_and_k0(3, 1.0, 1.0).admissible);
    CHECK(!c1_and_k0(3, 0.5, 1.0).admissible);
    CHECK_THROWS_AS(c1_and_k0(3, 2.0, 1.5), RegimeError);
}

TEST_CASE("k0 is the last index with beta_k below one") {
    for (int d : {3, 4, 5})
        for (double q : {1.0 / std::sqrt(3.0), 0.3, 0.77, 1.3, 2.2}) {
            const C1Result c = c1_and_k0(d, 1.0, q);
            if (!c.admissible || !c.k0) continue;
            // brute force over the schedule
            int k = -1;
            for (int n = 0; n < 200; ++n)
                if (beta_n(d, 1.0, q, n) < 1.0) k = n;
            CHECK(*c.k0 == k);
        }
}

TEST_CASE("nudging restores admissibility") {
    const NudgeResult same = nudge_q(3, 1.0, 4.0);
    CHECK(same.q == 4.0);
    CHECK(!same.nudged);
    const NudgeResult n = nudge_q(3, 1.0, 1.0);
    CHECK(n.nudged);
    CHECK(n.q > 0.0);
    CHECK(n.q < 1.0);
    CHECK(c1_and_k0(3, 1.0, n.q).admissible);
    for (double p : {1.2, 1.5, 2.0, 2.5}) {
        const double qb = q_bar(3, p);
        for (double q : {qb + 0.01, qb + 0.5, 2.9, 3.0}) {
            if (q <= qb) continue;
            const NudgeResult r = nudge_q(3, p, q);
            CHECK(r.q > qb);
            CHECK(r.q <= q);
            CHECK(c1_and_k0(3, p, r.q).admissible);
        }
    }
}

TEST_CASE("I_inf,q by an independent evaluation") {
    // d = 3, p = 1, λ = 4 (Λ_p = 1), q = 4, ρ = 1/2; q > d/(d-2) so c1 = 4 and ω_d enters with power 0
    const double s2 = sobolev_default(3);
    const double first = 4.0 * s2 * s2 / 0.25;
    const double dual = 27.0 * 2.0 / std::pow(std::sqrt(3.0) - 1.0, 2.0);
    const double bracket = 1.0 + 1.0 / 4.0 + 0.25 * std::max(1.0 / 144.0 * 11.0, 0.25);
    const double expected = std::pow(first * dual * bracket, 3.0 / 8.0);
    CHECK(upper_I_inf({3, 1.0, 4.0}, 0.5, 4.0, s2).value() == doctest::Approx(expected).epsilon(1e-13));
    // p = 2, d = 4, q = 3 > d/(d-2): c1 = 3, ω_4^{1/2}, Λ_p = 2, exponent d/(2q - d) = 2
    const double s4 = sobolev_default(4);
    const double f2 = 3.0 * s4 * s4 * std::sqrt(omega(4)) / std::pow(1.0 - 0.3, 2.0);
    const double dual4 = 16.0 * 4.0 / std::pow(2.0 - std::sqrt(2.0), 2.0);
    const double br4 = 2.0 + 2.0 / 3.0 + 0.49 * std::max(2.0 / 144.0 * 10.0, 0.25);
    CHECK(upper_I_inf({4, 2.0, 1.0}, 0.3, 3.0, s4).value() ==
          doctest::Approx(std::pow(f2 * dual4 * br4, 2.0)).epsilon(1e-13));
}

TEST_CASE("I_inf,q stays finite across q and blows up as rho -> 1") {
    for (double p : {0.0, 0.5, 1.0, 2.0}) {
        const ProblemParams pp{3, p, 1.0};
        for (double q = q_bar(3, p) + 0.1; q <= 10.0; q += 0.05) {
            const double qq = nudge_q(3, p, q).q;
            const double v = upper_I_inf(pp, 0.5, qq, sobolev_default(3)).log_value;
            CHECK(std::isfinite(v));
            CHECK(v > 0.0);
        }
        CHECK(upper_I_inf(pp, 0.999999, 4.1, 1.0).log_value > upper_I_inf(pp, 0.9, 4.1, 1.0).log_value + 5.0);
    }
    CHECK_THROWS_AS(upper_I_inf({3, 2.0, 1.0}, 0.5, 1.5, 1.0), RegimeError);
}

TEST_CASE("Caccioppoli right side") {
    CHECK(caccioppoli_rhs(3, 1.0, 0.5).value() == doctest::Approx(128.0 * pi / 3.0));
    for (int d : {3, 4, 6})
        CHECK(caccioppoli_rhs(d, 2.0, 1.0).value() ==
              doctest::Approx(std::pow(2.0, d - 2) * caccioppoli_rhs(d, 1.0, 0.5).value()));
    CHECK(caccioppoli_rhs(3, 1.0, 1.0 - 1e-9).log_value > 40.0);
    CHECK_THROWS_AS(caccioppoli_rhs(3, 1.0, 1.0), GeometryError);
}

TEST_CASE("Young constant K1") {
    CHECK(young_K1(3.0, 3) == doctest::Approx(0.75));
    CHECK(young_K1(1e6, 3) == doctest::Approx(young_K1(kInfinity, 3)).epsilon(1e-6));
    CHECK(young_K1(kInfinity, 3) == doctest::Approx(2.0 / 3.0 * std::pow(3.0, 0.5)));
    const double near = young_K1(1.5 + 1e-7, 3);
    CHECK(std::isfinite(near));
    CHECK(near == doctest::Approx(young_K1(1.5 + 1e-6, 3)).epsilon(1e-4));
    CHECK_THROWS_AS(young_K1(1.5, 3), RegimeError);
}

TEST_CASE("reverse Poincare K2") {
    const CutoffSup phi{1.0, 2.0, 10.0};
    const CutoffSup phi2{1.0, 2.0, 20.0};
    const double a = 1.5;
    const ConstantValue k = reverse_poincare_K2(a, 3.0, 3, 1.0, 0.7, phi, 1.0);
    const ConstantValue k2 = reverse_poincare_K2(a, 3.0, 3, 1.0, 0.7, phi2, 1.0);
    CHECK(k2.value() - k.value() == doctest::Approx(2.0 * (a + 1.0) / a * 1.0 * 10.0));
    const ConstantValue k0 = reverse_poincare_K2(a, 3.0, 3, 1.0, 0.0, phi, 1.0);
    CHECK(k0.value() == doctest::Approx((a + 1.0) / a * (2.0 * 10.0 + 4.0)));
    CHECK_THROWS_AS(reverse_poincare_K2(0.0, 3.0, 3, 1.0, 0.7, phi, 1.0), RegimeError);
}

TEST_CASE("Moser K3") {
    const double s2 = sobolev_default(3);
    const ConstantValue inf = moser_K3(2.0, kInfinity, 3, 1.0, 0.5, 1.0, s2);
    const ConstantValue big = moser_K3(2.0, 1e5, 3, 1.0, 0.5, 1.0, s2);
    CHECK(big.value() == doctest::Approx(inf.value()).epsilon(1e-4));
    CHECK(moser_K3(1.0 + 1e-9, 3.0, 3, 1.0, 0.5, 1.0, s2).log_value > moser_K3(1.5, 3.0, 3, 1.0, 0.5, 1.0, s2).log_value);
    CHECK(moser_K3(2.0, 3.0, 3, 1.0, 0.5, 2.0, s2).log_value > moser_K3(2.0, 3.0, 3, 1.0, 0.5, 1.0, s2).log_value);
    CHECK_THROWS_AS(moser_K3(1.0, 3.0, 3, 1.0, 0.5, 1.0, s2), RegimeError);
}

TEST_CASE("De Giorgi constant") {
    CHECK(degiorgi_c(1.0, 0.5, 0.0) == doctest::Approx(2.0));
    for (double a : {1.0, 1.5, 2.0, 4.0}) {
        const double th = 0.5;
        const double lam = std::pow((1.0 + th) / 2.0, 1.0 / a);
        CHECK(degiorgi_c(a, lam, th) <= 3.0 * std::pow(4.0 * a, a));
    }
    CHECK(degiorgi_c(1.0, 0.5 + 1e-9, 0.5) > 1e8);
    CHECK_THROWS_AS(degiorgi_c(1.0, 0.4, 0.5), RegimeError);
}

TEST_CASE("extension constant") {
    const double K = 7.0;
    const double g = 1.5;
    const ConstantValue c = extension_constant(4.0, 2.0, 2.0, g, K, 1.0, 0.5);
    // q0 = q_under: the power of 2 vanishes and the bracket exponent is 1
    CHECK(c.value() == doctest::Approx(3.0 * std::pow(4.0 * g, g) * K / std::pow(0.5, g)));
    CHECK(extension_constant(4.0, 2.0, 1.0, g, 2.0 * K, 1.0, 0.5).log_value >
          extension_constant(4.0, 2.0, 1.0, g, K, 1.0, 0.5).log_value);
    CHECK(std::isfinite(extension_constant(kInfinity, 2.0, 1.0, g, K, 1.0, 0.5).log_value));
    CHECK_THROWS(extension_constant(2.0, 4.0, 1.0, g, K, 1.0, 0.5));
}

TEST_CASE("A-constants branches") {
    const double R = 1.0;
    const double Ri = 0.25;
    const AConstants a = a_constants(2.0, 3.0, 3, R, Ri, sobolev_default(3));
    CHECK(a.superlinear_branch);
    CHECK(std::exp(a.log_A2) == doctest::Approx(16.0 * 5.0 + std::pow((R - Ri) / Ri, 2.0)));
    CHECK(!a_constants(1.0, 3.0, 3, R, Ri, sobolev_default(3)).superlinear_branch);
}

TEST_CASE("second form bracket") {
    const ProblemParams pp{3, 2.0, 1.0};
    const SecondForm f = second_form_bracket(pp, 0.25, 0.5, 0.75, 0.5, 3.0, 1.0, sobolev_default(3));
    CHECK(f.lambda_exponent == doctest::Approx(1.0));
    const SecondForm z = second_form_bracket(pp, 0.25, 0.5, 0.75, 0.5, 3.0, 0.0, sobolev_default(3));
    CHECK(z.log_bracket == doctest::Approx(z.a.log_A2));
    const SecondForm big = second_form_bracket(pp, 0.25, 0.5, 0.75, 0.5, 3.0, 2.0, sobolev_default(3));
    CHECK(big.log_multiplier > f.log_multiplier);
    CHECK_THROWS_AS(second_form_bracket(pp, 0.25, 0.5, 0.75, 0.5, 1.5, 1.0, 1.0), RegimeError);
}

TEST_CASE("John-Nirenberg constants") {
    const double R = 0.7;
    const double k2 = 3.0 * e;
    const JohnNirenberg j = jn_constants(3, 2.0 * R, omega(3) * std::pow(R, 3), k2);
    CHECK(j.kappa0 == doctest::Approx(3.0 * omega(3) * k2 / 8.0));
    CHECK(jn_constants(3, 1.0, 1.0, 2.0 * e + 1e-9).kappa1 > 1e8);
    CHECK(jn_constants(3, 2.0, 1.0, k2).kappa1 > jn_constants(3, 1.0, 1.0, k2).kappa1);
    CHECK_THROWS_AS(jn_constants(3, 1.0, 1.0, 2.0 * e), RegimeError);
}

TEST_CASE("q0 threshold") {
    CHECK(q0_threshold(3, 0.1) == doctest::Approx(1.0 / (3.0 * std::pow(4.0 * pi / 3.0, 2) * (2.0 * e + 0.1))));
    for (int d = 3; d <= 16; ++d) CHECK(q0_threshold(d, 0.2) < q0_threshold(d, 0.1));
    double best = kInfinity;
    double arg = 0.0;
    for (int i = 0; i <= 1500; ++i) {
        const double d = 1.0 + 0.01 * i;
        const double q = q0_threshold(d, 0.1);
        if (q < best) {
            best = q;
            arg = d;
        }
    }
    CHECK(arg > 5.0);
    CHECK(arg < 6.0);
}

TEST_CASE("lower constant I_-inf,q") {
    for (int d : {3, 4, 5})
        for (double eps : {0.05, 0.1, 1.0})
            for (double frac : {0.1, 0.5, 1.0}) {
                const double q = frac * q0_threshold(d, eps);
                const double v = lower_I(d, q, eps, 1.0, 0.4, 1.0).log_value;
                CHECK(std::isfinite(v));
                CHECK(v < 0.0);
            }
    CHECK(lower_I(3, 0.001, 0.1, 1.0, 1e-3, 1.0).log_value < lower_I(3, 0.001, 0.1, 1.0, 0.1, 1.0).log_value);
    CHECK(lower_I(3, 0.0005, 0.1, 1.0, 0.5, 1.0).log_value < lower_I(3, 0.001, 0.1, 1.0, 0.5, 1.0).log_value);
    CHECK_THROWS_AS(lower_I(3, 2.0 * q0_threshold(3, 0.1), 0.1, 1.0, 0.5, 1.0), RegimeError);
}

TEST_CASE("reverse Hoelder constant for 1<p<p_c") {
    const double qo = 2.0;
    for (double rb : {0.1, 0.3, 0.5}) CHECK(rev_holder_I(3, 2.0, qo, qo, rb, 1.0, 1.0).value() >= 1.0);
    const double edge = (3.0 - 2.0) * qo / 3.0;
    CHECK(std::isfinite(rev_holder_I(3, 2.0, qo, edge, 0.5, 1.0, 1.0).log_value));
    CHECK(std::isfinite(rev_holder_I(3, 2.0, qo, edge * (1.0 + 1e-9), 0.5, 1.0, 1.0).log_value));
    CHECK(rev_holder_I(3, 2.0, qo, 0.3, 0.5, 1.0, 2.0).log_value > rev_holder_I(3, 2.0, qo, 0.3, 0.5, 1.0, 1.0).log_value);
    CHECK_THROWS_AS(rev_holder_I(3, 2.0, 1.4, 1.0, 0.5, 1.0, 1.0), RegimeError);
    CHECK_THROWS_AS(rev_holder_I(3, 2.0, 3.1, 1.0, 0.5, 1.0, 1.0), RegimeError);
}

TEST_CASE("Harnack constant, sublinear regime") {
    const ProblemParams pp{3, 0.5, 1.0};
    const RadiiChain ch{0.25, 0.5, 0.75, 0.875};
    const HarnackValue h = harnack_constant(pp, ch, {}, std::nullopt, sobolev_default(3));
    REQUIRE(h.n0);
    const double w = omega(3);
    const int n0 = int(std::floor(std::log(e * 2.0 * 3.0 * w * w / 1.0) / std::log(3.0) + 1.5));
    CHECK(*h.n0 == n0);
    CHECK(*h.q0 == doctest::Approx(std::pow(1.0 / 3.0, n0 - 0.5)));
    CHECK(std::isfinite(h.log_value));
    CHECK(h.log_value > 0.0);
}

TEST_CASE("Harnack constant, 1<p<p_c regime") {
    const ProblemParams pp{3, 2.0, 1.0};
    const RadiiChain ch{0.25, 0.5, 0.75, 0.875};
    const double s2 = sobolev_default(3);
    const HarnackValue h = harnack_constant(pp, ch, {}, std::nullopt, s2);
    CHECK(h.regime == HarnackRegime::Subcritical);
    const double qo = h.q_over;
    const double qu = h.q_under;
    CHECK(qo > 1.5);
    CHECK(qo < 3.0);
    const double ui = upper_I_inf(pp, 0.25 / 0.5, qo, s2).log_value;
    const double li = lower_I(3, qu, e, 0.75, 0.25, s2).log_value;
    const double ri = rev_holder_I(3, 2.0, qo, qu, 0.5, 0.75, s2, RevHolderForm::LowerBound).log_value;
    CHECK(h.log_value == doctest::Approx(ui + 2.0 * qo / (2.0 * qo - 3.0) * (ri - li)).epsilon(1e-14));
}

TEST_CASE("Harnack constant, general regime") {
    const ProblemParams pp{3, 4.0, 1.0};
    const RadiiChain ch{0.25, 0.5, 0.75, 0.875};
    const double s2 = sobolev_default(3);
    CHECK_THROWS_AS(harnack_constant(pp, ch, {}, std::nullopt, s2), RegimeError);
    // a constant function makes every mean quotient equal to one
    const HarnackValue h = harnack_constant(pp, ch, {}, HarnackNorms{0.0, 0.0, 0.0}, s2);
    const ExponentWindow w = harnack_window(pp, {});
    const double ui = upper_I_inf(pp, ch.rho(), *w.q_over, s2).log_value;
    const double li = lower_I(3, *w.q_under, 0.1, 0.75, 0.25, s2).log_value;
    CHECK(h.log_value == doctest::Approx(ui - li).epsilon(1e-14));
    CHECK_THROWS_AS(harnack_constant({3, 5.0, 1.0}, ch, {}, HarnackNorms{}, s2), RegimeError);
}

TEST_CASE("absolute bounds") {
    const RadiiChain ch{0.25, 0.5, 0.75, 0.875};
    const double s2 = sobolev_default(3);
    const AbsoluteBounds one = absolute_bounds({3, 1.0, 1.0}, ch, {}, s2);
    CHECK(!one.log_upper);
    CHECK(!one.log_lower);
    CHECK(one.reason == "No");
    const AbsoluteBounds u1 = absolute_bounds({3, 2.0, 1.0}, ch, {}, s2);
    const AbsoluteBounds u2 = absolute_bounds({3, 2.0, 2.0}, ch, {}, s2);
    CHECK(*u2.log_upper < *u1.log_upper);
    const AbsoluteBounds l1 = absolute_bounds({3, 0.5, 1.0}, ch, {}, s2);
    const AbsoluteBounds l2 = absolute_bounds({3, 0.5, 2.0}, ch, {}, s2);
    CHECK(*l2.log_lower > *l1.log_lower);
    CHECK(absolute_bounds({3, 0.0, 1.0}, ch, {}, s2).log_lower);
    CHECK(!absolute_bounds({3, 4.0, 1.0}, ch, {}, s2).log_upper);
}

TEST_CASE("b_p branches") {
    const RadiiChain ch{0.25, 0.5, 0.75, 0.875};
    CHECK(bp_bound({3, 1.0, 1.0}, ch, std::nullopt, std::nullopt) == 1.0);
    CHECK(bp_bound({5, 2.0, 1.0}, ch, std::nullopt, 3.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(bp_bound({5, 2.0, 1.0}, ch, std::nullopt, std::nullopt), RegimeError);
    CHECK_THROWS_AS(bp_bound({3, 2.0, 1.0}, ch, std::nullopt, std::nullopt), RegimeError);
    CHECK(log_bp_bound({3, 2.0, 1.0}, ch, 20000.0, std::nullopt) > 19000.0);
}

TEST_CASE("absolute gradient constant from the general one") {
    const ProblemParams pp{3, 2.0, 1.0};
    const RadiiChain ch{0.5, std::nullopt, 1.0, std::nullopt};
    const double s2 = sobolev_default(3);
    const HarnackValue h = harnack_constant(pp, RadiiChain{0.5, 0.75, 1.0, std::nullopt}, {}, std::nullopt, s2);
    const double log_bp = log_bp_bound(pp, ch, h.log_value, std::nullopt);
    const double log_K = gradient_K_log(pp, ch, log_bp, s2).log_value;
    // ‖u‖_{2,R0} <= |B_R0|^{1/2} · (absolute sup bound at R_inf)
    const double log_sup = h.log_value + (std::log(8.0) - std::log(0.25) - 3.0 * std::log(0.5)) / 1.0;
    const double by_hand = log_K + 0.5 * log_omega(3) + log_sup;
    CHECK(gradient_K_absolute(pp, ch, h.log_value, s2).log_value == doctest::Approx(by_hand).epsilon(1e-12));
    CHECK(std::fabs(gradient_K_absolute_variant(pp, ch, h.log_value, s2).log_value - by_hand) > 0.1);
    CHECK_THROWS_AS(gradient_K_absolute({3, 4.0, 1.0}, ch, h.log_value, s2), RegimeError);
}

TEST_CASE("constants are finite and positive on random admissible tuples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const int d = 3 + int(U(rng) * 6.0);
        const CriticalExponents ce = critical_exponents(d);
        const double p = U(rng) * (ce.p_s - 1e-3);
        const double lam = 0.1 + 10.0 * U(rng);
        const double R0 = 0.1 + 5.0 * U(rng);
        const double Ri = R0 * (0.05 + 0.9 * U(rng));
        const double s2 = 0.2 + 2.0 * U(rng);
        const double q = nudge_q(d, p, q_bar(d, p) + 0.05 + 5.0 * U(rng)).q;
        const double eps = 0.01 + U(rng);
        const double ql = q0_threshold(d, eps) * (0.01 + 0.99 * U(rng));
        const double vals[] = {
            upper_I_inf({d, p, lam}, Ri / R0, q, s2).log_value,
            lower_I(d, ql, eps, R0, Ri, s2).log_value,
            caccioppoli_rhs(d, R0, Ri).log_value,
            moser_K3(1.0 + q, d + 1.0, d, R0, Ri, lam, s2).log_value,
        };
        for (double v : vals)
            if (!std::isfinite(v)) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("inadmissible tuples raise typed errors") {
    CHECK_THROWS_AS(upper_I_inf({3, 2.0, 1.0}, 0.5, 1.0, 1.0), RegimeError);
    CHECK_THROWS_AS(lower_I(3, 1.0, 0.1, 1.0, 0.5, 1.0), RegimeError);
    CHECK_THROWS_AS(young_K1(1.0, 3), RegimeError);
    CHECK_THROWS_AS(moser_K3(0.5, 3.0, 3, 1.0, 0.5, 1.0, 1.0), RegimeError);
}

TEST_CASE("scale homogeneity of the ratio-only constants") {
    const double s2 = sobolev_default(4);
    const double ql = 0.5 * q0_threshold(4, 0.1);
    for (double s : {0.01, 3.0, 1000.0}) {
        CHECK(lower_I(4, ql, 0.1, s * 1.0, s * 0.3, s2).log_value ==
              doctest::Approx(lower_I(4, ql, 0.1, 1.0, 0.3, s2).log_value).epsilon(1e-13));
    }
}

TEST_CASE("constants containing S2 are nondecreasing in it") {
    const ProblemParams pp{3, 2.0, 1.0};
    const RadiiChain ch{0.25, 0.5, 0.75, 0.875};
    double prev_I = -kInfinity;
    double prev_H = -kInfinity;
    double prev_K3 = -kInfinity;
    double prev_L = kInfinity;
    for (double s2 : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const double I = upper_I_inf(pp, 0.5, 2.3, s2).log_value;
        const double H = harnack_constant(pp, ch, {}, std::nullopt, s2).log_value;
        const double K3 = moser_K3(2.0, 3.0, 3, 1.0, 0.5, 1.0, s2).log_value;
        const double L = lower_I(3, 0.001, 0.1, 1.0, 0.5, s2).log_value;
        CHECK(I >= prev_I);
        CHECK(H >= prev_H);
        CHECK(K3 >= prev_K3);
        // I_-inf multiplies the lower side, so a larger S2 weakens it by shrinking
        CHECK(L <= prev_L);
        prev_I = I;
        prev_H = H;
        prev_K3 = K3;
        prev_L = L;
    }
}
