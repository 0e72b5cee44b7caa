#pragma once

#include <functional>
#include <vector>

namespace qlb {

using Integrand = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
    bool converged = false;
};

struct QuadOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_intervals = 4000;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]. The error estimate is |K15 - G7| per panel.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt = {});

// Adaptive integration split at the given interior breakpoints (sorted, inside (a, b)).
QuadResult integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                     const QuadOptions& opt = {});

// ∫_0^b f(r) dr through r = b t^s, which smooths integrands behaving like r^{-κ} at 0.
QuadResult integrate_graded(const Integrand& f, double b, double grading, const QuadOptions& opt = {});

// Fixed composite Gauss-Legendre with `panels` equal panels of `points` nodes (points in 1..5).
double composite_gauss_legendre(const Integrand& f, double a, double b, int panels, int points = 3);

}  // namespace qlb
