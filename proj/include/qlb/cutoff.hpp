#pragma once

namespace qlb {

// Radial piecewise-quadratic cutoff: 1 on [0, R1], 0 beyond R0, two quadratic pieces
// joined at the midpoint with matching slope.
struct CutoffProfile {
    double r1 = 0.0;
    double r0 = 1.0;
    int d = 3;

    double width() const { return r0 - r1; }
    double midpoint() const { return 0.5 * (r0 + r1); }
};

// Throws GeometryError unless 0 <= R1 < R0, and RegimeError for d < 1.
CutoffProfile make_cutoff(double r1, double r0, int d);

struct CutoffValue {
    double phi = 0.0;
    double dphi = 0.0;   // φ'(r)
    double d2phi = 0.0;  // φ''(r)
    double lap = 0.0;    // φ'' + (d-1)φ'/r
};

CutoffValue cutoff_eval(const CutoffProfile& c, double r);

// |∇φ|²/φ, finite everywhere; the outer piece is the constant 8/(R0-R1)^2.
double cutoff_grad_sq_over_phi(const CutoffProfile& c, double r);

struct CutoffBounds {
    double sup_grad = 0.0;       // 2/(R0-R1), attained at the midpoint
    double sup_lap = 0.0;        // max over both pieces
    double sup_lap_inner = 0.0;  // sup over (R1, mid]
    double sup_lap_outer = 0.0;  // sup over (mid, R0]
    double grad_bound = 0.0;     // 4/(R0-R1)
    double lap_bound = 0.0;      // 4d/(R0-R1)^2
    bool certified = false;
};

CutoffBounds cutoff_bounds(const CutoffProfile& c);

}  // namespace qlb
