#include "qlb/cutoff.hpp"

#include <algorithm>
#include <cmath>

#include "qlb/errors.hpp"

namespace qlb {

CutoffProfile make_cutoff(double r1, double r0, int d) {
    if (!(r1 >= 0.0) || !(r0 > r1) || !std::isfinite(r0)) {
        throw GeometryError("cutoff needs 0 <= R1 < R0");
    }
    if (d < 1) throw RegimeError("cutoff needs d >= 1");
    return CutoffProfile{r1, r0, d};
}

CutoffValue cutoff_eval(const CutoffProfile& c, double r) {
    if (r < 0.0) throw DomainError("cutoff radius must be >= 0");
    const double w = c.width();
    const double w2 = w * w;
    CutoffValue v;
    if (r <= c.r1) {
        v.phi = 1.0;
        return v;
    }
    if (r > c.r0) return v;
    if (r <= c.midpoint()) {
        const double t = r - c.r1;
        v.phi = 1.0 - 2.0 * t * t / w2;
        v.dphi = -4.0 * t / w2;
        v.d2phi = -4.0 / w2;
    } else {
        const double t = c.r0 - r;
        v.phi = 2.0 * t * t / w2;
        v.dphi = -4.0 * t / w2;
        v.d2phi = 4.0 / w2;
    }
    v.lap = v.d2phi + (c.d - 1) * v.dphi / r;
    return v;
}

double cutoff_grad_sq_over_phi(const CutoffProfile& c, double r) {
    const double w2 = c.width() * c.width();
    if (r <= c.r1 || r > c.r0) return 0.0;
    if (r > c.midpoint()) return 8.0 / w2;
    const CutoffValue v = cutoff_eval(c, r);
    return v.dphi * v.dphi / v.phi;
}

CutoffBounds cutoff_bounds(const CutoffProfile& c) {
    const double w = c.width();
    const double w2 = w * w;
    const double m = c.midpoint();
    const double ratio = (c.d - 1) * 0.5 * w / m;
    CutoffBounds b;
    b.sup_grad = 2.0 / w;
    // Inner piece: |Δφ| = 4/w² (1 + (d-1)(r-R1)/r), increasing in r.
    b.sup_lap_inner = 4.0 / w2 * (1.0 + ratio);
    // Outer piece: Δφ = 4/w² (1 - (d-1)(R0-r)/r), increasing from its value at mid+ up to 4/w².
    b.sup_lap_outer = 4.0 / w2 * std::max(1.0, std::fabs(1.0 - ratio));
    b.sup_lap = std::max(b.sup_lap_inner, b.sup_lap_outer);
    b.grad_bound = 4.0 / w;
    b.lap_bound = 4.0 * c.d / w2;
    b.certified = b.sup_grad <= b.grad_bound && b.sup_lap <= b.lap_bound;
    return b;
}

}  // namespace qlb
