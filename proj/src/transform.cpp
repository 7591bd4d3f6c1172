#include "orbtune/transform.hpp"

#include <cmath>

#include "orbtune/dynamics.hpp"

namespace orbtune {

namespace {
constexpr double kSingularTol = 1e-12;
}

void reference_projections(const EquinoctialState& psi_r, double& zXr, double& zYr) {
    const double c = std::cos(psi_r.L);
    const double s = std::sin(psi_r.L);
    zXr = psi_r.eX * c + psi_r.eY * s;
    zYr = psi_r.eX * s - psi_r.eY * c;
}

ErrorState to_error_coords(const EquinoctialState& psi, const EquinoctialState& psi_r) {
    psi.requireValid("to_error_coords");
    psi_r.requireValid("to_error_coords");
    const double tp = psi.p - psi_r.p;
    if (tp + psi_r.p <= 0.0) throw DomainError("to_error_coords: chaser semi-parameter <= 0");

    ErrorState x;
    x[0] = psi.L - psi_r.L;
    x[1] = std::sqrt(1.0 + tp / psi_r.p) - 1.0;

    // Rotation block and the reference projections share the same scalar
    // expressions so that psi == psi_r cancels exactly.
    const double d1 = psi_r.p / (tp + psi_r.p);
    const double d2 = std::sqrt(psi_r.p / (tp + psi_r.p));
    const double c = std::cos(psi.L);
    const double s = std::sin(psi.L);
    const double v0 = psi.eX * c + psi.eY * s;
    const double v1 = psi.eX * s - psi.eY * c;
    double zXr, zYr;
    reference_projections(psi_r, zXr, zYr);
    x[2] = d1 * v0 - tp / (tp + psi_r.p) - zXr;
    x[3] = d2 * v1 - zYr;

    x[4] = psi.hX - psi_r.hX;
    x[5] = psi.hY - psi_r.hY;
    return x;
}

EquinoctialState from_error_coords(const ErrorState& x, const EquinoctialState& psi_r) {
    psi_r.requireValid("from_error_coords");
    if (!x.x.allFinite()) throw DomainError("from_error_coords: non-finite error state");
    if (x[1] <= -1.0) throw DomainError("from_error_coords: x2 <= -1, transform not invertible");

    double zXr, zYr;
    reference_projections(psi_r, zXr, zYr);
    const double b = x[1] + 1.0;
    EquinoctialState psi;
    psi.L = x[0] + psi_r.L;
    psi.p = psi_r.p * b * b;
    const double w0 = b * b * (x[2] + 1.0 + zXr) - 1.0;
    const double w1 = b * (x[3] + zYr);
    const double c = std::cos(psi.L);
    const double s = std::sin(psi.L);
    psi.eX = c * w0 + s * w1;
    psi.eY = s * w0 - c * w1;
    psi.hX = x[4] + psi_r.hX;
    psi.hY = x[5] + psi_r.hY;
    return psi;
}

CoefficientSet error_coefficients(const ErrorState& x, const EquinoctialState& psi_r, double mu) {
    psi_r.requireValid("error_coefficients");
    CoefficientSet cs;
    reference_projections(psi_r, cs.zetaXr, cs.zetaYr);
    const double n = std::sqrt(mu / (psi_r.p * psi_r.p * psi_r.p));
    const double s = x[2] + 1.0 + cs.zetaXr;
    if (std::abs(s) < kSingularTol)
        throw SingularityError("error_coefficients: x3 + 1 + zetaXr = 0");
    cs.F12 = n * s * s;
    cs.F13 = n * (x[2] + 2.0 + 2.0 * cs.zetaXr);
    cs.F42 = n * (x[1] + 2.0) * s * s * s;
    cs.F33 = cs.F13 * cs.zetaYr;
    cs.F43 = cs.F13 * cs.zetaXr;
    cs.G41 = std::sqrt(psi_r.p / mu);
    cs.G22 = cs.G41 / s;
    return cs;
}

Vector6 normal_influence(const ErrorState& x, const EquinoctialState& psi_r, double G22) {
    const double phi = x[0] + psi_r.L;
    const double h5 = x[4] + psi_r.hX;
    const double h6 = x[5] + psi_r.hY;
    const double eta = h5 * std::sin(phi) - h6 * std::cos(phi);
    const double h2 = h5 * h5 + h6 * h6;
    const double c = G22 / (x[1] + 1.0);
    Vector6 H = Vector6::Zero();
    H[0] = c * eta;
    H[4] = c * (1.0 + h2) / 2.0 * std::cos(phi);
    H[5] = c * (1.0 + h2) / 2.0 * std::sin(phi);
    return H;
}

Vector6 error_dynamics(const ErrorState& x, const EquinoctialState& psi_r, const Vector3& u,
                       double mu) {
    if (!x.x.allFinite() || !u.allFinite())
        throw DomainError("error_dynamics: non-finite input");
    if (std::abs(x[1] + 1.0) < kSingularTol)
        throw SingularityError("error_dynamics: x2 + 1 = 0");
    const CoefficientSet cs = error_coefficients(x, psi_r, mu);

    Vector6 xdot = Vector6::Zero();
    xdot[0] = cs.F12 * x[1] + cs.F13 * x[2];
    xdot[2] = -cs.F33 * x[2] - cs.F12 * x[3];
    xdot[3] = cs.F42 * x[1] + (cs.F12 + cs.F43) * x[2];

    xdot[1] += cs.G22 * u[1];
    xdot[3] += cs.G41 * u[0];

    xdot += normal_influence(x, psi_r, cs.G22) * u[2];
    return xdot;
}

double output_distance(const ErrorState& x, const EquinoctialState& psi_r, double mu) {
    const EquinoctialState psi = from_error_coords(x, psi_r);
    const CartesianState a = equinoctial_to_cartesian(psi, mu);
    const CartesianState b = equinoctial_to_cartesian(psi_r, mu);
    return (a.r - b.r).norm();
}

}  // namespace orbtune
