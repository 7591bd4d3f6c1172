#ifndef ORBTUNE_TRANSFORM_HPP
#define ORBTUNE_TRANSFORM_HPP

#include "orbtune/types.hpp"

namespace orbtune {

/// Reference eccentricity projections [zXr, zYr] = R(L_r) [eXr, -eYr].
void reference_projections(const EquinoctialState& psi_r, double& zXr, double& zYr);

/// Tracking-error coordinates x of the chaser psi relative to the reference
/// psi_r. Requires (psi - psi_r).p + psi_r.p > 0, i.e. a positive chaser
/// semi-parameter. Exact zero at psi == psi_r.
ErrorState to_error_coords(const EquinoctialState& psi, const EquinoctialState& psi_r);

/// Closed-form inverse of to_error_coords. Requires x2 > -1.
EquinoctialState from_error_coords(const ErrorState& x, const EquinoctialState& psi_r);

/// Coefficients of the transformed dynamics at (x, psi_r), km-s units.
/// Throws if the shared denominator x3 + 1 + zetaXr vanishes.
CoefficientSet error_coefficients(const ErrorState& x, const EquinoctialState& psi_r, double mu);

/// Normal-channel influence column H(x, psi_r) given G22 (rows 1..3 are zero).
Vector6 normal_influence(const ErrorState& x, const EquinoctialState& psi_r, double G22);

/// Error-state rate under forcing acceleration u = [u_r, u_theta, u_h] in
/// km/s^2: xdot = [F; 0] + [G; 0] [u_r, u_theta]^T + H u_h.
Vector6 error_dynamics(const ErrorState& x, const EquinoctialState& psi_r, const Vector3& u,
                       double mu);

/// Cartesian separation [km] between the chaser encoded by (x, psi_r) and the
/// reference. Requires x2 > -1 so the transform inverts.
double output_distance(const ErrorState& x, const EquinoctialState& psi_r, double mu);

}  // namespace orbtune

#endif
