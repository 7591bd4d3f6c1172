#ifndef ORBTUNE_DYNAMICS_HPP
#define ORBTUNE_DYNAMICS_HPP

#include "orbtune/types.hpp"

namespace orbtune {

/// zeta_X = eX cos L + eY sin L evaluated at the state's own longitude.
double zetaX(const EquinoctialState& psi);

/// Unforced element rates f(psi) [element/s]. Only the true longitude moves:
/// component 0 is sqrt(mu/p^3) (1 + zeta_X)^2, components 1..5 are zero.
Vector6 unforced_rate(const EquinoctialState& psi, double mu);

/// Control influence matrix g(psi) mapping [u_r, u_theta, u_h] (km/s^2) to
/// element rates. Singular in the rectilinear limit 1 + zeta_X = 0.
Matrix63 control_influence(const EquinoctialState& psi, double mu);

/// Advance the reference by t seconds along its unforced orbit. Elements
/// 2..6 are untouched; L integrates the scalar ODE
///   dL/dt = sqrt(mu/p^3) (1 + eX cos L + eY sin L)^2,
/// closed-form for circular references, fixed-step RK4 otherwise.
EquinoctialState propagate_reference(const EquinoctialState& psi_r0, double t, double mu);

/// Keplerian -> equinoctial. Throws for i = pi (tan(i/2) singular).
EquinoctialState keplerian_to_equinoctial(const KeplerianElements& kep);

/// Equinoctial -> inertial Cartesian state of the osculating two-body orbit.
CartesianState equinoctial_to_cartesian(const EquinoctialState& psi, double mu);

}  // namespace orbtune

#endif
