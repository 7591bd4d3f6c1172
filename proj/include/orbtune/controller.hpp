#ifndef ORBTUNE_CONTROLLER_HPP
#define ORBTUNE_CONTROLLER_HPP

#include "orbtune/transform.hpp"
#include "orbtune/types.hpp"

namespace orbtune {

/// Unit system in which the controller family interprets its gain values.
///
/// The control law is scale-covariant: evaluating its coefficient formulas
/// with lengths measured in units of `lengthKm` (and times in the matching
/// canonical unit sqrt(lengthKm^3/mu)) is equivalent to rescaling the gain
/// vector. The published gain values only produce well-conditioned closed
/// loops for scales well below the orbit radius, so the scale is an explicit
/// part of the controller parametrization rather than a hard-coded unit.
struct GainScale {
    double lengthKm = 1.0e4;

    double timeUnit(double mu) const;   // s per canonical time unit
    double accelUnit(double mu) const;  // km/s^2 per canonical accel unit

    static GainScale referenceOrbit(const EquinoctialState& psi_r) {
        return GainScale{psi_r.p};
    }
};

/// Coefficients of the transformed dynamics evaluated in GainScale units
/// (dimensionless lengths, canonical time). Same algebraic forms as
/// error_coefficients.
CoefficientSet scaled_coefficients(const ErrorState& x, const EquinoctialState& psi_r,
                                   const GainScale& scale);

/// Internal controller signal
///   xi = (K1 G41 F13 sin(x1) - F33 x3 + K3 G41 x3) / F12,
/// dimensionless, evaluated in GainScale units.
double xi(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K, double mu,
          const GainScale& scale);

/// Total time derivative of xi along the closed-loop flow, per second.
/// Includes the x1 and x3 rows of the transformed dynamics (x1's normal-
/// channel term requires u_h, km/s^2) and the explicit dependence on the
/// advancing reference longitude. xi does not depend on x2, so u_theta never
/// enters.
double xi_dot(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K, double u_h,
              double mu, const GainScale& scale);

/// Lyapunov value V = K1 G41 (1 - cos x1) + (x2^2 + x3^2 + (x4-xi)^2 + x5^2 + x6^2)/2.
double lyapunov(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K, double mu,
                const GainScale& scale);

/// Row vector dV/dx, including the xi sensitivities through (x4 - xi)^2.
Vector6 lyapunov_gradient(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K,
                          double mu, const GainScale& scale);

/// Full control evaluation. Computes, in order, the coefficients, xi, dV/dx,
/// u_h = -K5 (dV/dx H)/G41, xi_dot given u_h, then u_r and u_theta.
/// Accelerations are returned in km/s^2, xi_dot per second.
ControlOutput control(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K,
                      double mu, const GainScale& scale);

}  // namespace orbtune

#endif
