#include "orbtune/controller.hpp"

#include <cmath>

namespace orbtune {

namespace {

constexpr double kSingularTol = 1e-12;

// Everything the control law needs at one state, in GainScale units.
struct Eval {
    CoefficientSet cs;
    double n = 0.0;   // canonical mean motion of the reference
    double s = 0.0;   // x3 + 1 + zetaXr
    double xi = 0.0;
    double dxi_dx1 = 0.0;
    double dxi_dx3 = 0.0;
    double dxi_dpsi1r = 0.0;
    double z4 = 0.0;  // x4 - xi
};

Eval evaluate(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K,
              const GainScale& scale) {
    if (!(scale.lengthKm > 0.0)) throw DomainError("controller: gain scale must be positive");
    Eval ev;
    ev.cs = scaled_coefficients(x, psi_r, scale);
    const CoefficientSet& cs = ev.cs;
    ev.s = x[2] + 1.0 + cs.zetaXr;
    const double pu = psi_r.p / scale.lengthKm;
    ev.n = std::sqrt(1.0 / (pu * pu * pu));
    if (std::abs(cs.F12) < kSingularTol)
        throw SingularityError("controller: F12 = 0 (x3 + 1 + zetaXr vanishes)");

    const double sx1 = std::sin(x[0]);
    const double cx1 = std::cos(x[0]);
    const double A = K[0] * cs.G41 * cs.F13 * sx1 + (K[2] * cs.G41 - cs.F33) * x[2];
    ev.xi = A / cs.F12;
    ev.z4 = x[3] - ev.xi;

    ev.dxi_dx1 = K[0] * cs.G41 * cs.F13 * cx1 / cs.F12;

    // dF13/dx3 = n, dF33/dx3 = n zetaYr, dF12/dx3 = 2 n s
    const double dA_dx3 = K[0] * cs.G41 * ev.n * sx1 + (K[2] * cs.G41 - cs.F33) - x[2] * ev.n * cs.zetaYr;
    ev.dxi_dx3 = dA_dx3 / cs.F12 - 2.0 * A * ev.n * ev.s / (cs.F12 * cs.F12);

    // d(zetaXr)/dpsi1r = -zetaYr, d(zetaYr)/dpsi1r = zetaXr
    const double dA_dp1 = -2.0 * K[0] * cs.G41 * ev.n * cs.zetaYr * sx1 -
                          x[2] * (cs.F13 * cs.zetaXr - 2.0 * ev.n * cs.zetaYr * cs.zetaYr);
    const double dF12_dp1 = -2.0 * ev.n * ev.s * cs.zetaYr;
    ev.dxi_dpsi1r = dA_dp1 / cs.F12 - A * dF12_dp1 / (cs.F12 * cs.F12);
    return ev;
}

Vector6 gradient(const ErrorState& x, const Gains& K, const Eval& ev) {
    Vector6 g;
    g[0] = K[0] * ev.cs.G41 * std::sin(x[0]) - ev.z4 * ev.dxi_dx1;
    g[1] = x[1];
    g[2] = x[2] - ev.z4 * ev.dxi_dx3;
    g[3] = ev.z4;
    g[4] = x[4];
    g[5] = x[5];
    return g;
}

// Total xi derivative per canonical time unit; u_h in canonical accel units.
double xi_dot_scaled(const ErrorState& x, const EquinoctialState& psi_r, const Eval& ev,
                     double u_h_scaled) {
    const Vector6 H = normal_influence(x, psi_r, ev.cs.G22);
    const double x1dot = ev.cs.F12 * x[1] + ev.cs.F13 * x[2] + H[0] * u_h_scaled;
    const double x3dot = -ev.cs.F33 * x[2] - ev.cs.F12 * x[3];
    const double psi1rdot = ev.n * (1.0 + ev.cs.zetaXr) * (1.0 + ev.cs.zetaXr);
    return ev.dxi_dx1 * x1dot + ev.dxi_dx3 * x3dot + ev.dxi_dpsi1r * psi1rdot;
}

}  // namespace

double GainScale::timeUnit(double mu) const {
    return std::sqrt(lengthKm * lengthKm * lengthKm / mu);
}

double GainScale::accelUnit(double mu) const {
    const double tu = timeUnit(mu);
    return lengthKm / (tu * tu);
}

CoefficientSet scaled_coefficients(const ErrorState& x, const EquinoctialState& psi_r,
                                   const GainScale& scale) {
    psi_r.requireValid("scaled_coefficients");
    if (!(scale.lengthKm > 0.0))
        throw DomainError("scaled_coefficients: gain scale must be positive");
    CoefficientSet cs;
    reference_projections(psi_r, cs.zetaXr, cs.zetaYr);
    const double pu = psi_r.p / scale.lengthKm;
    const double n = std::sqrt(1.0 / (pu * pu * pu));
    const double s = x[2] + 1.0 + cs.zetaXr;
    if (std::abs(s) < kSingularTol)
        throw SingularityError("scaled_coefficients: x3 + 1 + zetaXr = 0");
    cs.F12 = n * s * s;
    cs.F13 = n * (x[2] + 2.0 + 2.0 * cs.zetaXr);
    cs.F42 = n * (x[1] + 2.0) * s * s * s;
    cs.F33 = cs.F13 * cs.zetaYr;
    cs.F43 = cs.F13 * cs.zetaXr;
    cs.G41 = std::sqrt(pu);
    cs.G22 = cs.G41 / s;
    return cs;
}

double xi(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K, double mu,
          const GainScale& scale) {
    (void)mu;
    return evaluate(x, psi_r, K, scale).xi;
}

double xi_dot(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K, double u_h,
              double mu, const GainScale& scale) {
    const Eval ev = evaluate(x, psi_r, K, scale);
    const double u_h_scaled = u_h / scale.accelUnit(mu);
    return xi_dot_scaled(x, psi_r, ev, u_h_scaled) / scale.timeUnit(mu);
}

double lyapunov(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K, double mu,
                const GainScale& scale) {
    (void)mu;
    const Eval ev = evaluate(x, psi_r, K, scale);
    return K[0] * ev.cs.G41 * (1.0 - std::cos(x[0])) +
           0.5 * (x[1] * x[1] + x[2] * x[2] + ev.z4 * ev.z4 + x[4] * x[4] + x[5] * x[5]);
}

Vector6 lyapunov_gradient(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K,
                          double mu, const GainScale& scale) {
    (void)mu;
    const Eval ev = evaluate(x, psi_r, K, scale);
    return gradient(x, K, ev);
}

ControlOutput control(const ErrorState& x, const EquinoctialState& psi_r, const Gains& K,
                      double mu, const GainScale& scale) {
    K.requirePositive("control");
    if (std::abs(x[1] + 1.0) < kSingularTol)
        throw SingularityError("control: x2 + 1 = 0");
    const Eval ev = evaluate(x, psi_r, K, scale);
    const CoefficientSet& cs = ev.cs;

    ControlOutput out;
    out.xi = ev.xi;
    out.V = K[0] * cs.G41 * (1.0 - std::cos(x[0])) +
            0.5 * (x[1] * x[1] + x[2] * x[2] + ev.z4 * ev.z4 + x[4] * x[4] + x[5] * x[5]);

    // dV/dx H with xi entering V as the offset state x4 - xi, not chain-ruled
    // through x1 and x3: rows 2..4 of H are zero and the x4 row of the offset
    // dynamics carries no u_h (the xi_dot feedforward in u_r cancels it), so
    //   V̇ = -K2 G41 x2^2 - K3 G41 x3^2 - K4 G41 (x4-xi)^2 - (K5/G41) (dV/dx H)^2
    // holds for every positive gain vector. Contracting the full composed
    // gradient instead adds an indefinite z4 dxi/dx1 H1 cross term and loses
    // the guarantee.
    const Vector6 H = normal_influence(x, psi_r, cs.G22);
    out.gradVH = K[0] * cs.G41 * std::sin(x[0]) * H[0] + x[4] * H[4] + x[5] * H[5];

    // u_h first: the x1 row of the dynamics feeds xi_dot through it. u_theta
    // never enters xi_dot (xi is independent of x2), u_r is needed last.
    const double u_h_scaled = -K[4] / cs.G41 * out.gradVH;
    const double xid = xi_dot_scaled(x, psi_r, ev, u_h_scaled);
    const double u_r_scaled = -(cs.F43 * x[2] - xid) / cs.G41 - K[3] * ev.z4;
    const double u_t_scaled = -K[0] * (cs.G41 * cs.F12 / cs.G22) * std::sin(x[0]) -
                              (cs.F42 / cs.G22) * ev.z4 - K[1] * (cs.G41 / cs.G22) * x[1];

    const double aUnit = scale.accelUnit(mu);
    out.u_r = u_r_scaled * aUnit;
    out.u_theta = u_t_scaled * aUnit;
    out.u_h = u_h_scaled * aUnit;
    out.xi_dot = xid / scale.timeUnit(mu);
    return out;
}

}  // namespace orbtune
