#include "orbtune/dynamics.hpp"

#include <cmath>

namespace orbtune {

namespace {
constexpr double kSingularTol = 1e-12;
}

double zetaX(const EquinoctialState& psi) {
    return psi.eX * std::cos(psi.L) + psi.eY * std::sin(psi.L);
}

Vector6 unforced_rate(const EquinoctialState& psi, double mu) {
    psi.requireValid("unforced_rate");
    const double zX = zetaX(psi);
    Vector6 rate = Vector6::Zero();
    rate[0] = std::sqrt(mu / (psi.p * psi.p * psi.p)) * (1.0 + zX) * (1.0 + zX);
    return rate;
}

Matrix63 control_influence(const EquinoctialState& psi, double mu) {
    psi.requireValid("control_influence");
    const double c = std::cos(psi.L);
    const double s = std::sin(psi.L);
    const double zX = psi.eX * c + psi.eY * s;
    if (std::abs(1.0 + zX) < kSingularTol)
        throw SingularityError("control_influence: 1 + zeta_X = 0 (rectilinear limit)");
    const double qX = psi.eX + (2.0 + zX) * c;
    const double qY = psi.eY + (2.0 + zX) * s;
    const double eta = psi.hX * s - psi.hY * c;
    const double h2 = psi.hX * psi.hX + psi.hY * psi.hY;
    const double pref = std::sqrt(psi.p) / (std::sqrt(mu) * (1.0 + zX));

    Matrix63 g;
    g << 0.0,                 0.0,         eta,
         0.0,                 2.0 * psi.p, 0.0,
         (1.0 + zX) * s,      qX,          -eta * psi.eY,
         -(1.0 + zX) * c,     qY,          eta * psi.eX,
         0.0,                 0.0,         (1.0 + h2) / 2.0 * c,
         0.0,                 0.0,         (1.0 + h2) / 2.0 * s;
    return pref * g;
}

EquinoctialState propagate_reference(const EquinoctialState& psi_r0, double t, double mu) {
    psi_r0.requireValid("propagate_reference");
    EquinoctialState out = psi_r0;
    const double n = std::sqrt(mu / (psi_r0.p * psi_r0.p * psi_r0.p));
    if (psi_r0.eX == 0.0 && psi_r0.eY == 0.0) {
        out.L = psi_r0.L + n * t;
        return out;
    }
    // Fixed-step RK4 on the scalar longitude rate, ~512 steps per Kepler
    // period (closed-loop consistency tests need < 1e-9 rad/period).
    const double e2 = psi_r0.eX * psi_r0.eX + psi_r0.eY * psi_r0.eY;
    const double a = psi_r0.p / (1.0 - e2);
    const double period = 2.0 * M_PI * std::sqrt(a * a * a / mu);
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t) / (period / 512.0))));
    const double dt = t / static_cast<double>(steps);
    auto rate = [&](double L) {
        const double zX = psi_r0.eX * std::cos(L) + psi_r0.eY * std::sin(L);
        return n * (1.0 + zX) * (1.0 + zX);
    };
    double L = psi_r0.L;
    for (long k = 0; k < steps; ++k) {
        const double k1 = rate(L);
        const double k2 = rate(L + 0.5 * dt * k1);
        const double k3 = rate(L + 0.5 * dt * k2);
        const double k4 = rate(L + dt * k3);
        L += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.L = L;
    return out;
}

EquinoctialState keplerian_to_equinoctial(const KeplerianElements& kep) {
    if (!kep.valid()) throw DomainError("keplerian_to_equinoctial: invalid elements");
    if (std::abs(kep.i - M_PI) < 1e-9)
        throw SingularityError("keplerian_to_equinoctial: i = pi (tan(i/2) singular)");
    EquinoctialState psi;
    psi.p = kep.a * (1.0 - kep.e * kep.e);
    psi.eX = kep.e * std::cos(kep.argp + kep.raan);
    psi.eY = kep.e * std::sin(kep.argp + kep.raan);
    const double th = std::tan(kep.i / 2.0);
    psi.hX = th * std::cos(kep.raan);
    psi.hY = th * std::sin(kep.raan);
    psi.L = kep.raan + kep.argp + kep.nu;
    return psi;
}

CartesianState equinoctial_to_cartesian(const EquinoctialState& psi, double mu) {
    // Accepts any conic with p > 0: forced trajectories can pass through
    // osculating e >= 1 mid-maneuver, and the position/velocity formulas only
    // need the current branch radius p / (1 + zeta_X) to be positive.
    if (!psi.asVector().allFinite() || psi.p <= 0.0)
        throw DomainError("equinoctial_to_cartesian: non-finite state or p <= 0");
    const double cL = std::cos(psi.L);
    const double sL = std::sin(psi.L);
    const double f = psi.eX, g = psi.eY, h = psi.hX, k = psi.hY;
    const double alpha2 = h * h - k * k;
    const double s2 = 1.0 + h * h + k * k;
    const double w = 1.0 + f * cL + g * sL;
    if (w < kSingularTol)
        throw SingularityError("equinoctial_to_cartesian: 1 + zeta_X <= 0, radius unbounded");
    const double r = psi.p / w;
    const double smup = std::sqrt(mu / psi.p);

    CartesianState cs;
    cs.r[0] = (r / s2) * (cL + alpha2 * cL + 2.0 * h * k * sL);
    cs.r[1] = (r / s2) * (sL - alpha2 * sL + 2.0 * h * k * cL);
    cs.r[2] = (2.0 * r / s2) * (h * sL - k * cL);
    cs.v[0] = -(smup / s2) * (sL + alpha2 * sL - 2.0 * h * k * cL + g - 2.0 * f * h * k + alpha2 * g);
    cs.v[1] = -(smup / s2) * (-cL + alpha2 * cL + 2.0 * h * k * sL - f + 2.0 * g * h * k + alpha2 * f);
    cs.v[2] = (2.0 * smup / s2) * (h * cL + k * sL + f * h + g * k);
    return cs;
}

}  // namespace orbtune
