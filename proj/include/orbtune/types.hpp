#ifndef ORBTUNE_TYPES_HPP
#define ORBTUNE_TYPES_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace orbtune {

using Vector3 = Eigen::Vector3d;
using Vector5 = Eigen::Matrix<double, 5, 1>;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix63 = Eigen::Matrix<double, 6, 3>;

/// Gravitational parameter and body radius, km^3/s^2 and km.
struct GravConstants {
    double mu = 398600.4418;
    double earthRadius = 6378.137;
};

inline constexpr double kMuEarth = 398600.4418;
inline constexpr double kEarthRadiusKm = 6378.137;

/// Thrown when a state reaches a coefficient singularity (denominator ~ 0).
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an input leaves the domain of a transformation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Equinoctial orbital elements [L, p, eX, eY, hX, hY].
/// L: true longitude [rad]; p: semi-parameter [km]; (eX, eY): eccentricity
/// vector; (hX, hY): inclination vector. Elliptic orbits only.
struct EquinoctialState {
    double L = 0.0;
    double p = 0.0;
    double eX = 0.0;
    double eY = 0.0;
    double hX = 0.0;
    double hY = 0.0;

    Vector6 asVector() const {
        Vector6 v;
        v << L, p, eX, eY, hX, hY;
        return v;
    }
    static EquinoctialState fromVector(const Vector6& v) {
        return EquinoctialState{v[0], v[1], v[2], v[3], v[4], v[5]};
    }

    bool valid() const {
        return std::isfinite(L) && std::isfinite(p) && std::isfinite(eX) &&
               std::isfinite(eY) && std::isfinite(hX) && std::isfinite(hY) &&
               p > 0.0 && eX * eX + eY * eY < 1.0;
    }
    void requireValid(const char* who) const {
        if (!valid()) throw DomainError(std::string(who) + ": invalid equinoctial state");
    }
};

/// Classical Keplerian elements (a [km], e, i [rad], raan [rad], argp [rad], nu [rad]).
struct KeplerianElements {
    double a = 0.0;
    double e = 0.0;
    double i = 0.0;
    double raan = 0.0;
    double argp = 0.0;
    double nu = 0.0;

    bool valid() const {
        return std::isfinite(a) && std::isfinite(e) && std::isfinite(i) && std::isfinite(raan) &&
               std::isfinite(argp) && std::isfinite(nu) && a > 0.0 && e >= 0.0 && e < 1.0 &&
               i >= 0.0 && i < M_PI;
    }
};

/// Inertial position [km] and velocity [km/s].
struct CartesianState {
    Vector3 r = Vector3::Zero();
    Vector3 v = Vector3::Zero();
};

/// Tracking error x = [x1..x6] in the transformed coordinates.
/// x1 [rad], x2..x6 dimensionless; the transform requires x2 > -1.
struct ErrorState {
    Vector6 x = Vector6::Zero();

    double operator[](int i) const { return x[i]; }
    double& operator[](int i) { return x[i]; }
};

/// Controller gain vector K = [K1..K5]; stability requires every entry > 0.
struct Gains {
    Vector5 K = Vector5::Zero();

    Gains() = default;
    explicit Gains(const Vector5& k) : K(k) {}
    Gains(double k1, double k2, double k3, double k4, double k5) { K << k1, k2, k3, k4, k5; }

    double operator[](int i) const { return K[i]; }
    double& operator[](int i) { return K[i]; }

    bool strictlyPositive() const { return (K.array() > 0.0).all() && K.allFinite(); }
    void requirePositive(const char* who) const {
        if (!strictlyPositive())
            throw DomainError(std::string(who) + ": gains must be strictly positive");
    }
};

/// Scalar coefficients of the transformed dynamics, plus the reference
/// eccentricity projections, evaluated at (x, psi_r).
struct CoefficientSet {
    double F12 = 0.0;
    double F13 = 0.0;
    double F33 = 0.0;
    double F42 = 0.0;
    double F43 = 0.0;
    double G22 = 0.0;
    double G41 = 0.0;
    double zetaXr = 0.0;
    double zetaYr = 0.0;
};

/// Full controller evaluation at one state: accelerations [km/s^2], the
/// internal signal xi and its time derivative [1/s], the Lyapunov value and
/// gradVH, the contraction dV/dx H driving the normal channel (taken in the
/// coordinates where x4 - xi is the state, which is what makes V decrease).
struct ControlOutput {
    double u_r = 0.0;
    double u_theta = 0.0;
    double u_h = 0.0;
    double xi = 0.0;
    double xi_dot = 0.0;
    double V = 0.0;
    double gradVH = 0.0;

    Vector3 accel() const { return Vector3(u_r, u_theta, u_h); }
};

}  // namespace orbtune

#endif
