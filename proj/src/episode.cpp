#include "orbtune/episode.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "orbtune/dynamics.hpp"

namespace orbtune {

namespace {

// Closed-loop state: [x1..x6, psi1r]. The reference's elements 2..6 are
// constant; only its longitude advances.
using LoopState = Eigen::Matrix<double, 7, 1>;

LoopState loop_rhs(const LoopState& state, const EquinoctialState& ref, const Gains& K,
                   double mu, const GainScale& scale) {
    ErrorState x;
    x.x = state.head<6>();
    EquinoctialState psi_r = ref;
    psi_r.L = state[6];

    const ControlOutput c = control(x, psi_r, K, mu, scale);
    const Vector6 xdot = error_dynamics(x, psi_r, c.accel(), mu);

    double zXr, zYr;
    reference_projections(psi_r, zXr, zYr);
    LoopState out;
    out.head<6>() = xdot;
    out[6] = std::sqrt(mu / (psi_r.p * psi_r.p * psi_r.p)) * (1.0 + zXr) * (1.0 + zXr);
    return out;
}

std::string describe(double t, const LoopState& s) {
    std::ostringstream os;
    os << "t=" << t << " s, x=[";
    for (int i = 0; i < 6; ++i) os << (i ? ", " : "") << s[i];
    os << "], psi1r=" << s[6];
    return os.str();
}

}  // namespace

std::pair<int, double> compute_cost(const std::vector<EpisodeSample>& samples,
                                    const CostParams& cost) {
    if (samples.empty()) throw DomainError("compute_cost: no samples");
    const int H = static_cast<int>(samples.size()) - 1;
    int lastViolation = -1;
    for (int k = H; k >= 0; --k) {
        if (samples[static_cast<size_t>(k)].y > cost.epsilon) {
            lastViolation = k;
            break;
        }
    }
    const int Hc = std::min(lastViolation + 1, H);
    double fuel = 0.0;
    for (int k = 0; k < Hc; ++k) fuel += cost.fuelScale * samples[static_cast<size_t>(k)].u.norm();
    return {Hc, static_cast<double>(Hc) + cost.rho * fuel};
}

EpisodeResult run_episode(const EquinoctialState& psi0, const EquinoctialState& psi_r0,
                          const Gains& K, const SimConfig& sim, const CostParams& cost,
                          double mu, const GainScale& scale) {
    if (!sim.valid()) throw DomainError("run_episode: invalid SimConfig");
    if (!cost.valid()) throw DomainError("run_episode: invalid CostParams");
    K.requirePositive("run_episode");

    const ErrorState x0 = to_error_coords(psi0, psi_r0);
    LoopState state;
    state.head<6>() = x0.x;
    state[6] = psi_r0.L;

    const double dt = sim.Ts / static_cast<double>(sim.substeps);
    EpisodeResult result;
    result.samples.reserve(static_cast<size_t>(sim.H) + 1);

    for (int k = 0; k <= sim.H; ++k) {
        const double t = static_cast<double>(k) * sim.Ts;
        ErrorState x;
        x.x = state.head<6>();
        EquinoctialState psi_r = psi_r0;
        psi_r.L = state[6];

        EpisodeSample sample;
        sample.k = k;
        sample.t = t;
        sample.x = x.x;
        try {
            const ControlOutput c = control(x, psi_r, K, mu, scale);
            sample.u = c.accel();
            sample.V = c.V;
            sample.y = output_distance(x, psi_r, mu);
        } catch (const std::exception& e) {
            throw EpisodeError(std::string("episode aborted at sample ") + std::to_string(k) +
                               " (" + describe(t, state) + "): " + e.what());
        }
        result.samples.push_back(sample);
        if (k == sim.H) break;

        for (int step = 0; step < sim.substeps; ++step) {
            LoopState k1, k2, k3, k4;
            try {
                k1 = loop_rhs(state, psi_r0, K, mu, scale);
                k2 = loop_rhs(state + 0.5 * dt * k1, psi_r0, K, mu, scale);
                k3 = loop_rhs(state + 0.5 * dt * k2, psi_r0, K, mu, scale);
                k4 = loop_rhs(state + dt * k3, psi_r0, K, mu, scale);
            } catch (const std::exception& e) {
                throw EpisodeError(std::string("episode aborted between samples ") +
                                   std::to_string(k) + " and " + std::to_string(k + 1) + " (" +
                                   describe(t + step * dt, state) + "): " + e.what());
            }
            state += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!state.allFinite())
                throw EpisodeError("episode state became non-finite between samples " +
                                   std::to_string(k) + " and " + std::to_string(k + 1));
        }
    }

    const auto [Hc, J] = compute_cost(result.samples, cost);
    result.Hc = Hc;
    result.J = J;
    result.converged = Hc < sim.H;
    result.fuelSum = cost.rho > 0.0 ? (J - Hc) / cost.rho : [&] {
        double fuel = 0.0;
        for (int k = 0; k < Hc; ++k)
            fuel += cost.fuelScale * result.samples[static_cast<size_t>(k)].u.norm();
        return fuel;
    }();
    return result;
}

void write_trajectory_csv(std::ostream& os, const EpisodeResult& result) {
    os << "k,t_s,y_km,ur,utheta,uh,x1,x2,x3,x4,x5,x6,V\n";
    os.precision(17);
    for (const auto& s : result.samples) {
        os << s.k << ',' << s.t << ',' << s.y << ',' << s.u[0] << ',' << s.u[1] << ',' << s.u[2];
        for (int i = 0; i < 6; ++i) os << ',' << s.x[i];
        os << ',' << s.V << '\n';
    }
}

void write_summary_json(std::ostream& os, const EpisodeResult& result) {
    os.precision(17);
    os << "{\n  \"Hc\": " << result.Hc << ",\n  \"J\": " << result.J
       << ",\n  \"converged\": " << (result.converged ? "true" : "false")
       << ",\n  \"fuel_sum\": " << result.fuelSum << "\n}\n";
}

}  // namespace orbtune
