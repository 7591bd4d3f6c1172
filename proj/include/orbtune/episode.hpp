#ifndef ORBTUNE_EPISODE_HPP
#define ORBTUNE_EPISODE_HPP

#include <iosfwd>
#include <vector>

#include "orbtune/controller.hpp"
#include "orbtune/types.hpp"

namespace orbtune {

/// Sampling and integration settings for one episode.
struct SimConfig {
    double Ts = 60.0;  // sampling interval [s]
    int H = 100;       // samples per episode (horizon = H * Ts)
    int substeps = 10; // RK4 steps per sampling interval

    bool valid() const { return Ts > 0.0 && H >= 1 && substeps >= 1; }
};

/// Cost weighting. The fuel sum adds fuelScale * ||u(k)|| per sample, with u
/// in km/s^2; fuelScale converts to the unit the weight rho was tuned for
/// (1.0 keeps km/s^2; presets use the gain-scale canonical acceleration).
struct CostParams {
    double rho = 0.0;       // samples per unit of fuel sum
    double epsilon = 1.0;   // convergence threshold [km]
    double fuelScale = 1.0; // applied to ||u(k)|| inside the cost sum

    bool valid() const { return rho >= 0.0 && epsilon > 0.0 && fuelScale > 0.0; }
};

/// One sampled instant of an episode.
struct EpisodeSample {
    int k = 0;
    double t = 0.0;       // s
    double y = 0.0;       // km
    Vector3 u = Vector3::Zero();  // km/s^2
    Vector6 x = Vector6::Zero();
    double V = 0.0;
};

/// Episode outcome: the H+1 samples, the practical-convergence horizon Hc,
/// and the cost J = Hc + rho * sum_{k<Hc} fuelScale*||u(k)||.
struct EpisodeResult {
    std::vector<EpisodeSample> samples;
    int Hc = 0;
    double J = 0.0;
    double fuelSum = 0.0;  // in cost units (fuelScale applied)
    bool converged = false;
};

/// Raised when an episode leaves the valid domain or hits a singularity;
/// carries the offending time and state in the message.
class EpisodeError : public std::runtime_error {
public:
    explicit EpisodeError(const std::string& what) : std::runtime_error(what) {}
};

/// (Hc, J) of a sampled trajectory: Hc is the first index after which every
/// y(k) stays within epsilon (H if that never happens), J adds the weighted
/// fuel sum over k = 0..Hc-1.
std::pair<int, double> compute_cost(const std::vector<EpisodeSample>& samples,
                                    const CostParams& cost);

/// Simulate the closed loop from chaser psi0 tracking psi_r0 with gains K
/// over H*Ts seconds (fixed-step RK4, control evaluated continuously inside
/// substeps). Deterministic: identical inputs give bit-identical results.
EpisodeResult run_episode(const EquinoctialState& psi0, const EquinoctialState& psi_r0,
                          const Gains& K, const SimConfig& sim, const CostParams& cost,
                          double mu, const GainScale& scale);

/// Trajectory CSV: k, t_s, y_km, ur, utheta, uh, x1..x6, V (17 significant digits).
void write_trajectory_csv(std::ostream& os, const EpisodeResult& result);

/// JSON summary: Hc, J, converged, fuel_sum.
void write_summary_json(std::ostream& os, const EpisodeResult& result);

}  // namespace orbtune

#endif
