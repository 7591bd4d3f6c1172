#ifndef ORBTUNE_ARS_HPP
#define ORBTUNE_ARS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orbtune/rng.hpp"
#include "orbtune/thread_pool.hpp"
#include "orbtune/types.hpp"

namespace orbtune {

/// Hyperparameters of the random-search trainer.
struct ArsConfig {
    int M = 100;                      // iterations
    double alpha = 5e-3;              // stepsize
    int N = 16;                       // directions per iteration
    double sigma = 2e-3;              // perturbation step
    Vector5 SigmaDelta = Vector5::Ones();  // diagonal covariance of direction sampling
    std::uint64_t seed = 0;
    double gainFloor = 1e-6;          // projection keeping every gain positive
    bool sigmaDeltaIsStd = false;     // read SigmaDelta entries as std devs instead
    bool logNominal = true;           // one extra episode per iteration at the current K

    bool valid() const {
        return M >= 1 && N >= 1 && alpha > 0.0 && sigma > 0.0 && gainFloor > 0.0 &&
               (SigmaDelta.array() > 0.0).all();
    }
};

/// Per-iteration record of Algorithm state.
struct IterationLog {
    int iter = 0;
    Gains K;                    // after the update
    std::vector<double> Jplus;  // N costs at K + sigma*delta_j
    std::vector<double> Jminus; // N costs at K - sigma*delta_j
    double sigmaJ = 0.0;        // population std dev of the 2N costs
    double Jnominal = std::numeric_limits<double>::quiet_NaN();
    double wallMs = 0.0;
};

struct TrainResult {
    Gains Kstar;
    std::vector<IterationLog> logs;
};

/// Raised when an episode evaluation fails during an iteration; carries the
/// offending gains.
class ArsError : public std::runtime_error {
public:
    ArsError(const std::string& what, const Gains& offending)
        : std::runtime_error(what), gains(offending) {}
    Gains gains;
};

using Evaluator = std::function<double(const Gains&)>;

/// Draw N independent direction vectors, component i ~ N(0, SigmaDelta[i])
/// (variance reading; std-dev reading behind the flag). Advances rng.
std::vector<Vector5> sample_directions(int N, const Vector5& SigmaDelta, Rng& rng,
                                       bool entriesAreStd = false);

/// Mirrored perturbations K +/- sigma*delta, floored elementwise.
std::pair<Gains, Gains> perturb(const Gains& K, double sigma, const Vector5& delta,
                                double gainFloor);

/// One iteration: sample directions, evaluate the 2N mirrored episodes (in
/// parallel when a pool is given), normalize by the population sigma_J and
/// step. Degenerate iterations (sigma_J < 1e-12) leave K unchanged.
/// All randomness is drawn from rng before any evaluation is dispatched, so
/// the result does not depend on worker scheduling.
std::pair<Gains, IterationLog> ars_step(const Gains& K, const Evaluator& evaluate,
                                        const ArsConfig& cfg, Rng& rng,
                                        ThreadPool* pool = nullptr);

using IterationCallback = std::function<void(const IterationLog&)>;

/// Run M iterations from K1 and return K* together with the full log.
/// Deterministic given cfg.seed. On evaluation failure the partial logs are
/// attached to the rethrown ArsError's message context via the callback side.
TrainResult train(const Gains& K1, const Evaluator& evaluate, const ArsConfig& cfg,
                  ThreadPool* pool = nullptr, const IterationCallback& onIteration = nullptr);

/// Resumable-state serialization: iteration index, current K and RNG state.
std::string checkpoint_to_json(int iter, const Gains& K, const Rng& rng);
void checkpoint_from_json(const std::string& text, int& iter, Gains& K, Rng& rng);

/// Training-log CSV: iter, K1..K5, Jnominal, sigmaJ, wall_ms.
void write_training_log_csv(std::ostream& os, const std::vector<IterationLog>& logs);

}  // namespace orbtune

#endif
