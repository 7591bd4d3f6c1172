#include "orbtune/ars.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

namespace orbtune {

namespace {
constexpr double kDegenerateSigmaJ = 1e-12;
}

std::vector<Vector5> sample_directions(int N, const Vector5& SigmaDelta, Rng& rng,
                                       bool entriesAreStd) {
    if (N < 1) throw DomainError("sample_directions: N must be >= 1");
    if (!(SigmaDelta.array() > 0.0).all())
        throw DomainError("sample_directions: covariance entries must be positive");
    Vector5 std_dev;
    for (int i = 0; i < 5; ++i)
        std_dev[i] = entriesAreStd ? SigmaDelta[i] : std::sqrt(SigmaDelta[i]);
    std::vector<Vector5> deltas(static_cast<size_t>(N));
    for (auto& d : deltas)
        for (int i = 0; i < 5; ++i) d[i] = std_dev[i] * rng.normal();
    return deltas;
}

std::pair<Gains, Gains> perturb(const Gains& K, double sigma, const Vector5& delta,
                                double gainFloor) {
    K.requirePositive("perturb");
    Gains plus, minus;
    plus.K = (K.K + sigma * delta).cwiseMax(gainFloor);
    minus.K = (K.K - sigma * delta).cwiseMax(gainFloor);
    return {plus, minus};
}

std::pair<Gains, IterationLog> ars_step(const Gains& K, const Evaluator& evaluate,
                                        const ArsConfig& cfg, Rng& rng, ThreadPool* pool) {
    if (!cfg.valid()) throw DomainError("ars_step: invalid config");
    const auto t0 = std::chrono::steady_clock::now();

    const auto deltas = sample_directions(cfg.N, cfg.SigmaDelta, rng, cfg.sigmaDeltaIsStd);

    // Gains for the 2N episodes, plus-first pairing: slot 2j is K+, 2j+1 is K-.
    std::vector<Gains> trial(static_cast<size_t>(2 * cfg.N));
    for (int j = 0; j < cfg.N; ++j) {
        auto [plus, minus] = perturb(K, cfg.sigma, deltas[static_cast<size_t>(j)], cfg.gainFloor);
        trial[static_cast<size_t>(2 * j)] = plus;
        trial[static_cast<size_t>(2 * j + 1)] = minus;
    }

    std::vector<double> costs(trial.size());
    auto evalOne = [&](int i) {
        try {
            costs[static_cast<size_t>(i)] = evaluate(trial[static_cast<size_t>(i)]);
        } catch (const std::exception& e) {
            throw ArsError(std::string("episode evaluation failed: ") + e.what(),
                           trial[static_cast<size_t>(i)]);
        }
    };
    if (pool) pool->parallel_for(static_cast<int>(trial.size()), evalOne);
    else for (int i = 0; i < static_cast<int>(trial.size()); ++i) evalOne(i);

    IterationLog log;
    log.Jplus.resize(static_cast<size_t>(cfg.N));
    log.Jminus.resize(static_cast<size_t>(cfg.N));
    double mean = 0.0;
    for (int j = 0; j < cfg.N; ++j) {
        log.Jplus[static_cast<size_t>(j)] = costs[static_cast<size_t>(2 * j)];
        log.Jminus[static_cast<size_t>(j)] = costs[static_cast<size_t>(2 * j + 1)];
        mean += costs[static_cast<size_t>(2 * j)] + costs[static_cast<size_t>(2 * j + 1)];
    }
    mean /= static_cast<double>(2 * cfg.N);
    double var = 0.0;
    for (double c : costs) var += (c - mean) * (c - mean);
    log.sigmaJ = std::sqrt(var / static_cast<double>(2 * cfg.N));

    Gains next = K;
    if (log.sigmaJ >= kDegenerateSigmaJ) {
        Vector5 step = Vector5::Zero();
        for (int j = 0; j < cfg.N; ++j)
            step += (log.Jplus[static_cast<size_t>(j)] - log.Jminus[static_cast<size_t>(j)]) *
                    deltas[static_cast<size_t>(j)];
        next.K = (K.K - cfg.alpha / (static_cast<double>(cfg.N) * log.sigmaJ) * step)
                     .cwiseMax(cfg.gainFloor);
    }
    log.K = next;

    if (cfg.logNominal) {
        try {
            log.Jnominal = evaluate(K);
        } catch (const std::exception& e) {
            throw ArsError(std::string("nominal episode failed: ") + e.what(), K);
        }
    }
    log.wallMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
    return {next, log};
}

TrainResult train(const Gains& K1, const Evaluator& evaluate, const ArsConfig& cfg,
                  ThreadPool* pool, const IterationCallback& onIteration) {
    if (!cfg.valid()) throw DomainError("train: invalid config");
    K1.requirePositive("train");
    Rng rng(cfg.seed);
    TrainResult result;
    result.Kstar = K1;
    result.logs.reserve(static_cast<size_t>(cfg.M));
    for (int i = 1; i <= cfg.M; ++i) {
        auto [next, log] = ars_step(result.Kstar, evaluate, cfg, rng, pool);
        log.iter = i;
        result.Kstar = next;
        result.logs.push_back(log);
        if (onIteration) onIteration(result.logs.back());
    }
    return result;
}

std::string checkpoint_to_json(int iter, const Gains& K, const Rng& rng) {
    nlohmann::json j;
    j["iter"] = iter;
    j["K"] = {K[0], K[1], K[2], K[3], K[4]};
    j["rng"] = rng.serialize();
    return j.dump(2);
}

void checkpoint_from_json(const std::string& text, int& iter, Gains& K, Rng& rng) {
    const auto j = nlohmann::json::parse(text);
    iter = j.at("iter").get<int>();
    const auto k = j.at("K");
    if (k.size() != 5) throw std::runtime_error("checkpoint: K must have 5 entries");
    for (int i = 0; i < 5; ++i) K[i] = k[static_cast<size_t>(i)].get<double>();
    rng = Rng::deserialize(j.at("rng").get<std::string>());
}

void write_training_log_csv(std::ostream& os, const std::vector<IterationLog>& logs) {
    os << "iter,K1,K2,K3,K4,K5,Jnominal,sigmaJ,wall_ms\n";
    os.precision(17);
    for (const auto& log : logs) {
        os << log.iter;
        for (int i = 0; i < 5; ++i) os << ',' << log.K[i];
        os << ',' << log.Jnominal << ',' << log.sigmaJ << ',' << log.wallMs << '\n';
    }
}

}  // namespace orbtune
