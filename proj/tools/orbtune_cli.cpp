// orbtune: closed-loop orbital tracking episodes, gain training with random
// search, and Monte Carlo campaigns over randomized initial conditions.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "orbtune/ars.hpp"
#include "orbtune/episode.hpp"
#include "orbtune/scenarios.hpp"

using namespace orbtune;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string scenario = "A";
    std::string tsMode = "literal";
    std::string outDir = "out";
    int workers = 0;
    std::optional<int> iterations, directions, horizon, substeps;
    std::optional<double> stepsize, sigma, ts, rho, epsilon, gainScaleKm;
    std::optional<std::uint64_t> seed;
    std::vector<double> gains;

    void attach(CLI::App* cmd) {
        cmd->add_option("--scenario", scenario, "Preset name (A, B) or path to a scenario JSON");
        cmd->add_option("--ts-mode", tsMode, "Scenario A sampling interval: literal | period")
            ->check(CLI::IsMember({"literal", "period"}));
        cmd->add_option("--out", outDir, "Output directory");
        cmd->add_option("--workers", workers, "Worker threads for parallel episodes");
        cmd->add_option("--iterations", iterations, "Training iterations (M)");
        cmd->add_option("--directions", directions, "Search directions per iteration (N)");
        cmd->add_option("--stepsize", stepsize, "Update stepsize (alpha)");
        cmd->add_option("--sigma", sigma, "Perturbation step (sigma)");
        cmd->add_option("--seed", seed, "RNG seed (training and campaign sampling)");
        cmd->add_option("--horizon", horizon, "Samples per episode (H)");
        cmd->add_option("--ts", ts, "Sampling interval [s]");
        cmd->add_option("--substeps", substeps, "Integrator steps per sampling interval");
        cmd->add_option("--rho", rho, "Fuel weight in the cost");
        cmd->add_option("--epsilon", epsilon, "Convergence threshold [km]");
        cmd->add_option("--gain-scale", gainScaleKm, "Controller gain scale length [km]");
        cmd->add_option("--gains", gains, "Gain vector K1..K5 (5 values)")->expected(5);
    }

    ScenarioSpec resolve() const {
        ScenarioSpec spec = load_scenario(
            scenario, tsMode == "period" ? TsMode::PeriodDerived : TsMode::Literal);
        if (iterations) spec.ars.M = *iterations;
        if (directions) spec.ars.N = *directions;
        if (stepsize) spec.ars.alpha = *stepsize;
        if (sigma) spec.ars.sigma = *sigma;
        if (seed) {
            spec.ars.seed = *seed;
            if (spec.campaign) spec.campaign->seed = *seed;
        }
        if (horizon) spec.sim.H = *horizon;
        if (ts) spec.sim.Ts = *ts;
        if (substeps) spec.sim.substeps = *substeps;
        if (rho) spec.cost.rho = *rho;
        if (epsilon) spec.cost.epsilon = *epsilon;
        if (gainScaleKm) {
            spec.gainScale = GainScale{*gainScaleKm};
            spec.cost.fuelScale = 1.0 / spec.gainScale.accelUnit(spec.mu);
        }
        return spec;
    }

    std::optional<Gains> gainsOverride() const {
        if (gains.empty()) return std::nullopt;
        return Gains(gains[0], gains[1], gains[2], gains[3], gains[4]);
    }
};

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

int cmd_simulate(const CommonArgs& args, const std::string& runId) {
    ScenarioSpec spec = args.resolve();
    const Gains K = args.gainsOverride().value_or(spec.K1);
    const EpisodeResult r = run_episode(spec.initialChaser(), spec.target0, K, spec.sim,
                                        spec.cost, spec.mu, spec.gainScale);
    ensure_dir(args.outDir);
    {
        std::ofstream csv(args.outDir + "/trajectory_" + runId + ".csv");
        write_trajectory_csv(csv, r);
    }
    {
        std::ofstream json(args.outDir + "/summary_" + runId + ".json");
        write_summary_json(json, r);
    }
    std::cout << "episode: Hc=" << r.Hc << " J=" << r.J << " converged=" << std::boolalpha
              << r.converged << " fuel_sum=" << r.fuelSum << "\n"
              << "wrote " << args.outDir << "/trajectory_" << runId << ".csv\n";
    return 0;
}

int cmd_train(const CommonArgs& args, const std::string& resumePath, int checkpointEvery) {
    ScenarioSpec spec = args.resolve();
    ensure_dir(args.outDir);
    ThreadPool pool(args.workers);
    const Evaluator ev = make_episode_evaluator(spec, spec.initialChaser());

    ArsConfig cfg = spec.ars;
    Gains K = args.gainsOverride().value_or(spec.K1);
    Rng rng(cfg.seed);
    int startIter = 0;
    if (!resumePath.empty()) {
        std::ifstream in(resumePath);
        if (!in) throw std::runtime_error("cannot open checkpoint " + resumePath);
        std::stringstream buffer;
        buffer << in.rdbuf();
        checkpoint_from_json(buffer.str(), startIter, K, rng);
        std::cout << "resumed from iteration " << startIter << "\n";
    }

    std::ofstream logCsv(args.outDir + "/training_log.csv",
                         startIter > 0 ? std::ios::app : std::ios::out);
    logCsv.precision(17);
    if (startIter == 0) logCsv << "iter,K1,K2,K3,K4,K5,Jnominal,sigmaJ,wall_ms\n";

    const double J0 = ev(K);
    std::cout << "J at start = " << J0 << "\n";
    for (int i = startIter + 1; i <= cfg.M; ++i) {
        auto [next, log] = ars_step(K, ev, cfg, rng, &pool);
        K = next;
        log.iter = i;
        logCsv << log.iter;
        for (int g = 0; g < 5; ++g) logCsv << ',' << log.K[g];
        logCsv << ',' << log.Jnominal << ',' << log.sigmaJ << ',' << log.wallMs << '\n';
        logCsv.flush();
        if (checkpointEvery > 0 && i % checkpointEvery == 0) {
            std::ofstream ck(args.outDir + "/checkpoint.json");
            ck << checkpoint_to_json(i, K, rng);
        }
        if (i % 50 == 0 || i == cfg.M)
            std::cout << "iter " << i << "/" << cfg.M << " sigmaJ=" << log.sigmaJ
                      << " Jnominal=" << log.Jnominal << "\n";
    }
    const double Jstar = ev(K);
    std::cout.precision(17);
    std::cout << "K* = [" << K[0] << ", " << K[1] << ", " << K[2] << ", " << K[3] << ", " << K[4]
              << "]\n";
    std::cout << "J(K1)=" << J0 << " J(K*)=" << Jstar << " reduction="
              << 100.0 * (1.0 - Jstar / J0) << "%\n";
    {
        std::ofstream ck(args.outDir + "/checkpoint.json");
        ck << checkpoint_to_json(cfg.M, K, rng);
    }
    {
        nlohmann::json j;
        j["Kstar"] = {K[0], K[1], K[2], K[3], K[4]};
        j["J_initial"] = J0;
        j["J_final"] = Jstar;
        std::ofstream out(args.outDir + "/trained_gains.json");
        out << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_campaign(const CommonArgs& args, const std::string& modeName, int count) {
    ScenarioSpec spec = args.resolve();
    if (!spec.campaign) throw std::runtime_error("scenario has no campaign spec");
    if (count > 0) spec.campaign->count = count;
    ensure_dir(args.outDir);
    ThreadPool pool(args.workers);

    CampaignOptions opt;
    opt.pool = &pool;
    if (modeName == "baseline") opt.mode = ComparisonMode::Baseline;
    else if (modeName == "per-run") opt.mode = ComparisonMode::PerRunTrained;
    else if (modeName == "shared") opt.mode = ComparisonMode::SharedTrained;
    else if (modeName == "mean") opt.mode = ComparisonMode::MeanOfTrained;
    else if (modeName == "fixed") {
        opt.mode = ComparisonMode::FixedGains;
        const auto g = args.gainsOverride();
        if (!g) throw std::runtime_error("--gains is required for --mode fixed");
        opt.fixedGains = *g;
    } else {
        throw std::runtime_error("unknown campaign mode " + modeName);
    }
    opt.onRun = [](int run, const RunRecord& rec) {
        std::cout << "run " << run << ": baseline J=" << rec.baseline.J
                  << " comparison J=" << rec.comparison.J << " reduction="
                  << rec.costReductionPct << "%\n";
    };

    const CampaignStats stats = run_campaign(spec, opt);
    {
        std::ofstream json(args.outDir + "/campaign_stats.json");
        write_campaign_json(json, stats);
    }
    {
        std::ofstream csv(args.outDir + "/tables.csv");
        write_tables_csv(csv, stats);
    }
    for (const auto& rec : stats.runs) {
        if (rec.failed) continue;
        std::ofstream csv(args.outDir + "/trajectory_run" + std::to_string(rec.run) + ".csv");
        write_trajectory_csv(csv, rec.comparison);
    }
    if (stats.failedRuns > 0)
        std::cerr << "warning: " << stats.failedRuns << " run(s) failed and were excluded\n";
    std::cout << "total-cost reduction: avg " << stats.cost.average << "% min "
              << stats.cost.minimum << "% max " << stats.cost.maximum << "%\n"
              << "wrote " << args.outDir << "/campaign_stats.json and tables.csv\n";
    return 0;
}

int cmd_stats(const std::string& inPath, const std::string& outDir) {
    std::ifstream in(inPath);
    if (!in) throw std::runtime_error("cannot open " + inPath);
    nlohmann::json j;
    in >> j;

    std::vector<double> costs, settlings, fuels;
    for (const auto& r : j.at("runs")) {
        if (r.value("failed", false)) continue;
        const double jb = r.at("baseline").at("J").get<double>();
        const double jc = r.at("comparison").at("J").get<double>();
        const double hb = r.at("baseline").at("Hc").get<double>();
        const double hc = r.at("comparison").at("Hc").get<double>();
        const double fb = r.at("baseline").at("fuel_sum").get<double>();
        const double fc = r.at("comparison").at("fuel_sum").get<double>();
        costs.push_back(jb != 0.0 ? 100.0 * (1.0 - jc / jb) : 0.0);
        settlings.push_back(hb != 0.0 ? 100.0 * (1.0 - hc / hb) : 0.0);
        fuels.push_back(fb != 0.0 ? 100.0 * (1.0 - fc / fb) : 0.0);
        const double stored = r.at("cost_reduction_pct").get<double>();
        if (std::abs(stored - costs.back()) > 1e-9)
            std::cerr << "warning: stored reduction disagrees with recomputation on run "
                      << r.at("run") << "\n";
    }
    auto agg = [](std::vector<double>& v) {
        double lo = v[0], hi = v[0], sum = 0.0;
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            sum += x;
        }
        return std::array<double, 3>{sum / static_cast<double>(v.size()), lo, hi};
    };
    if (costs.empty()) throw std::runtime_error("no successful runs in " + inPath);
    const auto c = agg(costs), s = agg(settlings), f = agg(fuels);
    ensure_dir(outDir);
    std::ofstream csv(outDir + "/tables.csv");
    csv.precision(17);
    csv << "row,total_cost_reduction_pct,settling_time_reduction_pct,fuel_reduction_pct\n";
    csv << "average," << c[0] << ',' << s[0] << ',' << f[0] << '\n';
    csv << "minimum," << c[1] << ',' << s[1] << ',' << f[1] << '\n';
    csv << "maximum," << c[2] << ',' << s[2] << ',' << f[2] << '\n';
    std::cout << "recomputed " << costs.size() << " runs -> " << outDir << "/tables.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbital tracking controller tuning"};
    app.require_subcommand(1);

    CommonArgs simArgs, trainArgs, campArgs;
    std::string runId = "nominal";
    std::string resumePath;
    int checkpointEvery = 100;
    std::string campMode = "fixed";
    int campCount = 0;
    std::string statsIn, statsOut = "out";

    auto* sim = app.add_subcommand("simulate", "Run one closed-loop episode");
    simArgs.attach(sim);
    sim->add_option("--run-id", runId, "Trajectory file suffix");

    auto* train = app.add_subcommand("train", "Tune the gains by random search");
    trainArgs.attach(train);
    train->add_option("--resume", resumePath, "Resume from a checkpoint JSON");
    train->add_option("--checkpoint-every", checkpointEvery, "Checkpoint interval (0 = off)");

    auto* camp = app.add_subcommand("campaign", "Randomized initial-condition study");
    campArgs.attach(camp);
    camp->add_option("--mode", campMode,
                     "baseline | per-run | shared | mean | fixed (with --gains)");
    camp->add_option("--count", campCount, "Number of initial conditions (0 = preset)");

    auto* stats = app.add_subcommand("stats", "Recompute tables from stored campaign results");
    stats->add_option("--in", statsIn, "campaign_stats.json path")->required();
    stats->add_option("--out", statsOut, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(simArgs, runId);
        if (train->parsed()) return cmd_train(trainArgs, resumePath, checkpointEvery);
        if (camp->parsed()) return cmd_campaign(campArgs, campMode, campCount);
        if (stats->parsed()) return cmd_stats(statsIn, statsOut);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
