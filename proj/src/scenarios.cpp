#include "orbtune/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "orbtune/dynamics.hpp"
#include "orbtune/transform.hpp"

namespace orbtune {

namespace {

double deg(double d) { return d * M_PI / 180.0; }

double reduction_pct(double base, double cmp) {
    if (base == 0.0) return 0.0;
    return 100.0 * (1.0 - cmp / base);
}

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    if (values.empty()) return a;
    a.minimum = *std::min_element(values.begin(), values.end());
    a.maximum = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    a.average = sum / static_cast<double>(values.size());
    return a;
}

}  // namespace

EquinoctialState ScenarioSpec::initialChaser() const {
    if (!chaserFromKeplerian) return chaser0;
    EquinoctialState psi = keplerian_to_equinoctial(chaserKep);
    psi.L = chaserTrueLongitude;
    return psi;
}

ScenarioSpec preset(const std::string& name, TsMode tsMode) {
    ScenarioSpec spec;
    spec.mu = kMuEarth;
    spec.K1 = Gains(0.1, 1.0, 1.0, 1.0, 10.0);
    spec.ars.alpha = 5e-3;
    spec.ars.sigma = 2e-3;
    spec.ars.N = 16;
    spec.ars.SigmaDelta << 0.1, 1.0, 1.0, 1.0, 10.0;
    spec.ars.seed = 1;

    if (name == "A") {
        spec.name = "A";
        spec.chaserFromKeplerian = true;
        spec.chaserKep = KeplerianElements{24364.0, 0.7306, deg(63.0), deg(75.0), deg(52.0), 0.0};
        spec.chaserTrueLongitude = M_PI / 6.0;
        spec.target0 = EquinoctialState{0.0, 42165.0, 0.0, 0.0, 0.0, 0.0};
        spec.chaser0 = spec.initialChaser();

        spec.sim.H = 1280;
        spec.sim.substeps = 30;
        if (tsMode == TsMode::Literal) {
            spec.sim.Ts = 45.0 * 60.0;
        } else {
            const double periodGeo =
                2.0 * M_PI * std::sqrt(std::pow(spec.target0.p, 3) / spec.mu);
            spec.sim.Ts = 40.0 * periodGeo / 1280.0;
        }
        spec.cost.rho = 50.0;
        spec.cost.epsilon = 10.0;
        spec.ars.M = 2000;
        spec.gainScale = GainScale{10000.0};
        spec.cost.fuelScale = 1.0 / spec.gainScale.accelUnit(spec.mu);

        CampaignSpec camp;
        camp.count = 50;
        camp.mode = CampaignMode::UniformAngles;
        camp.angleLo = M_PI / 4.0;
        camp.angleHi = M_PI / 2.0;
        camp.seed = 2024;
        spec.campaign = camp;
        return spec;
    }
    if (name == "B") {
        spec.name = "B";
        const double inclination = deg(81.0);
        spec.target0 = EquinoctialState{deg(45.0), kEarthRadiusKm + 1000.0, 0.0, 0.0,
                                        std::tan(inclination / 2.0), 0.0};

        spec.sim.Ts = 3.0 * 60.0;
        spec.sim.H = 1280;
        spec.sim.substeps = 20;
        spec.cost.rho = 400.0;
        spec.cost.epsilon = 1.0;
        spec.ars.M = 5000;
        spec.gainScale = GainScale{2500.0};
        spec.cost.fuelScale = 1.0 / spec.gainScale.accelUnit(spec.mu);

        CampaignSpec camp;
        camp.count = 50;
        camp.mode = CampaignMode::GaussianEquinoctial;
        camp.SigmaPsi << deg(0.5), 20.0, 3e-5, 3e-5, 2e-3, 2e-3;
        camp.sigmaPsiIsVariance = false;
        camp.seed = 2024;
        spec.campaign = camp;

        // Nominal single-run chaser: the first campaign draw.
        spec.chaser0 = sample_initial_conditions(*spec.campaign, spec).front();
        return spec;
    }
    throw DomainError("preset: unknown scenario '" + name + "' (expected \"A\" or \"B\")");
}

ScenarioSpec load_scenario(const std::string& nameOrPath, TsMode tsMode) {
    if (nameOrPath == "A" || nameOrPath == "B") return preset(nameOrPath, tsMode);
    std::ifstream in(nameOrPath);
    if (!in) throw DomainError("load_scenario: cannot open '" + nameOrPath + "'");
    nlohmann::json j;
    in >> j;

    ScenarioSpec spec;
    if (j.contains("base")) spec = preset(j.at("base").get<std::string>(), tsMode);
    spec.name = j.value("name", spec.name);
    spec.mu = j.value("mu", spec.mu);

    auto eqFrom = [](const nlohmann::json& arr) {
        if (arr.size() != 6) throw DomainError("load_scenario: equinoctial needs 6 entries");
        Vector6 v;
        for (int i = 0; i < 6; ++i) v[i] = arr[static_cast<size_t>(i)].get<double>();
        return EquinoctialState::fromVector(v);
    };
    if (j.contains("chaser")) {
        const auto& c = j.at("chaser");
        if (c.contains("keplerian")) {
            const auto& k = c.at("keplerian");
            spec.chaserKep = KeplerianElements{
                k.at("a_km").get<double>(),        k.at("e").get<double>(),
                k.at("i_rad").get<double>(),       k.at("raan_rad").get<double>(),
                k.at("argp_rad").get<double>(),    k.value("nu_rad", 0.0)};
            spec.chaserFromKeplerian = true;
            spec.chaserTrueLongitude =
                c.value("true_longitude_rad",
                        spec.chaserKep.raan + spec.chaserKep.argp + spec.chaserKep.nu);
            spec.chaser0 = spec.initialChaser();
        } else if (c.contains("equinoctial")) {
            spec.chaser0 = eqFrom(c.at("equinoctial"));
            spec.chaserFromKeplerian = false;
        }
    }
    if (j.contains("target")) spec.target0 = eqFrom(j.at("target").at("equinoctial"));
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        spec.sim.Ts = s.value("Ts_s", spec.sim.Ts);
        spec.sim.H = s.value("H", spec.sim.H);
        spec.sim.substeps = s.value("substeps", spec.sim.substeps);
    }
    if (j.contains("cost")) {
        const auto& cst = j.at("cost");
        spec.cost.rho = cst.value("rho", spec.cost.rho);
        spec.cost.epsilon = cst.value("epsilon_km", spec.cost.epsilon);
        spec.cost.fuelScale = cst.value("fuel_scale", spec.cost.fuelScale);
    }
    if (j.contains("gain_scale_km")) {
        spec.gainScale = GainScale{j.at("gain_scale_km").get<double>()};
        if (!j.contains("cost") || !j.at("cost").contains("fuel_scale"))
            spec.cost.fuelScale = 1.0 / spec.gainScale.accelUnit(spec.mu);
    }
    if (j.contains("ars")) {
        const auto& a = j.at("ars");
        spec.ars.M = a.value("iterations", spec.ars.M);
        spec.ars.alpha = a.value("stepsize", spec.ars.alpha);
        spec.ars.N = a.value("directions", spec.ars.N);
        spec.ars.sigma = a.value("sigma", spec.ars.sigma);
        spec.ars.seed = a.value("seed", spec.ars.seed);
        spec.ars.gainFloor = a.value("gain_floor", spec.ars.gainFloor);
        spec.ars.sigmaDeltaIsStd = a.value("sigma_delta_is_std", spec.ars.sigmaDeltaIsStd);
        if (a.contains("sigma_delta")) {
            const auto& sd = a.at("sigma_delta");
            for (int i = 0; i < 5; ++i) spec.ars.SigmaDelta[i] = sd[static_cast<size_t>(i)].get<double>();
        }
    }
    if (j.contains("K1")) {
        const auto& k = j.at("K1");
        for (int i = 0; i < 5; ++i) spec.K1[i] = k[static_cast<size_t>(i)].get<double>();
    }
    if (j.contains("campaign")) {
        const auto& cj = j.at("campaign");
        CampaignSpec camp = spec.campaign.value_or(CampaignSpec{});
        camp.count = cj.value("count", camp.count);
        if (cj.contains("mode")) {
            const std::string m = cj.at("mode").get<std::string>();
            if (m == "uniform-angles") camp.mode = CampaignMode::UniformAngles;
            else if (m == "gaussian-equinoctial") camp.mode = CampaignMode::GaussianEquinoctial;
            else throw DomainError("load_scenario: unknown campaign mode '" + m + "'");
        }
        camp.angleLo = cj.value("angle_lo_rad", camp.angleLo);
        camp.angleHi = cj.value("angle_hi_rad", camp.angleHi);
        camp.seed = cj.value("seed", camp.seed);
        camp.sigmaPsiIsVariance = cj.value("sigma_psi_is_variance", camp.sigmaPsiIsVariance);
        if (cj.contains("sigma_psi")) {
            const auto& sp = cj.at("sigma_psi");
            for (int i = 0; i < 6; ++i) camp.SigmaPsi[i] = sp[static_cast<size_t>(i)].get<double>();
        }
        spec.campaign = camp;
    }
    return spec;
}

void save_scenario(std::ostream& os, const ScenarioSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name;
    j["mu"] = spec.mu;
    if (spec.chaserFromKeplerian) {
        j["chaser"]["keplerian"] = {{"a_km", spec.chaserKep.a},     {"e", spec.chaserKep.e},
                                    {"i_rad", spec.chaserKep.i},    {"raan_rad", spec.chaserKep.raan},
                                    {"argp_rad", spec.chaserKep.argp}, {"nu_rad", spec.chaserKep.nu}};
        j["chaser"]["true_longitude_rad"] = spec.chaserTrueLongitude;
    } else {
        const Vector6 v = spec.chaser0.asVector();
        j["chaser"]["equinoctial"] = {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    const Vector6 t = spec.target0.asVector();
    j["target"]["equinoctial"] = {t[0], t[1], t[2], t[3], t[4], t[5]};
    j["sim"] = {{"Ts_s", spec.sim.Ts}, {"H", spec.sim.H}, {"substeps", spec.sim.substeps}};
    j["cost"] = {{"rho", spec.cost.rho},
                 {"epsilon_km", spec.cost.epsilon},
                 {"fuel_scale", spec.cost.fuelScale}};
    j["gain_scale_km"] = spec.gainScale.lengthKm;
    j["ars"] = {{"iterations", spec.ars.M},     {"stepsize", spec.ars.alpha},
                {"directions", spec.ars.N},     {"sigma", spec.ars.sigma},
                {"seed", spec.ars.seed},        {"gain_floor", spec.ars.gainFloor},
                {"sigma_delta_is_std", spec.ars.sigmaDeltaIsStd},
                {"sigma_delta",
                 {spec.ars.SigmaDelta[0], spec.ars.SigmaDelta[1], spec.ars.SigmaDelta[2],
                  spec.ars.SigmaDelta[3], spec.ars.SigmaDelta[4]}}};
    j["K1"] = {spec.K1[0], spec.K1[1], spec.K1[2], spec.K1[3], spec.K1[4]};
    if (spec.campaign) {
        const CampaignSpec& c = *spec.campaign;
        j["campaign"] = {{"count", c.count},
                         {"mode", c.mode == CampaignMode::UniformAngles ? "uniform-angles"
                                                                        : "gaussian-equinoctial"},
                         {"angle_lo_rad", c.angleLo},
                         {"angle_hi_rad", c.angleHi},
                         {"seed", c.seed},
                         {"sigma_psi_is_variance", c.sigmaPsiIsVariance},
                         {"sigma_psi",
                          {c.SigmaPsi[0], c.SigmaPsi[1], c.SigmaPsi[2], c.SigmaPsi[3],
                           c.SigmaPsi[4], c.SigmaPsi[5]}}};
    }
    os << j.dump(2) << '\n';
}

std::vector<EquinoctialState> sample_initial_conditions(const CampaignSpec& spec,
                                                        const ScenarioSpec& base) {
    if (!spec.valid()) throw DomainError("sample_initial_conditions: invalid campaign spec");
    Rng rng(spec.seed);
    std::vector<EquinoctialState> states;
    states.reserve(static_cast<size_t>(spec.count));

    for (int i = 0; i < spec.count; ++i) {
        bool accepted = false;
        for (int attempt = 0; attempt < spec.maxRetries && !accepted; ++attempt) {
            EquinoctialState psi;
            if (spec.mode == CampaignMode::UniformAngles) {
                KeplerianElements kep = base.chaserKep;
                kep.i = rng.uniform(spec.angleLo, spec.angleHi);
                kep.argp = rng.uniform(spec.angleLo, spec.angleHi);
                kep.raan = rng.uniform(spec.angleLo, spec.angleHi);
                psi = keplerian_to_equinoctial(kep);
                psi.L = base.chaserTrueLongitude;
            } else {
                Vector6 scale;
                for (int j = 0; j < 6; ++j)
                    scale[j] = spec.sigmaPsiIsVariance ? std::sqrt(spec.SigmaPsi[j])
                                                       : spec.SigmaPsi[j];
                Vector6 draw = base.target0.asVector();
                for (int j = 0; j < 6; ++j) draw[j] += scale[j] * rng.normal();
                psi = EquinoctialState::fromVector(draw);
            }
            if (psi.valid()) {
                states.push_back(psi);
                accepted = true;
            }
        }
        if (!accepted)
            throw DomainError("sample_initial_conditions: retry budget exhausted at draw " +
                              std::to_string(i));
    }
    return states;
}

Evaluator make_episode_evaluator(const ScenarioSpec& spec, const EquinoctialState& psi0,
                                 double abortPenaltyFactor) {
    return [spec, psi0, abortPenaltyFactor](const Gains& K) {
        try {
            return run_episode(psi0, spec.target0, K, spec.sim, spec.cost, spec.mu,
                               spec.gainScale)
                .J;
        } catch (const EpisodeError&) {
            if (abortPenaltyFactor <= 0.0) throw;
            return abortPenaltyFactor * static_cast<double>(spec.sim.H);
        }
    };
}

Gains mean_gains(const std::vector<Gains>& trained) {
    if (trained.empty()) throw DomainError("mean_gains: empty list");
    Vector5 sum = Vector5::Zero();
    for (const auto& g : trained) {
        g.requirePositive("mean_gains");
        sum += g.K;
    }
    return Gains(sum / static_cast<double>(trained.size()));
}

CampaignStats run_campaign(const ScenarioSpec& spec, const CampaignOptions& options) {
    if (!spec.campaign) throw DomainError("run_campaign: scenario has no campaign spec");
    const auto initials = sample_initial_conditions(*spec.campaign, spec);

    auto episodeFrom = [&](const EquinoctialState& psi0, const Gains& K) {
        return run_episode(psi0, spec.target0, K, spec.sim, spec.cost, spec.mu, spec.gainScale);
    };
    auto trainFrom = [&](const EquinoctialState& psi0, std::uint64_t seed) {
        ArsConfig cfg = spec.ars;
        cfg.seed = seed;
        cfg.logNominal = false;
        return train(spec.K1, make_episode_evaluator(spec, psi0), cfg, options.pool).Kstar;
    };

    CampaignStats stats;
    stats.runs.resize(initials.size());

    // Training (when requested) happens first so MeanOfTrained can average.
    std::vector<Gains> trained(initials.size(), spec.K1);
    Gains shared = spec.K1;
    if (options.mode == ComparisonMode::SharedTrained) {
        shared = trainFrom(spec.initialChaser(), spec.ars.seed);
    } else if (options.mode == ComparisonMode::PerRunTrained ||
               options.mode == ComparisonMode::MeanOfTrained) {
        for (size_t i = 0; i < initials.size(); ++i) {
            try {
                trained[i] = trainFrom(initials[i], spec.ars.seed + i);
            } catch (const std::exception& e) {
                stats.runs[i].failed = true;
                stats.runs[i].failure = std::string("training failed: ") + e.what();
            }
        }
    }
    Gains meanK = spec.K1;
    if (options.mode == ComparisonMode::MeanOfTrained) {
        std::vector<Gains> ok;
        for (size_t i = 0; i < initials.size(); ++i)
            if (!stats.runs[i].failed) ok.push_back(trained[i]);
        meanK = mean_gains(ok);
    }

    auto comparisonGains = [&](size_t i) {
        switch (options.mode) {
            case ComparisonMode::Baseline: return spec.K1;
            case ComparisonMode::PerRunTrained: return trained[i];
            case ComparisonMode::SharedTrained: return shared;
            case ComparisonMode::MeanOfTrained: return meanK;
            case ComparisonMode::FixedGains: return options.fixedGains;
        }
        return spec.K1;
    };

    auto evaluateRun = [&](int idx) {
        RunRecord& rec = stats.runs[static_cast<size_t>(idx)];
        rec.run = idx;
        rec.initial = initials[static_cast<size_t>(idx)];
        rec.trained = trained[static_cast<size_t>(idx)];
        if (rec.failed) return;
        try {
            rec.baseline = episodeFrom(rec.initial, spec.K1);
            rec.comparison = episodeFrom(rec.initial, comparisonGains(static_cast<size_t>(idx)));
            rec.costReductionPct = reduction_pct(rec.baseline.J, rec.comparison.J);
            rec.settlingReductionPct =
                reduction_pct(rec.baseline.Hc, rec.comparison.Hc);
            rec.fuelReductionPct = reduction_pct(rec.baseline.fuelSum, rec.comparison.fuelSum);
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.failure = e.what();
        }
    };
    if (options.pool && (options.mode == ComparisonMode::FixedGains ||
                         options.mode == ComparisonMode::Baseline ||
                         options.mode == ComparisonMode::SharedTrained ||
                         options.mode == ComparisonMode::MeanOfTrained)) {
        options.pool->parallel_for(static_cast<int>(initials.size()), evaluateRun);
    } else {
        for (int i = 0; i < static_cast<int>(initials.size()); ++i) evaluateRun(i);
    }

    std::vector<double> costs, settlings, fuels;
    for (auto& rec : stats.runs) {
        if (rec.failed) {
            ++stats.failedRuns;
            continue;
        }
        costs.push_back(rec.costReductionPct);
        settlings.push_back(rec.settlingReductionPct);
        fuels.push_back(rec.fuelReductionPct);
        if (options.onRun) options.onRun(rec.run, rec);
    }
    stats.cost = aggregate(costs);
    stats.settling = aggregate(settlings);
    stats.fuel = aggregate(fuels);
    return stats;
}

void write_campaign_json(std::ostream& os, const CampaignStats& stats) {
    nlohmann::json j;
    j["failed_runs"] = stats.failedRuns;
    auto putAgg = [&](const char* key, const Aggregate& a) {
        j["aggregates"][key] = {{"average", a.average}, {"min", a.minimum}, {"max", a.maximum}};
    };
    putAgg("total_cost_reduction_pct", stats.cost);
    putAgg("settling_time_reduction_pct", stats.settling);
    putAgg("fuel_reduction_pct", stats.fuel);
    for (const auto& rec : stats.runs) {
        nlohmann::json r;
        r["run"] = rec.run;
        r["failed"] = rec.failed;
        if (rec.failed) {
            r["failure"] = rec.failure;
        } else {
            r["baseline"] = {{"Hc", rec.baseline.Hc},
                             {"J", rec.baseline.J},
                             {"fuel_sum", rec.baseline.fuelSum},
                             {"converged", rec.baseline.converged}};
            r["comparison"] = {{"Hc", rec.comparison.Hc},
                               {"J", rec.comparison.J},
                               {"fuel_sum", rec.comparison.fuelSum},
                               {"converged", rec.comparison.converged}};
            r["trained_gains"] = {rec.trained[0], rec.trained[1], rec.trained[2], rec.trained[3],
                                  rec.trained[4]};
            r["cost_reduction_pct"] = rec.costReductionPct;
            r["settling_reduction_pct"] = rec.settlingReductionPct;
            r["fuel_reduction_pct"] = rec.fuelReductionPct;
        }
        j["runs"].push_back(r);
    }
    os << j.dump(2) << '\n';
}

void write_tables_csv(std::ostream& os, const CampaignStats& stats) {
    os.precision(17);
    os << "row,total_cost_reduction_pct,settling_time_reduction_pct,fuel_reduction_pct\n";
    os << "average," << stats.cost.average << ',' << stats.settling.average << ','
       << stats.fuel.average << '\n';
    os << "minimum," << stats.cost.minimum << ',' << stats.settling.minimum << ','
       << stats.fuel.minimum << '\n';
    os << "maximum," << stats.cost.maximum << ',' << stats.settling.maximum << ','
       << stats.fuel.maximum << '\n';
}

void write_table2_csv(std::ostream& os, const CampaignStats& perRunTrained,
                      const CampaignStats& meanGains) {
    os.precision(17);
    os << "row,total_cost_reduction_pct_Kstar,total_cost_reduction_pct_Khat\n";
    os << "average," << perRunTrained.cost.average << ',' << meanGains.cost.average << '\n';
    os << "minimum," << perRunTrained.cost.minimum << ',' << meanGains.cost.minimum << '\n';
    os << "maximum," << perRunTrained.cost.maximum << ',' << meanGains.cost.maximum << '\n';
}

}  // namespace orbtune
