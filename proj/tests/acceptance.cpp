// Acceptance suite: one pass/fail line per criterion. Run with --full-scale
// for the hours-long reproduction of the published campaign tables.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "orbtune/ars.hpp"
#include "orbtune/controller.hpp"
#include "orbtune/dynamics.hpp"
#include "orbtune/episode.hpp"
#include "orbtune/scenarios.hpp"
#include "orbtune/transform.hpp"
#include "support/oracles.hpp"

using namespace orbtune;

namespace {

constexpr double kMu = kMuEarth;

struct Criterion {
    std::string name;
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
};

// ---------------------------------------------------------------- criterion 1
Criterion physics_invariants() {
    Criterion c{"physics-invariants"};
    Rng rng(101);
    int worstCount = 0;
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const EquinoctialState psi = oracles::random_state(rng, 7000.0, 50000.0, 0.5, 1.2);
        const CartesianState cs = equinoctial_to_cartesian(psi, kMu);
        const double h = cs.r.cross(cs.v).norm();
        const double hRel = std::abs(h - std::sqrt(kMu * psi.p)) / std::sqrt(kMu * psi.p);
        const double e2 = psi.eX * psi.eX + psi.eY * psi.eY;
        const double E = 0.5 * cs.v.squaredNorm() - kMu / cs.r.norm();
        const double Eexp = -kMu * (1.0 - e2) / (2.0 * psi.p);
        const double eRel = std::abs(E - Eexp) / std::abs(Eexp);
        worst = std::max({worst, hRel, eRel});
        if (hRel > 1e-9 || eRel > 1e-9) ++worstCount;
    }
    if (worstCount > 0)
        c.fail("two-body invariants exceeded 1e-9 on " + std::to_string(worstCount) + " states");
    c.detail = "two-body worst rel " + std::to_string(worst);

    // Keplerian <-> equinoctial round trips
    for (int t = 0; t < 10000; ++t) {
        KeplerianElements kep;
        kep.a = rng.uniform(7000.0, 45000.0);
        kep.e = rng.uniform(0.0, 0.9);
        kep.i = rng.uniform(0.01, 3.0);
        kep.raan = rng.uniform(-M_PI, M_PI);
        kep.argp = rng.uniform(-M_PI, M_PI);
        kep.nu = rng.uniform(-M_PI, M_PI);
        const auto back = oracles::equinoctial_to_keplerian(keplerian_to_equinoctial(kep));
        const bool ok = std::abs(back.a - kep.a) / kep.a < 1e-9 &&
                        std::abs(back.e - kep.e) < 1e-9 &&
                        std::abs(back.i - kep.i) < 1e-9 &&
                        std::abs(std::remainder(back.raan - kep.raan, 2 * M_PI)) < 1e-9 &&
                        std::abs(std::remainder(back.argp - kep.argp, 2 * M_PI)) < 1e-9 &&
                        std::abs(std::remainder(back.nu - kep.nu, 2 * M_PI)) < 1e-9;
        if (!ok) {
            c.fail("Keplerian round trip exceeded 1e-9");
            break;
        }
    }

    // Error-coordinate transform round trips
    for (int t = 0; t < 10000; ++t) {
        const EquinoctialState psi_r = oracles::random_state(rng, 7000.0, 50000.0, 0.3, 0.8);
        EquinoctialState psi = psi_r;
        psi.L += 0.3 * rng.normal();
        psi.p *= std::exp(0.1 * rng.normal());
        psi.eX += 0.05 * rng.normal();
        psi.eY += 0.05 * rng.normal();
        psi.hX += 0.05 * rng.normal();
        psi.hY += 0.05 * rng.normal();
        if (psi.eX * psi.eX + psi.eY * psi.eY >= 1.0 || psi.p <= 0.0) continue;
        const EquinoctialState back = from_error_coords(to_error_coords(psi, psi_r), psi_r);
        const Vector6 a = psi.asVector(), b = back.asVector();
        for (int i = 0; i < 6; ++i) {
            if (std::abs(b[i] - a[i]) / std::max(1.0, std::abs(a[i])) > 1e-9) {
                c.fail("transform round trip exceeded 1e-9");
                t = 10000;
                break;
            }
        }
    }
    return c;
}

// ---------------------------------------------------------------- criterion 2
Criterion derivative_oracles() {
    Criterion c{"derivative-oracles"};
    Rng rng(211);
    double worstGrad = 0.0, worstXiDot = 0.0;
    int tested = 0;
    while (tested < 1000) {
        const EquinoctialState psi_r = oracles::random_state(rng, 7000.0, 45000.0, 0.25, 0.6);
        ErrorState x;
        x[0] = 0.2 * rng.normal();
        for (int i = 1; i < 6; ++i) x[i] = 0.08 * rng.normal();
        if (x[1] <= -0.8) continue;
        Gains K;
        for (int i = 0; i < 5; ++i) K[i] = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
        const GainScale sc{psi_r.p * std::exp(rng.uniform(std::log(0.2), std::log(1.2)))};

        const Vector6 g = lyapunov_gradient(x, psi_r, K, kMu, sc);
        Vector6 fd;
        const double h = 1e-6;
        for (int i = 0; i < 6; ++i) {
            ErrorState xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            fd[i] = (lyapunov(xp, psi_r, K, kMu, sc) - lyapunov(xm, psi_r, K, kMu, sc)) / (2 * h);
        }
        const double gradRel =
            (g - fd).cwiseAbs().maxCoeff() / std::max(fd.cwiseAbs().maxCoeff(), 1e-9);
        worstGrad = std::max(worstGrad, gradRel);

        // xi_dot against a central difference along the closed loop
        const ControlOutput ctrl = control(x, psi_r, K, kMu, sc);
        const double dt = 1e-5 * sc.timeUnit(kMu);
        using Loop7 = Eigen::Matrix<double, 7, 1>;
        auto rhs = [&](const Loop7& st) -> Loop7 {
            ErrorState xx;
            xx.x = st.head<6>();
            EquinoctialState pr = psi_r;
            pr.L = st[6];
            const ControlOutput cc = control(xx, pr, K, kMu, sc);
            Loop7 out;
            out.head<6>() = error_dynamics(xx, pr, cc.accel(), kMu);
            double zXr, zYr;
            reference_projections(pr, zXr, zYr);
            out[6] = std::sqrt(kMu / std::pow(pr.p, 3)) * (1.0 + zXr) * (1.0 + zXr);
            return out;
        };
        Loop7 st0;
        st0.head<6>() = x.x;
        st0[6] = psi_r.L;
        const Loop7 sp = oracles::rk4<Loop7>(rhs, st0, dt, 1);
        const Loop7 sm = oracles::rk4<Loop7>(rhs, st0, -dt, 1);
        auto xiAt = [&](const Loop7& st) {
            ErrorState xx;
            xx.x = st.head<6>();
            EquinoctialState pr = psi_r;
            pr.L = st[6];
            return xi(xx, pr, K, kMu, sc);
        };
        const double fdXi = (xiAt(sp) - xiAt(sm)) / (2.0 * dt);
        const double xiRel = std::abs(ctrl.xi_dot - fdXi) / std::max(std::abs(fdXi), 1e-9);
        worstXiDot = std::max(worstXiDot, xiRel);
        ++tested;
    }
    if (worstGrad > 1e-5) c.fail("gradient worst rel " + std::to_string(worstGrad) + " > 1e-5");
    if (worstXiDot > 1e-4) c.fail("xi_dot worst rel " + std::to_string(worstXiDot) + " > 1e-4");
    std::ostringstream os;
    os << "grad worst " << worstGrad << ", xi_dot worst " << worstXiDot;
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 3
Criterion stability_property() {
    Criterion c{"stability-property"};
    ScenarioSpec spec = preset("B");
    const auto ics = sample_initial_conditions(*spec.campaign, spec);
    Rng rng(307);
    int violations = 0;
    double worstStep = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Gains K;
        for (int i = 0; i < 5; ++i) K[i] = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));

        // u(0) = 0 holds exactly for every drawn gain vector
        ErrorState zero;
        const ControlOutput at0 = control(zero, spec.target0, K, kMu, spec.gainScale);
        if (at0.u_r != 0.0 || at0.u_theta != 0.0 || at0.u_h != 0.0) {
            c.fail("u(0) != 0 for a positive gain vector");
            break;
        }

        SimConfig sim = spec.sim;
        sim.H = 64;
        sim.substeps = std::max(sim.substeps, static_cast<int>(std::ceil(14.0 * K.K.maxCoeff())));
        const EpisodeResult r =
            run_episode(ics[static_cast<size_t>(trial) % ics.size()], spec.target0, K, sim,
                        spec.cost, spec.mu, spec.gainScale);
        for (size_t k = 1; k < r.samples.size(); ++k) {
            const double step = r.samples[k].V - r.samples[k - 1].V;
            worstStep = std::max(worstStep, step);
            if (step > 1e-9) ++violations;
        }
    }
    if (violations > 0)
        c.fail(std::to_string(violations) + " V increases beyond +1e-9 per step");
    std::ostringstream os;
    os << "worst V step " << worstStep;
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 4
Criterion algorithm_fidelity() {
    Criterion c{"algorithm-fidelity"};
    ArsConfig cfg;
    cfg.M = 100;
    cfg.alpha = 0.05;
    cfg.N = 8;
    cfg.sigma = 0.1;
    cfg.SigmaDelta << 0.1, 1.0, 1.0, 1.0, 10.0;
    cfg.seed = 42;
    cfg.logNominal = false;

    auto quadratic = [](const Gains& K) {
        const Vector5 center = (Vector5() << 1.5, 0.5, 2.0, 1.0, 3.0).finished();
        return (K.K - center).squaredNorm();
    };
    auto refCost = [](const std::array<double, 5>& k) {
        const std::array<double, 5> ctr = {1.5, 0.5, 2.0, 1.0, 3.0};
        double s = 0.0;
        for (int i = 0; i < 5; ++i) s += (k[i] - ctr[i]) * (k[i] - ctr[i]);
        return s;
    };

    Rng refRng(cfg.seed);
    std::array<double, 5> refK = {0.1, 1.0, 1.0, 1.0, 10.0};
    std::vector<std::array<double, 5>> iterates;
    for (int it = 0; it < cfg.M; ++it) {
        const auto deltas = sample_directions(cfg.N, cfg.SigmaDelta, refRng);
        std::vector<std::array<double, 5>> d(deltas.size());
        for (size_t j = 0; j < deltas.size(); ++j)
            for (int i = 0; i < 5; ++i) d[j][i] = deltas[j][i];
        refK = oracles::reference_step(refK, d, refCost, cfg.alpha, cfg.sigma, cfg.gainFloor).K;
        iterates.push_back(refK);
    }
    const TrainResult tr = train(Gains(0.1, 1.0, 1.0, 1.0, 10.0), quadratic, cfg);
    double worst = 0.0;
    for (int it = 0; it < cfg.M; ++it)
        for (int i = 0; i < 5; ++i)
            worst = std::max(worst, std::abs(tr.logs[static_cast<size_t>(it)].K[i] -
                                             iterates[static_cast<size_t>(it)][i]));
    if (worst > 1e-12) c.fail("iterate mismatch " + std::to_string(worst) + " > 1e-12");

    // degenerate sigma_J
    Rng rng(7);
    const Gains K(1.0, 2.0, 3.0, 4.0, 5.0);
    auto [next, log] = ars_step(K, [](const Gains&) { return 3.0; }, cfg, rng);
    if (log.sigmaJ != 0.0 || (next.K.array() != K.K.array()).any())
        c.fail("degenerate sigma_J did not skip the update exactly");

    // mirrored directions
    Rng mr(991);
    const auto deltas = sample_directions(cfg.N, cfg.SigmaDelta, mr);
    std::vector<std::array<double, 5>> d(deltas.size()), dneg(deltas.size());
    for (size_t j = 0; j < deltas.size(); ++j)
        for (int i = 0; i < 5; ++i) {
            d[j][i] = deltas[j][i];
            dneg[j][i] = -deltas[j][i];
        }
    auto bumpy = [](const std::array<double, 5>& k) {
        double s = 0.0;
        for (int i = 0; i < 5; ++i) s += std::sin(k[i]) + 0.3 * k[i] * k[i];
        return s;
    };
    const std::array<double, 5> K0 = {0.4, 1.2, 0.8, 2.0, 5.0};
    const auto A = oracles::reference_step(K0, d, bumpy, cfg.alpha, cfg.sigma, cfg.gainFloor);
    const auto B = oracles::reference_step(K0, dneg, bumpy, cfg.alpha, cfg.sigma, cfg.gainFloor);
    for (int i = 0; i < 5; ++i)
        if (std::abs(A.K[i] - B.K[i]) > 1e-13) c.fail("mirrored-direction identity violated");

    std::ostringstream os;
    os << "worst iterate diff " << worst;
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 5
Criterion scenario_A_desk(int workers) {
    Criterion c{"scenario-A-desk"};
    ScenarioSpec spec = preset("A");
    spec.sim.H = 640;
    spec.ars.M = 300;
    spec.ars.N = 8;
    spec.ars.logNominal = false;

    ThreadPool pool(workers);
    const Evaluator ev = make_episode_evaluator(spec, spec.initialChaser());
    const double J0 = ev(spec.K1);
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult tr = train(spec.K1, ev, spec.ars, &pool);
    const double mins =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    const double Jstar = ev(tr.Kstar);
    const double reduction = 100.0 * (1.0 - Jstar / J0);
    if (reduction < 50.0)
        c.fail("cost reduction " + std::to_string(reduction) + "% < 50%");
    if (mins > 30.0) c.fail("runtime " + std::to_string(mins) + " min > 30 min");
    std::ostringstream os;
    os.precision(4);
    os << "J(K1)=" << J0 << " J(K*)=" << Jstar << " reduction=" << reduction << "% in " << mins
       << " min";
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 6
Criterion scenario_B_mean_gains() {
    Criterion c{"scenario-B-mean-gains"};
    ScenarioSpec spec = preset("B");
    CampaignSpec camp = *spec.campaign;
    camp.count = 10;
    const auto ics = sample_initial_conditions(camp, spec);
    const Gains Khat(1.22, 5.41, 0.72, 5.29, 0.40);

    double minRed = 1e30, sumRed = 0.0;
    for (const auto& ic : ics) {
        const EpisodeResult base =
            run_episode(ic, spec.target0, spec.K1, spec.sim, spec.cost, spec.mu, spec.gainScale);
        const EpisodeResult hat =
            run_episode(ic, spec.target0, Khat, spec.sim, spec.cost, spec.mu, spec.gainScale);
        if (!hat.converged) c.fail("an episode under the mean gains missed the 1 km threshold");
        for (int k = hat.Hc; k <= spec.sim.H; ++k)
            if (hat.samples[static_cast<size_t>(k)].y > spec.cost.epsilon)
                c.fail("post-settling sample above threshold");
        const double red = 100.0 * (1.0 - hat.J / base.J);
        minRed = std::min(minRed, red);
        sumRed += red;
        if (red < 50.0) c.fail("reduction " + std::to_string(red) + "% < 50%");
    }
    std::ostringstream os;
    os.precision(4);
    os << "mean reduction " << sumRed / static_cast<double>(ics.size()) << "%, min " << minRed
       << "% over " << ics.size() << " initial conditions";
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 7
Criterion table_shape(int workers) {
    Criterion c{"table-shape"};
    ThreadPool pool(workers);

    ScenarioSpec spec = preset("B");
    spec.campaign->count = 6;
    CampaignOptions hatOpt;
    hatOpt.mode = ComparisonMode::FixedGains;
    hatOpt.fixedGains = Gains(1.22, 5.41, 0.72, 5.29, 0.40);
    hatOpt.pool = &pool;
    const CampaignStats hat = run_campaign(spec, hatOpt);

    ScenarioSpec quick = spec;
    quick.campaign->count = 2;
    quick.sim.H = 512;
    quick.ars.M = 40;
    quick.ars.N = 4;
    CampaignOptions starOpt;
    starOpt.mode = ComparisonMode::PerRunTrained;
    starOpt.pool = &pool;
    const CampaignStats star = run_campaign(quick, starOpt);

    auto checkOrder = [&](const Aggregate& a, const char* name) {
        if (!(a.minimum <= a.average && a.average <= a.maximum))
            c.fail(std::string("aggregate ordering violated for ") + name);
    };
    checkOrder(hat.cost, "cost");
    checkOrder(hat.settling, "settling");
    checkOrder(hat.fuel, "fuel");
    checkOrder(star.cost, "trained cost");

    std::ostringstream t1, t2;
    write_tables_csv(t1, hat);
    write_table2_csv(t2, star, hat);
    auto hasRows = [](const std::string& text, const std::string& header) {
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        if (line != header) return false;
        int rows = 0;
        bool avg = false, mn = false, mx = false;
        while (std::getline(in, line)) {
            ++rows;
            avg |= line.rfind("average,", 0) == 0;
            mn |= line.rfind("minimum,", 0) == 0;
            mx |= line.rfind("maximum,", 0) == 0;
        }
        return rows == 3 && avg && mn && mx;
    };
    if (!hasRows(t1.str(),
                 "row,total_cost_reduction_pct,settling_time_reduction_pct,fuel_reduction_pct"))
        c.fail("three-column table schema mismatch");
    if (!hasRows(t2.str(), "row,total_cost_reduction_pct_Kstar,total_cost_reduction_pct_Khat"))
        c.fail("two-column table schema mismatch");

    std::ostringstream os;
    os.precision(4);
    os << "mean-gain campaign cost reduction avg " << hat.cost.average << "% [" << hat.cost.minimum
       << ", " << hat.cost.maximum << "]";
    c.detail = os.str();
    return c;
}

// ------------------------------------------------------- full-scale (flagged)
Criterion full_scale(int workers) {
    Criterion c{"full-scale-reproduction"};
    ThreadPool pool(workers);

    // Scenario A, full hyperparameters: J(K*) <= 0.30 J(K1).
    ScenarioSpec a = preset("A");
    a.ars.logNominal = false;
    const Evaluator evA = make_episode_evaluator(a, a.initialChaser());
    const double J0 = evA(a.K1);
    const TrainResult trA = train(a.K1, evA, a.ars, &pool);
    const double JA = evA(trA.Kstar);
    if (JA > 0.30 * J0)
        c.fail("scenario A full-scale J(K*) = " + std::to_string(JA) + " > 0.30 * " +
               std::to_string(J0));

    // Tables I/II bands: average total-cost reduction within [65, 90] %.
    ScenarioSpec ac = preset("A");
    CampaignOptions aOpt;
    aOpt.mode = ComparisonMode::PerRunTrained;
    aOpt.pool = &pool;
    const CampaignStats tableI = run_campaign(ac, aOpt);
    if (tableI.cost.average < 65.0 || tableI.cost.average > 90.0)
        c.fail("Table I average cost reduction " + std::to_string(tableI.cost.average) +
               "% outside [65, 90]");

    ScenarioSpec bc = preset("B");
    CampaignOptions bOpt;
    bOpt.mode = ComparisonMode::MeanOfTrained;
    bOpt.pool = &pool;
    const CampaignStats tableII = run_campaign(bc, bOpt);
    if (tableII.cost.average < 65.0 || tableII.cost.average > 90.0)
        c.fail("Table II average cost reduction " + std::to_string(tableII.cost.average) +
               "% outside [65, 90]");

    std::ostringstream os;
    os.precision(4);
    os << "A: J(K*)/J(K1) = " << JA / J0 << "; Table I avg " << tableI.cost.average
       << "%; Table II avg " << tableII.cost.average << "%";
    c.detail = os.str();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    bool fullScale = false;
    int workers = 8;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full-scale") == 0) fullScale = true;
        else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) workers = std::atoi(argv[++i]);
    }

    std::vector<std::function<Criterion()>> suite = {
        physics_invariants,
        derivative_oracles,
        stability_property,
        algorithm_fidelity,
        [&] { return scenario_A_desk(workers); },
        scenario_B_mean_gains,
        [&] { return table_shape(workers); },
    };
    if (fullScale) suite.push_back([&] { return full_scale(workers); });

    int failures = 0;
    for (auto& fn : suite) {
        Criterion c = fn();
        std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures;
}
