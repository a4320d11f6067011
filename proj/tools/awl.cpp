// Command-line driver: experiment orchestration, ensemble execution and
// file emission.  Exit codes: 0 success, 2 config error, 3 blow-up,
// 4 a configured check failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "awl/config.hpp"
#include "awl/diagnostics.hpp"
#include "awl/dynamics.hpp"
#include "awl/io.hpp"
#include "awl/noise.hpp"
#include "awl/rng.hpp"
#include "awl/spectral.hpp"
#include "awl/ssm.hpp"

namespace {

using nlohmann::json;
using namespace awl;

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Ctx {
    RunConfig cfg;
    std::string outdir;
    uint64_t seed = 0;
    int threads = 0;
    std::vector<std::string> files;  // outputs written so far, for the manifest
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    int aborts = 0;

    void finish() const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        write_manifest(outdir, cfg, files, aborts, wall);
    }
};

NoiseModel noise_from(const RunConfig& c, int K) {
    const double alpha = c.get_double("alpha", 0.5);
    if (c.has("b") && c.has("noise_power"))
        throw ConfigError("config: give either 'b' or 'noise_power', not both");
    if (c.has("b")) return NoiseModel(c.get_list("b"), alpha);
    if (c.has("noise_power"))
        return NoiseModel::power_law(K, c.require_double("noise_power"), alpha);
    return NoiseModel(std::vector<double>(K, 0.0), alpha);
}

WaveParams wave_params_from(const RunConfig& c) {
    WaveParams p;
    p.nu = c.get_double("nu", p.nu);
    p.beta = c.get_double("beta", p.beta);
    p.dt = c.get_double("dt", p.dt);
    p.T = c.get_double("T", p.T);
    p.K = c.get_int("K", p.K);
    p.noise = noise_from(c, p.K);
    p.alpha = p.noise.alpha;
    const std::string s = c.get_string("scheme", "stiff-exact");
    if (s == "stiff-exact")
        p.scheme = Scheme::StiffExact;
    else if (s == "euler-maruyama")
        p.scheme = Scheme::EulerMaruyama;
    else
        throw ConfigError("config: scheme must be stiff-exact or euler-maruyama");
    return p;
}

SsmParams ssm_params_from(const RunConfig& c) {
    SsmParams p;
    p.nu = c.get_double("nu", p.nu);
    p.gamma = c.get_double("gamma", p.gamma);
    p.beta_prime = c.get_double("beta_prime", p.beta_prime);
    p.sigma = c.get_double("sigma", p.sigma);
    if (c.has("amps")) p.amps = c.get_list("amps");
    p.K_ssm = c.get_int("K_ssm", p.K_ssm);
    p.validity_radius = c.get_double("validity_radius", p.validity_radius);
    return p;
}

SpectralField field_from(const RunConfig& c, const std::string& key, int K) {
    SpectralField f(SineBasis{K, Normalization::Orthonormal});
    if (!c.has(key)) return f;
    const auto v = c.get_list(key);
    if (static_cast<int>(v.size()) > K)
        throw ConfigError("config: '" + key + "' has more than K entries");
    for (std::size_t i = 0; i < v.size(); ++i) f.c[i] = v[i];
    return f;
}

std::vector<std::string> series_header(int K) {
    std::vector<std::string> h{"t"};
    for (int k = 1; k <= K; ++k) h.push_back("u_" + std::to_string(k));
    for (int k = 1; k <= K; ++k) h.push_back("v_" + std::to_string(k));
    return h;
}

void append_series_row(std::vector<std::vector<double>>& rows, double t,
                       const std::vector<double>& u,
                       const std::vector<double>& v) {
    std::vector<double> row;
    row.reserve(1 + u.size() + v.size());
    row.push_back(t);
    row.insert(row.end(), u.begin(), u.end());
    row.insert(row.end(), v.begin(), v.end());
    rows.push_back(std::move(row));
}

std::string traj_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "traj_%05zu.csv", i);
    return buf;
}

int cmd_simulate(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const std::string model = c.get_string("model", "wave");
    const std::size_t ensemble =
        static_cast<std::size_t>(c.get_int("ensemble", 1));
    const int every = c.get_int("record_every", 1);
    if (every < 1) throw ConfigError("config: record_every must be >= 1");

    // T = 0 means emit only the initial data
    const bool initial_only = c.get_double("T", 1.0) == 0.0;

    int K = 0;
    std::vector<std::vector<std::vector<double>>> all(ensemble);
    std::vector<int> blew(ensemble, 0);

    if (model == "wave" || model == "averaged" || model == "fast-frozen") {
        RunConfig cc = c;
        if (initial_only) cc.set("T", "1");  // params validate; no steps taken
        const WaveParams p = wave_params_from(cc);
        K = p.K;
        const SpectralField u0 = field_from(c, "u0", K);
        const SpectralField u1 = field_from(c, "u1", K);
        const std::vector<double> zeros(K, 0.0);
        run_indexed(ensemble, ctx.threads, [&](std::size_t i) {
            RngStream rng(ctx.seed, i, "simulate");
            auto& rows = all[i];
            try {
                if (initial_only) {
                    append_series_row(rows, 0.0, u0.c,
                                      model == "wave" ? u1.c : zeros);
                } else if (model == "wave") {
                    WaveIntegrator integ(p);
                    const auto tr = integ.simulate(u0, u1, rng, every);
                    for (std::size_t j = 0; j < tr.times.size(); ++j)
                        append_series_row(rows, tr.times[j], tr.u[j].c,
                                          tr.v[j].c);
                } else if (model == "averaged") {
                    AveragedIntegrator integ(p);
                    const auto tr = integ.simulate(u0, rng, every);
                    for (std::size_t j = 0; j < tr.times.size(); ++j)
                        append_series_row(rows, tr.times[j], tr.u[j].c, zeros);
                } else {
                    const auto tr = simulate_fast_frozen(p, u0, u1, rng, every);
                    for (std::size_t j = 0; j < tr.times.size(); ++j)
                        append_series_row(rows, tr.times[j], u0.c, tr.v[j].c);
                }
            } catch (const BlowUpError&) {
                blew[i] = 1;  // keep the rows accumulated so far
            }
        });
    } else if (model == "ssm") {
        const SsmParams p = ssm_params_from(c);
        const double dt = c.get_double("dt", 1e-3);
        const double T = c.get_double("T", 1.0);
        const double a0 = c.get_double("a0", 0.1);
        K = p.K_ssm;
        // start on the deterministic manifold through a0
        const double ad0 = p.beta_prime * a0 - 0.75 * a0 * a0 * a0;
        SpectralField u0(SineBasis{K, Normalization::PlainSin}), v0(u0.basis);
        u0.c[0] = a0;
        u0.c[2] = a0 * a0 * a0 / 32.0;
        v0.c[0] = ad0;
        v0.c[2] = ad0 * (3.0 / 32.0) * a0 * a0 + mu(3) * u0.c[2];
        const long nsteps = initial_only ? 0 : std::lround(T / dt);
        HomotopyIntegrator integ(p, dt);
        run_indexed(ensemble, ctx.threads, [&](std::size_t i) {
            RngStream rng(ctx.seed, i, "simulate");
            auto& rows = all[i];
            SpectralField u = u0, v = v0;
            append_series_row(rows, 0.0, u.c, v.c);
            try {
                for (long n = 1; n <= nsteps; ++n) {
                    integ.step(u, v, rng);
                    if (n % every == 0 || n == nsteps)
                        append_series_row(rows, n * dt, u.c, v.c);
                }
            } catch (const std::runtime_error&) {
                blew[i] = 1;
            }
        });
    } else {
        throw ConfigError("config: model must be wave, averaged, fast-frozen or ssm");
    }

    const auto header = series_header(K);
    for (std::size_t i = 0; i < ensemble; ++i) {
        const std::string name = traj_name(i);
        write_csv((std::filesystem::path(ctx.outdir) / name).string(), header,
                  all[i]);
        ctx.files.push_back(name);
        ctx.aborts += blew[i];
    }
    ctx.finish();
    return ctx.aborts > 0 ? 3 : 0;
}

int cmd_weak_error(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const auto nu_grid = c.get_list("nu_grid");
    if (nu_grid.size() < 3)
        throw ConfigError("config: nu_grid needs at least 3 points");
    const std::size_t ensemble =
        static_cast<std::size_t>(c.get_int("ensemble", 1024));
    const std::string coupling = c.get_string("coupling", "common");
    if (coupling != "common" && coupling != "independent")
        throw ConfigError("config: coupling must be common or independent");
    const int phi_mode = c.get_int("phi_mode", 1);

    std::vector<WeakErrorRow> table;
    std::vector<json> rows;
    for (std::size_t g = 0; g < nu_grid.size(); ++g) {
        RunConfig cc = c;
        cc.set("nu", format_double(nu_grid[g]));
        const WaveParams p = wave_params_from(cc);
        if (phi_mode < 1 || phi_mode > p.K)
            throw ConfigError("config: phi_mode outside 1..K");
        const SpectralField u0 = field_from(c, "u0", p.K);
        const SpectralField u1 = field_from(c, "u1", p.K);
        const std::string tag = "weak-" + std::to_string(g);

        std::vector<double> vals(ensemble, 0.0);
        std::vector<int> ok(ensemble, 0);
        WeakErrorRow row;
        row.nu = nu_grid[g];
        if (coupling == "common") {
            const CoupledPair pair(p);
            run_indexed(ensemble, ctx.threads, [&](std::size_t i) {
                RngStream rng(ctx.seed, i, tag);
                try {
                    const auto [full, avg] = pair.run(u0, u1, rng);
                    vals[i] = full.u.c[phi_mode - 1] - avg.c[phi_mode - 1];
                    ok[i] = 1;
                } catch (const BlowUpError&) {
                }
            });
            std::vector<double> kept;
            for (std::size_t i = 0; i < ensemble; ++i)
                if (ok[i])
                    kept.push_back(vals[i]);
                else
                    ++ctx.aborts;
            const SummaryStats s = summarize(kept);
            row.error = std::abs(s.mean);
            row.std_error = s.std_error;
        } else {
            const WaveIntegrator wave(p);
            const AveragedIntegrator avg(p);
            std::vector<double> va(ensemble, 0.0);
            std::vector<int> oka(ensemble, 0);
            run_indexed(ensemble, ctx.threads, [&](std::size_t i) {
                try {
                    RngStream rf(ctx.seed, i, tag + "-full");
                    const auto tf = wave.simulate(u0, u1, rf,
                                                  1 << 30);  // endpoints only
                    vals[i] = tf.u.back().c[phi_mode - 1];
                    ok[i] = 1;
                } catch (const BlowUpError&) {
                }
                try {
                    RngStream ra(ctx.seed, i, tag + "-avg");
                    const auto ta = avg.simulate(u0, ra, 1 << 30);
                    va[i] = ta.u.back().c[phi_mode - 1];
                    oka[i] = 1;
                } catch (const BlowUpError&) {
                }
            });
            std::vector<double> kf, ka;
            for (std::size_t i = 0; i < ensemble; ++i) {
                if (ok[i])
                    kf.push_back(vals[i]);
                else
                    ++ctx.aborts;
                if (oka[i])
                    ka.push_back(va[i]);
                else
                    ++ctx.aborts;
            }
            const SummaryStats sf = summarize(kf), sa = summarize(ka);
            row.error = std::abs(sf.mean - sa.mean);
            row.std_error = std::hypot(sf.std_error, sa.std_error);
        }
        row.conclusive = row.error > 2.0 * row.std_error;
        table.push_back(row);
        rows.push_back(json{{"nu", row.nu},
                            {"error", row.error},
                            {"std_error", row.std_error},
                            {"conclusive", row.conclusive}});
    }

    json fit;
    try {
        const OrderFit f = order_fit(table);
        fit = json{{"fit_refused", false},
                   {"slope", f.rate},
                   {"r2", f.r2},
                   {"rows_used", f.rows_used}};
    } catch (const std::invalid_argument& e) {
        fit = json{{"fit_refused", true}, {"reason", e.what()}};
    }
    rows.push_back(fit);
    write_jsonl((std::filesystem::path(ctx.outdir) / "weak_error.jsonl").string(),
                rows);
    ctx.files.push_back("weak_error.jsonl");
    ctx.finish();
    return 0;
}

int cmd_fast_ou_stats(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const WaveParams p = wave_params_from(ctx.cfg);
    const SpectralField u0 = field_from(c, "u0", p.K);
    const double burn_in = c.get_double("burn_in", 50.0 * p.nu);
    const double tol = c.get_double("tol_rel", 0.05);
    const std::size_t ensemble =
        static_cast<std::size_t>(c.get_int("ensemble", 256));

    const int skip = static_cast<int>(std::ceil(burn_in / p.dt));
    const SpectralField v0(u0.basis);
    std::vector<FastTrajectory> trajs(ensemble);
    run_indexed(ensemble, ctx.threads, [&](std::size_t i) {
        RngStream rng(ctx.seed, i, "fast-ou");
        trajs[i] = simulate_fast_frozen(p, u0, v0, rng);
    });
    const SpectralField& target = trajs[0].mean_target;
    const double rho = std::exp(-p.dt / p.nu);
    const double ess_factor = (1.0 - rho) / (1.0 + rho);

    std::vector<json> rows;
    bool pass = true;
    for (int k = 1; k <= p.K; ++k) {
        std::vector<double> samples;
        for (const auto& tr : trajs)
            for (std::size_t j = skip; j < tr.v.size(); ++j)
                samples.push_back(tr.v[j].c[k - 1]);
        const SummaryStats s = summarize(samples);
        const double ess = static_cast<double>(samples.size()) * ess_factor;
        const double se_mean = std::sqrt(s.variance / ess);
        const double var_target = std::pow(p.nu, 2.0 * p.alpha - 1.0) *
                                  (k <= p.noise.K() ? p.noise.b[k - 1] : 0.0) /
                                  2.0;
        const double mean_err = std::abs(s.mean - target.c[k - 1]);
        const bool mean_ok = mean_err <= 3.0 * se_mean;
        const bool var_ok = var_target > 0.0
                                ? std::abs(s.variance / var_target - 1.0) <= tol
                                : s.variance == 0.0;
        pass = pass && mean_ok && var_ok;
        rows.push_back(json{{"mode", k},
                            {"mean", s.mean},
                            {"mean_target", target.c[k - 1]},
                            {"se_mean", se_mean},
                            {"ess", ess},
                            {"variance", s.variance},
                            {"variance_target", var_target},
                            {"mean_ok", mean_ok},
                            {"variance_ok", var_ok}});
    }
    rows.push_back(json{{"pass", pass}});
    write_jsonl((std::filesystem::path(ctx.outdir) / "fast_ou_stats.jsonl").string(),
                rows);
    ctx.files.push_back("fast_ou_stats.jsonl");
    ctx.finish();
    if (!pass) throw CheckFailed("fast-ou-stats: stationary law check failed");
    return 0;
}

int cmd_martingale_qv(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const WaveParams p = wave_params_from(ctx.cfg);
    const int phi_mode = c.get_int("phi_mode", 1);
    if (phi_mode < 1 || phi_mode > p.K)
        throw ConfigError("config: phi_mode outside 1..K");
    const int window = c.get_int("qv_window", 50);
    const double tol = c.get_double("tol_rel", 0.10);
    const std::size_t ensemble =
        static_cast<std::size_t>(c.get_int("ensemble", 200));
    const SpectralField u0 = field_from(c, "u0", p.K);
    const SpectralField u1 = field_from(c, "u1", p.K);
    SpectralField phi(u0.basis);
    phi.c[phi_mode - 1] = 1.0;

    std::vector<std::vector<double>> qvs(ensemble);
    std::vector<double> qv_times;
    run_indexed(ensemble, ctx.threads, [&](std::size_t i) {
        RngStream rng(ctx.seed, i, "martingale");
        const WaveIntegrator integ(p);
        const auto tr = integ.simulate(u0, u1, rng);
        const auto m = martingale_process(tr, phi, p.nu, p.beta);
        const auto qv = realized_qv(tr.times, m, window);
        qvs[i] = qv.qv;
        if (i == 0) qv_times = qv.times;
    });
    std::vector<double> qv_mean(qv_times.size(), 0.0);
    for (const auto& q : qvs)
        for (std::size_t j = 0; j < q.size(); ++j) qv_mean[j] += q[j];
    for (double& x : qv_mean) x /= static_cast<double>(ensemble);

    const LineFit fit = fit_line(qv_times, qv_mean);
    const double qphi = (phi_mode <= p.noise.K() ? p.noise.b[phi_mode - 1] : 0.0);
    const bool slope_ok = std::abs(fit.slope - qphi) <= tol * qphi;
    const bool r2_ok = fit.r2 > 0.99;

    std::vector<json> rows;
    for (std::size_t j = 0; j < qv_times.size(); ++j)
        rows.push_back(json{{"t", qv_times[j]}, {"qv_mean", qv_mean[j]}});
    rows.push_back(json{{"slope", fit.slope},
                        {"target", qphi},
                        {"r2", fit.r2},
                        {"slope_ok", slope_ok},
                        {"r2_ok", r2_ok},
                        {"pass", slope_ok && r2_ok}});
    write_jsonl((std::filesystem::path(ctx.outdir) / "martingale_qv.jsonl").string(),
                rows);
    ctx.files.push_back("martingale_qv.jsonl");
    ctx.finish();
    if (!(slope_ok && r2_ok))
        throw CheckFailed("martingale-qv: quadratic variation check failed");
    return 0;
}

int cmd_ssm_residual(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const SsmParams p = ssm_params_from(c);
    const std::string mode = c.get_string("residual_mode", "deterministic");
    ResidualReport rep;
    bool pass;
    if (mode == "deterministic") {
        std::vector<double> as =
            c.has("a_grid") ? c.get_list("a_grid")
                            : std::vector<double>{0.2, 0.1, 0.05};
        rep = residual_deterministic(p, as);
        const double tol = c.get_double("tol_slope", 0.3);
        pass = std::abs(rep.slope - 5.0) <= tol;
    } else if (mode == "linear-noise") {
        std::vector<double> nus =
            c.has("nu_grid") ? c.get_list("nu_grid")
                             : std::vector<double>{0.02, 0.01, 0.005};
        const double h = c.get_double("h", 0.1);
        const int nsteps = c.get_int("nsteps", 20000);
        const int burn = c.get_int("burn_in_steps", 3000);
        rep = residual_linear_noise(p, nus, h, nsteps, burn, ctx.seed);
        pass = rep.slope >= c.get_double("tol_slope", 1.5);
    } else {
        throw ConfigError(
            "config: residual_mode must be deterministic or linear-noise");
    }
    std::vector<json> rows;
    for (std::size_t i = 0; i < rep.xs.size(); ++i)
        rows.push_back(json{{"x", rep.xs[i]}, {"residual", rep.norms[i]}});
    rows.push_back(
        json{{"slope", rep.slope}, {"r2", rep.r2}, {"pass", pass}});
    write_jsonl((std::filesystem::path(ctx.outdir) / "ssm_residual.jsonl").string(),
                rows);
    ctx.files.push_back("ssm_residual.jsonl");
    ctx.finish();
    if (!pass) throw CheckFailed("ssm-residual: slope check failed");
    return 0;
}

int cmd_ssm_compare(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const int n = c.get_int("n_checks", 10000);
    RngStream rng(ctx.seed, 0, "ssm-compare");
    int mismatches = 0;
    double maxdiff = 0.0;
    for (int i = 0; i < n; ++i) {
        SsmParams p;
        p.nu = 1e-12 + 0.5 * rng.uniform();  // irrelevant to the comparison
        p.gamma = rng.uniform();
        p.beta_prime = 0.2 * (rng.uniform() - 0.5);
        p.sigma = rng.uniform();
        p.amps = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(),
                  rng.uniform()};
        p.K_ssm = 5;
        OuBank bank(p, 0.01);
        bank.step(rng);
        const double a = 0.4 * (rng.uniform() - 0.5);
        SsmParams p0 = p;
        p0.nu = 0.0;  // evaluation only; the bank already exists
        const double lhs = averaged_ssm_drift_diffusion(a, p, bank);
        const double rhs = ssm_drift_diffusion(a, p0, bank);
        const double diff = std::abs(lhs - rhs);
        maxdiff = std::max(maxdiff, diff);
        if (lhs != rhs) ++mismatches;
    }
    const bool pass = mismatches == 0;
    std::vector<json> rows{json{{"n_checks", n},
                                {"mismatches", mismatches},
                                {"max_abs_diff", maxdiff},
                                {"pass", pass}}};
    write_jsonl((std::filesystem::path(ctx.outdir) / "ssm_compare.jsonl").string(),
                rows);
    ctx.files.push_back("ssm_compare.jsonl");
    ctx.finish();
    if (!pass) throw CheckFailed("ssm-compare: models disagree");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral simulation lab for a singularly perturbed damped "
                 "wave equation and its averaged model"};
    app.require_subcommand(1);

    std::string config_path, outdir;
    uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;

    const std::vector<std::string> names = {"simulate",      "weak-error",
                                            "fast-ou-stats", "martingale-qv",
                                            "ssm-residual",  "ssm-compare"};
    for (const auto& n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "experiment config file")
            ->required();
        sub->add_option("--seed", seed, "master seed (overrides config)")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--threads", threads, "worker threads");
        sub->add_option("--out", outdir, "output directory (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands()[0]->get_name();

    try {
        Ctx ctx;
        ctx.cfg = RunConfig::parse_file(config_path);
        ctx.seed = seed_given ? seed : ctx.cfg.get_u64("seed", 0);
        ctx.threads = threads;
        ctx.outdir =
            !outdir.empty() ? outdir : ctx.cfg.get_string("outputs", "out");
        std::filesystem::create_directories(ctx.outdir);

        if (cmd == "simulate") return cmd_simulate(ctx);
        if (cmd == "weak-error") return cmd_weak_error(ctx);
        if (cmd == "fast-ou-stats") return cmd_fast_ou_stats(ctx);
        if (cmd == "martingale-qv") return cmd_martingale_qv(ctx);
        if (cmd == "ssm-residual") return cmd_ssm_residual(ctx);
        return cmd_ssm_compare(ctx);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const BlowUpError& e) {
        std::fprintf(stderr, "blow-up: %s\n", e.what());
        return 3;
    } catch (const CheckFailed& e) {
        std::fprintf(stderr, "check failed: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
