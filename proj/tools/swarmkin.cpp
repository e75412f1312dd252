// Command-line harness: simulation, fixed-point analysis, kinetic solves,
// Monte Carlo closure checks, packaged experiment recipes, and parameter
// sweeps, all emitting CSV next to a plain-text report.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swarmkin/abm.hpp"
#include "swarmkin/kinetic.hpp"
#include "swarmkin/limits.hpp"
#include "swarmkin/meanfield.hpp"
#include "swarmkin/recipes.hpp"

using namespace swarmkin;

namespace {

std::string strf(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

struct GlobalArgs {
    std::string config;
    std::uint64_t seed = kDefaultSeed;
    bool seed_given = false;
    std::string out_dir = "swarmkin_out";
    int workers = 0;
    bool force = false;

    ModelParams params() const {
        ModelParams p = config.empty() ? ModelParams{} : load_config(config);
        if (seed_given) p.seed = seed;
        return p;
    }
    RecipeOptions options() const {
        RecipeOptions opt;
        opt.out_dir = out_dir;
        opt.seed = seed_given ? seed : kDefaultSeed;
        opt.workers = workers;
        opt.force = force;
        return opt;
    }
};

int cmd_simulate_abm(const GlobalArgs& g, long long steps, int stride,
                     std::string out, std::string hist_out) {
    ModelParams p = validate_params(g.params());
    RunRecorders rec;
    rec.u_stride = stride;
    rec.histogram = true;
    const RunResult res = run(p, steps, rec);

    if (out.empty()) out = join_path(g.out_dir, "abm_u.csv");
    if (hist_out.empty()) hist_out = join_path(g.out_dir, "abm_hist.csv");
    std::string csv = "time,u\n";
    for (std::size_t i = 0; i < res.series.size(); ++i)
        csv += strf("%.12g,%.12g\n", res.series.t[i], res.series.u[i]);
    write_text_file(out, csv, g.force);

    std::string hist = "bin_center,probability_mass\n";
    for (int r = 0; r <= p.n_agents; ++r)
        hist += strf("%.12g,%.12g\n", (2.0 * r - p.n_agents) / p.n_agents,
                     res.histogram[static_cast<std::size_t>(r)]);
    write_text_file(hist_out, hist, g.force);
    std::printf("wrote %s and %s (%lld steps, %lld switches)\n", out.c_str(),
                hist_out.c_str(), steps, res.total_switches);
    return 0;
}

int cmd_analyze_fp(const GlobalArgs& g, std::string out, std::string density_out) {
    ModelParams p = validate_params(g.params());
    if (out.empty()) out = join_path(g.out_dir, "fixed_points.csv");
    if (density_out.empty()) density_out = join_path(g.out_dir, "stationary_density.csv");

    const NoiseRegime regime = classify_regime(p);
    std::string row = regime == NoiseRegime::SmallNoise ? "small_noise" : "large_noise";
    const auto us = ordered_state(p);
    row += us ? strf(",%.12g", *us) : ",";
    row += strf(",%.12g", curvature_at_zero(p));
    if (regime == NoiseRegime::SmallNoise)
        row += strf(",%.12g", kramers_time(p));
    else
        row += ",";
    const int r0 = nearest_lattice_index(-0.9, p.n_agents);
    const int r1 = nearest_lattice_index(+0.9, p.n_agents);
    row += strf(",%.12g", master_equation_mfpt(p, r0, r1));
    write_text_file(out, "regime,u_s,curvature_at_zero,tau_kramers,tau_exact\n" + row + "\n",
                    g.force);

    const StationaryDensity d = stationary_density(p);
    std::string csv = "u,density\n";
    for (std::size_t i = 0; i < d.u.size(); ++i)
        csv += strf("%.12g,%.12g\n", d.u[i], d.p[i]);
    write_text_file(density_out, csv, g.force);
    std::printf("wrote %s and %s\n", out.c_str(), density_out.c_str());
    return 0;
}

int cmd_solve_kinetic(const GlobalArgs& g, const std::string& closure_str, int M,
                      double T, double dt, std::vector<double> snapshots,
                      std::string out_prefix) {
    ModelParams p = g.params();
    ClosureModel c = closure_from_string(closure_str);
    if (c.kind == ClosureModel::Kind::Nonlocal ||
        c.kind == ClosureModel::Kind::NonlocalRegularized)
        c.kernel = p.kernel;
    if (dt <= 0.0) dt = 1.0 / M;
    if (out_prefix.empty()) out_prefix = join_path(g.out_dir, "kinetic");

    SolveRecorders rec;
    rec.snapshot_times = snapshots;
    rec.diag_stride = 1;
    const SolveResult res = solve(counterflow_blocks(M), c, p, T, dt, rec);

    for (const Snapshot& s : res.snapshots) {
        std::string csv = "x,p_plus,p_minus,rho,j,u\n";
        for (int i = 0; i < s.field.cells; ++i) {
            auto k = static_cast<std::size_t>(i);
            csv += strf("%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", (i + 0.5) * s.field.dx,
                        s.field.pp[k], s.field.pm[k], s.field.rho(i), s.field.flux(i),
                        s.u[k]);
        }
        write_text_file(strf("%s_t%g.csv", out_prefix.c_str(), s.time), csv, g.force);
    }
    std::string diag = "time,mass,l2_j,l2_rho\n";
    for (const DiagRow& d : res.diagnostics)
        diag += strf("%.12g,%.12g,%.12g,%.12g\n", d.time, d.mass, d.l2_j, d.l2_rho);
    write_text_file(out_prefix + "_diag.csv", diag, g.force);
    std::printf("solved %s closure to T=%g on %d cells; outputs at %s_*\n",
                closure_to_string(c).c_str(), T, M, out_prefix.c_str());
    return 0;
}

int cmd_chaos_check(const GlobalArgs& g, const std::string& mode,
                    std::vector<int> n_list, double z, int replicates,
                    std::string out) {
    ModelParams p = g.params();
    if (out.empty()) out = join_path(g.out_dir, "chaos_" + mode + ".csv");
    if (n_list.empty()) n_list = {100, 1000, 10000};
    const std::uint64_t seed = g.seed_given ? g.seed : p.seed;

    std::string csv = "N,estimate,stderr,limit_value\n";
    if (mode == "qn" || mode == "rn") {
        const SampledPopulation pop = demo_wavy_population();
        const InteractionKernel kern =
            p.kernel.type == KernelType::Dirac ? InteractionKernel::tophat(0.2) : p.kernel;
        for (int N : n_list) {
            const double lim = quadrature_Q_limit(pop, kern, z, N);
            const McEstimate est = mode == "qn" ? mc_QN(pop, kern, N, z, replicates, seed)
                                                : mc_RN(pop, kern, N, z, replicates, seed);
            csv += strf("%d,%.12g,%.12g,%.12g\n", N, est.mean, est.stderr_,
                        mode == "qn" ? lim : lim * lim);
        }
    } else if (mode.rfind("shrink:", 0) == 0) {
        const double alpha = std::stod(mode.substr(7));
        const SampledPopulation pop = demo_uniform_population();
        const auto rows = mc_shrink_limits(pop, alpha, n_list, z, replicates, seed);
        for (const ShrinkRow& r : rows) {
            csv += strf("%d,%.12g,%.12g,%.12g\n", r.n_agents, r.Q_est, r.Q_se, r.Q_limit);
            csv += strf("%d,%.12g,%.12g,%.12g\n", r.n_agents, r.R_est, r.R_se, r.R_limit);
        }
    } else {
        throw std::invalid_argument("unknown mode '" + mode +
                                    "' (expected qn|rn|shrink:<alpha>)");
    }
    write_text_file(out, csv, g.force);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled velocity-jump swarm simulator and numerics toolkit"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config, "model config file (key = value lines)");
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (overrides config)");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--workers", g.workers, "worker threads (0 = all cores)");
    app.add_flag("--force", g.force, "overwrite existing output files");

    auto* sim = app.add_subcommand("simulate-abm", "run the agent simulation");
    long long steps = 100000;
    int stride = 1;
    std::string sim_out, sim_hist;
    sim->add_option("--steps", steps, "number of time steps");
    sim->add_option("--record-u", stride, "record u every this many steps");
    sim->add_option("--out", sim_out, "series CSV path (time,u)");
    sim->add_option("--hist-out", sim_hist, "histogram CSV path");

    auto* afp = app.add_subcommand("analyze-fp", "potential / stationary analysis");
    std::string afp_out, afp_density;
    afp->add_option("--out", afp_out, "summary CSV path");
    afp->add_option("--density-out", afp_density, "stationary density CSV path");

    auto* kin = app.add_subcommand("solve-kinetic", "solve the two-speed kinetic system");
    std::string closure = "nonlocal";
    int grid = 400;
    double T = 25.0, kdt = 0.0;
    std::vector<double> snaps;
    std::string prefix;
    kin->add_option("--closure", closure, "nonlocal|regularized:<eps>|dirac|alpha1|telegraph");
    kin->add_option("--grid", grid, "number of cells");
    kin->add_option("--T", T, "final time");
    kin->add_option("--dt", kdt, "time step (default dx)");
    kin->add_option("--snapshots", snaps, "snapshot times")->delimiter(',');
    kin->add_option("--out-prefix", prefix, "output path prefix");

    auto* chaos = app.add_subcommand("chaos-check", "Monte Carlo closure verification");
    std::string mode = "qn";
    std::vector<int> n_list;
    double z = 0.2;
    int replicates = 10000;
    std::string chaos_out;
    chaos->add_option("--mode", mode, "qn|rn|shrink:<alpha>");
    chaos->add_option("--N-list", n_list, "population sizes")->delimiter(',');
    chaos->add_option("--z", z, "probe point in [0,1)");
    chaos->add_option("--replicates", replicates, "Monte Carlo replicates");
    chaos->add_option("--out", chaos_out, "output CSV path");

    auto* rcp = app.add_subcommand("recipe", "run a packaged experiment");
    std::string recipe_name;
    rcp->add_option("name", recipe_name, "recipe name")->required();

    auto* swp = app.add_subcommand("sweep", "sweep one parameter axis");
    std::string axis;
    std::vector<double> values;
    std::string sweep_out;
    swp->add_option("--axis", axis, "gamma0|b|n_agents|dt|gamma0_scaled")->required();
    swp->add_option("--values", values, "axis values")->delimiter(',')->required();
    swp->add_option("--out", sweep_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);
    g.seed_given = seed_opt->count() > 0;

    try {
        if (sim->parsed()) return cmd_simulate_abm(g, steps, stride, sim_out, sim_hist);
        if (afp->parsed()) return cmd_analyze_fp(g, afp_out, afp_density);
        if (kin->parsed())
            return cmd_solve_kinetic(g, closure, grid, T, kdt, snaps, prefix);
        if (chaos->parsed())
            return cmd_chaos_check(g, mode, n_list, z, replicates, chaos_out);
        if (rcp->parsed()) {
            const RecipeReport rep = run_recipe(recipe_name, g.options());
            std::fputs(rep.render().c_str(), stdout);
            return rep.all_pass() ? 0 : 1;
        }
        if (swp->parsed()) {
            if (sweep_out.empty()) sweep_out = join_path(g.out_dir, "sweep_" + axis + ".csv");
            sweep_axis(g.params(), axis, values, sweep_out, g.options());
            std::printf("wrote %s\n", sweep_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
