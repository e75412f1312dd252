#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmkin/params.hpp"
#include "swarmkin/recipes.hpp"

using namespace swarmkin;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    const fs::path d = fs::temp_directory_path() / ("swarmkin_tests_" + leaf);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct SweepCell {
    double axis_value = 0.0;
    std::string metric;
    double value = 0.0;
};

std::vector<SweepCell> parse_sweep(const fs::path& csv) {
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "axis,axis_value,metric,value");
    std::vector<SweepCell> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string axis, av, metric, val;
        std::getline(ls, axis, ',');
        std::getline(ls, av, ',');
        std::getline(ls, metric, ',');
        std::getline(ls, val, ',');
        cells.push_back({std::stod(av), metric, std::stod(val)});
    }
    return cells;
}

} // namespace

TEST_CASE("text output helper refuses overwrites without force") {
    const fs::path dir = fresh_dir("writer");
    const fs::path p = dir / "nested" / "a.txt";
    write_text_file(p.string(), "one\n", false);   // creates parent directories
    CHECK(slurp(p) == "one\n");
    try {
        write_text_file(p.string(), "two\n", false);
        FAIL("expected an overwrite rejection");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.rfind("output exists: ", 0) == 0);
        CHECK(what.find("(use --force to overwrite)") != std::string::npos);
    }
    CHECK(slurp(p) == "one\n");                    // original survives
    write_text_file(p.string(), "two\n", true);
    CHECK(slurp(p) == "two\n");
    fs::remove_all(dir);
}

TEST_CASE("parallel map covers every index and forwards exceptions") {
    for (int workers : {1, 4}) {
        std::vector<std::atomic<int>> hits(97);
        parallel_for(97, workers, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
    parallel_for(0, 4, [](int) { FAIL("no work expected"); });
    CHECK_THROWS_WITH_AS(parallel_for(8, 4,
                                      [](int i) {
                                          if (i == 3) throw std::runtime_error("boom");
                                      }),
                         "boom", std::runtime_error);
}

TEST_CASE("report rendering") {
    RecipeReport rep;
    rep.recipe = "demo";
    rep.checks.push_back({"first", true, "ok"});
    rep.checks.push_back({"second", false, "off by 2"});
    rep.outputs.push_back("x.csv");
    CHECK_FALSE(rep.all_pass());
    const std::string txt = rep.render();
    CHECK(txt.find("recipe: demo\n") == 0);
    CHECK(txt.find("[PASS] first: ok\n") != std::string::npos);
    CHECK(txt.find("[FAIL] second: off by 2\n") != std::string::npos);
    CHECK(txt.find("wrote: x.csv\n") != std::string::npos);
    CHECK(txt.find("overall: FAIL\n") != std::string::npos);
    rep.checks.pop_back();
    CHECK(rep.all_pass());
    CHECK(rep.render().find("overall: PASS\n") != std::string::npos);
}

TEST_CASE("recipe catalogue and unknown-name rejection") {
    const auto& names = recipe_names();
    REQUIRE(names.size() == 6);
    CHECK(names[0] == "fig1_transition");
    CHECK(names[5] == "chaos_tables");
    RecipeOptions opt;
    CHECK_THROWS_WITH_AS(
        run_recipe("nope", opt),
        "unknown recipe 'nope' (valid: fig1_transition fig2_noise_regimes "
        "fig3_nonlocal_longtime fig4_dirac_longtime switching_time_table chaos_tables)",
        std::invalid_argument);
}

TEST_CASE("deterministic reruns produce identical data files") {
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    RecipeOptions oa, ob;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    oa.workers = ob.workers = 2;

    const RecipeReport ra = run_recipe("fig3_nonlocal_longtime", oa);
    const RecipeReport rb = run_recipe("fig3_nonlocal_longtime", ob);
    CHECK(ra.recipe == "fig3_nonlocal_longtime");
    CHECK(ra.all_pass());
    for (const std::string& out : ra.outputs) CHECK(fs::exists(out));
    for (const char* leaf :
         {"kinetic_t0.csv", "kinetic_t5.csv", "kinetic_t25.csv", "diagnostics_nonlocal.csv"})
        CHECK(slurp(a / leaf) == slurp(b / leaf));

    // a second run into an occupied directory is refused, force overwrites
    CHECK_THROWS_AS(run_recipe("fig3_nonlocal_longtime", oa), std::runtime_error);
    oa.force = true;
    CHECK_NOTHROW(run_recipe("fig3_nonlocal_longtime", oa));

    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("agent-based recipe is reproducible under a fixed seed") {
    const fs::path a = fresh_dir("abm_a"), b = fresh_dir("abm_b");
    RecipeOptions oa, ob;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    oa.seed = ob.seed = 123;
    const RecipeReport ra = run_recipe("fig1_transition", oa);
    const RecipeReport rb = run_recipe("fig1_transition", ob);
    for (const char* leaf : {"hist_N5.csv", "hist_N7.csv", "hist_N12.csv"})
        CHECK(slurp(a / leaf) == slurp(b / leaf));
    CHECK(ra.checks.size() == rb.checks.size());
    for (std::size_t i = 0; i < ra.checks.size(); ++i)
        CHECK(ra.checks[i].pass == rb.checks[i].pass);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("sweep argument validation") {
    ModelParams base;
    base.gamma0 = 0.3;
    base.b = 1.0;
    RecipeOptions opt;
    opt.out_dir = fresh_dir("sweep_bad").string();
    CHECK_THROWS_WITH_AS(sweep_axis(base, "radius", {1.0}, "s.csv", opt),
                         "unknown sweep axis 'radius' "
                         "(valid: gamma0 b n_agents dt gamma0_scaled)",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(sweep_axis(base, "b", {}, "s.csv", opt),
                         "sweep needs at least one value", std::invalid_argument);
    ModelParams zero = base;
    zero.gamma0 = 0.0;
    CHECK_THROWS_WITH_AS(sweep_axis(zero, "gamma0_scaled", {0.5}, "s.csv", opt),
                         "gamma0_scaled needs base gamma0 > 0", std::invalid_argument);
    fs::remove_all(opt.out_dir);
}

TEST_CASE("population sweep recovers the barrier growth rate") {
    const fs::path dir = fresh_dir("sweep_n");
    ModelParams base;
    base.gamma0 = 0.3;
    base.b = 1.0;
    base.dt = 0.01;
    base.n_agents = 20;
    RecipeOptions opt;
    opt.out_dir = dir.string();
    opt.workers = 2;
    const fs::path csv = dir / "n_sweep.csv";
    const std::vector<double> Ns{20, 30, 40, 50, 60};
    sweep_axis(base, "n_agents", Ns, csv.string(), opt);

    const auto cells = parse_sweep(csv);
    std::vector<double> n_vals, ln_tau;
    for (const auto& c : cells) {
        if (c.metric == "ln_tau_kramers") {
            n_vals.push_back(c.axis_value);
            ln_tau.push_back(c.value);
        }
        if (c.metric == "regime_small_noise") CHECK(c.value == 1.0);
        if (c.metric == "tau_exact") CHECK(c.value > 0.0);
    }
    REQUIRE(n_vals.size() == Ns.size());

    // least-squares slope of ln(escape time) against N; the exponential barrier
    // grows affinely in N with per-agent rate (1-g)/2 + g ln(2g/(1+g)), g = gamma0/b
    double nb = 0.0, yb = 0.0;
    for (std::size_t i = 0; i < n_vals.size(); ++i) {
        nb += n_vals[i];
        yb += ln_tau[i];
    }
    nb /= n_vals.size();
    yb /= n_vals.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n_vals.size(); ++i) {
        sxy += (n_vals[i] - nb) * (ln_tau[i] - yb);
        sxx += (n_vals[i] - nb) * (n_vals[i] - nb);
    }
    const double slope = sxy / sxx;
    const double g = base.gamma0 / base.b;
    const double rate = 0.5 * (1.0 - g) + g * std::log(2.0 * g / (1.0 + g));
    CHECK(std::fabs(slope - rate) <= 0.05 * std::fabs(rate));

    // same seed, same bytes
    const fs::path csv2 = dir / "n_sweep2.csv";
    sweep_axis(base, "n_agents", Ns, csv2.string(), opt);
    CHECK(slurp(csv) == slurp(csv2));
    fs::remove_all(dir);
}

TEST_CASE("packaged demo populations") {
    const auto uni = demo_uniform_population();
    REQUIRE(uni.cells() == 64);
    for (int i = 0; i < 64; ++i) {
        CHECK(uni.rho()[static_cast<std::size_t>(i)] == 1.0);
        CHECK(uni.j()[static_cast<std::size_t>(i)] == 0.4);
    }
    const auto wavy = demo_wavy_population();
    REQUIRE(wavy.cells() == 64);
    double mass = 0.0;
    for (int i = 0; i < 64; ++i) {
        auto k = static_cast<std::size_t>(i);
        CHECK(wavy.rho()[k] >= 0.0);
        CHECK(std::fabs(wavy.j()[k]) <= wavy.rho()[k]);
        mass += wavy.rho()[k] * wavy.dx();
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}
