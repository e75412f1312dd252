#pragma once
// Named end-to-end experiments: each one binds the simulator, the analysis
// code, and the kinetic solver into a fixed (parameters, seed, duration)
// bundle, writes CSV data files, and emits a summary report whose check lines
// carry explicit pass/fail bounds.  Also the generic one-axis parameter sweep
// and the tiny CSV/report plumbing shared by the command-line tool.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swarmkin/limits.hpp"
#include "swarmkin/params.hpp"

namespace swarmkin {

// fixtures shared by the chaos_tables recipe and the chaos-check subcommand:
// a smooth nonuniform (rho, j) profile and the flat rho=1, j=0.4 state
SampledPopulation demo_wavy_population();
SampledPopulation demo_uniform_population();

// default seed for every packaged experiment; chosen once so the shipped
// outputs are reproducible byte-for-byte
inline constexpr std::uint64_t kDefaultSeed = 7;

struct RecipeOptions {
    std::string out_dir = "swarmkin_out";
    std::uint64_t seed = kDefaultSeed;
    int workers = 0;       // 0 = hardware concurrency
    bool force = false;    // allow overwriting existing outputs
};

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RecipeReport {
    std::string recipe;
    std::vector<CheckLine> checks;
    std::vector<std::string> outputs;   // files written
    bool all_pass() const;
    std::string render() const;         // the summary text
};

const std::vector<std::string>& recipe_names();

// Runs one named recipe end to end; throws on unknown names and on output
// collisions (existing files are never overwritten unless opt.force).
RecipeReport run_recipe(const std::string& name, const RecipeOptions& opt);

// One-axis sweep over the given values; per-cell seeds are derived
// deterministically from opt.seed and the cell index.  Writes a long-form CSV
// (axis,axis_value,metric,value).  Valid axes: gamma0, b, n_agents, dt,
// gamma0_scaled (gamma0 swept with b/gamma0 held at its base-config ratio).
void sweep_axis(const ModelParams& base, const std::string& axis,
                const std::vector<double>& values, const std::string& out_csv,
                const RecipeOptions& opt);

// Applies fn to 0..n-1 on `workers` threads (0 = hardware concurrency).
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// Writes content to path, creating parent directories; refuses to overwrite
// an existing file unless force.
void write_text_file(const std::string& path, const std::string& content, bool force);

} // namespace swarmkin
