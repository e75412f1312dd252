// Shared domain types: model parameters, interaction kernels, periodic geometry,
// and the plain-text config format. Everything here is an immutable value type.
#pragma once

#include <cstdint>
#include <string>

namespace swarmkin {

enum class KernelType { Global, TopHat, Dirac, Shrinking };

// Closed kernel family. Global: w == 1. TopHat: w = 1 on distances <= sigma.
// Dirac: PDE-level local closure only, no pointwise weight. Shrinking: with N
// agents the support is an arc of total measure N^-alpha (circle radius
// N^-alpha / 2), so the expected neighbour count at unit density tends to a
// constant when alpha = 1.
struct InteractionKernel {
    KernelType type = KernelType::Global;
    double sigma = 0.0;   // TopHat radius, in (0, 0.5]
    double alpha = 0.0;   // Shrinking exponent, > 0

    static InteractionKernel global() { return {KernelType::Global, 0.0, 0.0}; }
    static InteractionKernel tophat(double s) { return {KernelType::TopHat, s, 0.0}; }
    static InteractionKernel dirac() { return {KernelType::Dirac, 0.0, 0.0}; }
    static InteractionKernel shrinking(double a) { return {KernelType::Shrinking, 0.0, a}; }

    // Support radius on the circle (distance arguments). Shrinking needs N.
    double support_radius(int n_agents) const;
};

struct ModelParams {
    double gamma0 = 0.3;        // baseline switch rate, >= 0
    double b = 1.0;             // alignment-penalty rate, >= 0
    int n_agents = 20;          // N >= 1
    double dt = 0.01;           // time step; dt*(gamma0+4b) < 1 required
    std::uint64_t seed = 1;
    InteractionKernel kernel = InteractionKernel::global();
};

// Circle distance on [0,1): min(|x-y|, 1-|x-y|), always in [0, 0.5].
double periodic_distance(double x, double y);

// Pointwise kernel weight at distance s (s in [0, 0.5]). n_agents is used only
// by the Shrinking family. Throws for Dirac: it has no pointwise evaluation.
double kernel_eval(const InteractionKernel& k, double s, int n_agents);

// Validates every ModelParams invariant; throws std::invalid_argument naming
// the violated one. Returns its argument so calls can be chained.
const ModelParams& validate_params(const ModelParams& p);

// Plain-text config, one "key = value" per line; keys: gamma0, b, n_agents,
// dt, seed, kernel = global|tophat:<sigma>|dirac|shrinking:<alpha>.
// '#' starts a comment. Unknown keys are an error. Values not present keep
// their defaults. serialize_config round-trips doubles bit-exactly.
ModelParams parse_config_text(const std::string& text);
ModelParams load_config(const std::string& path);
std::string serialize_config(const ModelParams& p);

std::string kernel_to_string(const InteractionKernel& k);
InteractionKernel kernel_from_string(const std::string& s);

} // namespace swarmkin
