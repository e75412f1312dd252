// Analysis of the all-to-all model: the (N+1)-state master equation in the
// aligned-count coordinate r (u = (2r-N)/N), its diffusion-limit stationary
// density p_s = C exp(-Phi_N), the noise-regime split, and switching-time
// estimates (saddle-point formula plus the exact birth-death first-passage
// solve used to quantify it).
#pragma once

#include <optional>
#include <vector>

#include "swarmkin/params.hpp"

namespace swarmkin {

enum class NoiseRegime { LargeNoise, SmallNoise };

// SmallNoise iff gamma0/b < 1 + 2/N (requires b > 0); LargeNoise otherwise,
// including every b = 0 model.
NoiseRegime classify_regime(const ModelParams& p);

// Phi_N(u) = -(N/2)u^2 + (1 - gamma0*N/b) * ln(gamma0 + b(1-u^2)).
// Defined only for b > 0; throws otherwise.
double potential(double u, const ModelParams& p);

// Analytic second derivative of Phi_N at arbitrary u (b > 0).
double potential_curvature(double u, const ModelParams& p);

// Closed form for Phi_N''(0): N/(gamma0+b)^2 * [(gamma0 - b/N)^2 - (b + b/N)^2].
double curvature_at_zero(const ModelParams& p);

// sqrt(1 + 2/N - gamma0/b) when the ordered pair exists (SmallNoise), absent
// otherwise. Values > 1 are returned as-is with *overshoot set: the density
// support ends at |u| = 1, so downstream evaluation clamps there.
std::optional<double> ordered_state(const ModelParams& p, bool* overshoot = nullptr);

struct PotentialProfile {
    std::vector<double> u;
    std::vector<double> phi;
    NoiseRegime regime = NoiseRegime::LargeNoise;
    std::optional<double> u_s;
};
PotentialProfile potential_profile(const ModelParams& p, int grid_size = 2001);

struct StationaryDensity {
    std::vector<double> u;   // uniform grid over [-1, 1]
    std::vector<double> p;   // density values, trapezoid-normalized to 1
    double log_C = 0.0;      // log of the normalization constant
};
// exp(-Phi_N) on a uniform grid, stabilized by subtracting min Phi_N before
// exponentiating, then trapezoid-normalized.
StationaryDensity stationary_density(const ModelParams& p, int grid_size = 2001);

// Probability mass of p_s per u-lattice bin (bins centred on {-1,-1+2/N,...,1},
// edge bins clipped to [-1,1]); sums to 1 exactly after renormalization.
std::vector<double> bin_integrate(const StationaryDensity& d, int N);

// Saddle-point estimate of the mean switching time between the metastable pair
// -+u_s:   N*pi/(gamma0+b) * exp(Phi(0) - Phi(-u_s)) / sqrt(-Phi''(0) * kappa_s)
// where the barrier enters through the full second derivative Phi''(0) and the
// well through its quadratic Taylor coefficient kappa_s = Phi''(-u_s)/2.
// Throws "no metastable pair" in the LargeNoise regime. If u_s > 1 the
// evaluation point is clamped to the grid minimizer of Phi on [-1, 1] (with a
// warning line on stderr).
double kramers_time(const ModelParams& p);

// Stationary distribution of the (N+1)-state chain with up rate
// (N-r)*switch_rate(-1, u(r)) and down rate r*switch_rate(+1, u(r)).
// Computed through detailed balance in log space; the returned vector is the
// generator-transpose null vector with residual <= 1e-12.
std::vector<double> master_equation_stationary(const ModelParams& p);

// Exact expected hitting time of state r1 starting from r0 on the same chain
// (first-step analysis solved in closed form for the birth-death structure).
double master_equation_mfpt(const ModelParams& p, int r0, int r1);

// Lattice index nearest a target mean velocity: round((u+1)N/2), clamped.
int nearest_lattice_index(double u, int N);

} // namespace swarmkin
