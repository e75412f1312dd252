// N-agent velocity-jump simulator on the periodic unit interval: deterministic
// transport at unit speed plus state-dependent direction switching. One step:
// every agent's switch rate is evaluated from the shared pre-step configuration
// (synchronous update), flips are applied as independent Bernoulli(rate*dt)
// draws, then positions advance with the post-flip velocities.
#pragma once

#include <cstdint>

#include "swarmkin/params.hpp"
#include "swarmkin/state.hpp"

namespace swarmkin {

// Counter state for the per-(seed, step, agent) draw scheme; see rng.hpp.
struct AbmRng {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;   // advanced once per step()
};

// Kernel-weighted mean velocity around agent i, self term included, so the
// denominator is positive for every admissible kernel. Result in [-1, 1].
double local_mean_velocity(const SwarmState& s, const InteractionKernel& k, int i);

// gamma0 + b(1 -+ u_loc)^2 for v = +-1; always in [gamma0, gamma0 + 4b].
double switch_rate(double v, double u_loc, const ModelParams& p);

// Seeded initial condition: positions uniform on [0,1), velocities fair +-1.
SwarmState init_state(const ModelParams& p);

// Advances s by one step in place and consumes one rng step. Flip probability
// for agent i is switch_rate(...)*dt with rates frozen at the pre-step state.
StepReport step(SwarmState& s, const ModelParams& p, AbmRng& rng);

struct RunRecorders {
    int u_stride = 1;        // record u after every u_stride-th step
    bool histogram = true;   // accumulate the lattice histogram of recorded u
    int state_stride = 0;    // 0 = keep no full states
};

struct RunResult {
    MeanVelocitySeries series;
    std::vector<double> histogram;    // empty unless recorders.histogram
    std::vector<SwarmState> states;   // empty unless recorders.state_stride > 0
    long long total_switches = 0;
};

// Runs n_steps (>= 1) from the seeded initial state. Fixed (seed, params)
// reproduce the trajectory bit-exactly.
RunResult run(const ModelParams& p, long long n_steps, const RunRecorders& rec = {});

// Alternating first-passage analysis of a recorded series: starting from the
// first time |u| >= threshold, each duration runs until u first reaches the
// opposite sign's threshold, and so on, alternating. Empty record if no
// crossing pair occurs.
SwitchingRecord switching_times(const MeanVelocitySeries& s, double threshold);

} // namespace swarmkin
