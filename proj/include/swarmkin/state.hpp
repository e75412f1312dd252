// Agent-ensemble state, recorded mean-velocity series, and histogram helpers
// shared by the simulator, the analysis code, and the experiment harness.
#pragma once

#include <vector>

namespace swarmkin {

struct SwarmState {
    std::vector<double> x;   // positions in [0,1)
    std::vector<double> v;   // velocities, each exactly +1 or -1
    double time = 0.0;

    int n() const { return static_cast<int>(x.size()); }
};

struct StepReport {
    int n_switches = 0;
    double u_after = 0.0;    // group mean velocity after the step
};

struct MeanVelocitySeries {
    std::vector<double> t;
    std::vector<double> u;   // each value on the lattice {-1, -1+2/N, ..., 1}

    std::size_t size() const { return t.size(); }
};

struct SwitchingRecord {
    std::vector<double> durations;  // alternating first-passage times
    double mean = 0.0;
    double stderr_mean = 0.0;

    int count() const { return static_cast<int>(durations.size()); }
};

// Probability mass per lattice bin; index r corresponds to u = (2r-N)/N.
// Recorded u values are snapped to the nearest lattice index.
std::vector<double> lattice_histogram(const MeanVelocitySeries& s, int N);

// Total-variation distance between two mass vectors of equal length.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

// Shape call on a lattice mass vector. The stationary law is even in u, so the
// histogram is symmetrized first, then smoothed with a 1/4-1/2-1/4 kernel
// (one-sided renormalized at the ends); maxima are located from the sign
// pattern of consecutive differences. "Bimodal" requires a maximum on each
// side at |u| >= 1/2 with the trough between them at most one third of the
// smaller side maximum — a shallow edge-heavy profile does not qualify.
struct ModalityReport {
    bool bimodal = false;
    bool has_side_peaks = false;
    double trough_ratio = 1.0;   // trough / min(side maxima); 1 when no side peaks
};
ModalityReport histogram_modality(const std::vector<double>& mass);

} // namespace swarmkin
