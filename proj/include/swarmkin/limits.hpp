#pragma once
// Monte Carlo checks of the large-population closures: draw i.i.d. agents
// from a prescribed one-particle law (density rho, flux j on the periodic
// unit interval), form the kernel-weighted mean velocity at a probe point,
// and compare replicate averages against the closed-form limits — including
// the shrinking-window trichotomy where the window measure scales like
// N^-alpha.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "swarmkin/params.hpp"

namespace swarmkin {

class SampledPopulation {
public:
    // cell-constant (rho, j) on a uniform grid over [0,1); rho is normalized
    // to unit mass (j rescaled by the same factor, preserving |j| <= rho)
    static SampledPopulation from_grid(std::vector<double> rho, std::vector<double> j);

    int cells() const { return cells_; }
    double dx() const { return dx_; }
    double rho_at(double x) const;
    double j_at(double x) const;
    int cell_of(double x) const;

    // inverse-CDF position draw: cell by mass, uniform within the cell
    std::pair<double, int> sample_x(std::mt19937_64& rng) const;
    // velocity draw at a cell: +1 with probability (rho+j)/(2 rho)
    int sample_v(int cell, std::mt19937_64& rng) const;

    const std::vector<double>& rho() const { return rho_; }
    const std::vector<double>& j() const { return j_; }

private:
    int cells_ = 0;
    double dx_ = 0.0;
    std::vector<double> rho_, j_, cdf_;
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    int replicates = 0;
};

// windowed-average limit (1/I) * integral of w(z-y) j(y) dy, computed exactly
// from the cell-constant fields; I = integral of w(z-y) rho(y) dy must be
// positive.  n_agents feeds the shrinking kernel's radius.
double quadrature_Q_limit(const SampledPopulation& pop, const InteractionKernel& kernel,
                          double z, int n_agents = 0);

// replicate average of the kernel-weighted mean velocity over N-1 sampled
// agents at probe z (empty window contributes 0); stderr by batch means
McEstimate mc_QN(const SampledPopulation& pop, const InteractionKernel& kernel,
                 int n_agents, double z, int replicates = 10000, std::uint64_t seed = 1);

// same sampling, averaging the square of the weighted mean velocity
McEstimate mc_RN(const SampledPopulation& pop, const InteractionKernel& kernel,
                 int n_agents, double z, int replicates = 10000, std::uint64_t seed = 1);

struct ShrinkRow {
    int n_agents = 0;
    double Q_est = 0.0, Q_se = 0.0;
    double R_est = 0.0, R_se = 0.0;
    double Q_limit = 0.0, R_limit = 0.0;
};

// windows of measure N^-alpha around the probe: estimates of (Q_N, R_N) per
// population size, tabulated against the alpha-regime limits
//   alpha < 1: (j/rho, (j/rho)^2)
//   alpha = 1: ((j/rho)(1 - e^-rho), eta(rho, j))
//   alpha > 1: (0, 0)
std::vector<ShrinkRow> mc_shrink_limits(const SampledPopulation& pop, double alpha,
                                        const std::vector<int>& n_list, double z,
                                        int replicates = 10000, std::uint64_t seed = 1);

} // namespace swarmkin
