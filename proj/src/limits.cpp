#include "swarmkin/limits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "swarmkin/kinetic.hpp"
#include "swarmkin/rng.hpp"

namespace swarmkin {

SampledPopulation SampledPopulation::from_grid(std::vector<double> rho, std::vector<double> j) {
    const int M = static_cast<int>(rho.size());
    if (M < 1) throw std::invalid_argument("population grid is empty");
    if (j.size() != rho.size())
        throw std::invalid_argument("rho and j must share a grid");
    double mass = 0.0;
    for (int i = 0; i < M; ++i) {
        auto k = static_cast<std::size_t>(i);
        if (rho[k] < 0.0) throw std::invalid_argument("density must be nonnegative");
        if (std::fabs(j[k]) > rho[k] * (1.0 + 1e-12))
            throw std::invalid_argument("flux must satisfy |j| <= rho");
        mass += rho[k];
    }
    mass /= M;   // = integral of rho
    if (!(mass > 0.0)) throw std::invalid_argument("density must have positive mass");

    SampledPopulation p;
    p.cells_ = M;
    p.dx_ = 1.0 / M;
    p.rho_ = std::move(rho);
    p.j_ = std::move(j);
    for (double& v : p.rho_) v /= mass;
    for (double& v : p.j_) v /= mass;
    p.cdf_.resize(static_cast<std::size_t>(M));
    double acc = 0.0;
    for (int i = 0; i < M; ++i) {
        acc += p.rho_[static_cast<std::size_t>(i)] * p.dx_;
        p.cdf_[static_cast<std::size_t>(i)] = acc;
    }
    p.cdf_.back() = 1.0;   // pin the top against round-off
    return p;
}

int SampledPopulation::cell_of(double x) const {
    x -= std::floor(x);
    int i = static_cast<int>(x * cells_);
    return std::min(i, cells_ - 1);
}

double SampledPopulation::rho_at(double x) const {
    return rho_[static_cast<std::size_t>(cell_of(x))];
}

double SampledPopulation::j_at(double x) const {
    return j_[static_cast<std::size_t>(cell_of(x))];
}

std::pair<double, int> SampledPopulation::sample_x(std::mt19937_64& rng) const {
    const double U = draw_u01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), U);
    const int i = std::min(static_cast<int>(it - cdf_.begin()), cells_ - 1);
    const double lo = i == 0 ? 0.0 : cdf_[static_cast<std::size_t>(i) - 1];
    const double w = cdf_[static_cast<std::size_t>(i)] - lo;
    const double frac = w > 0.0 ? std::clamp((U - lo) / w, 0.0, 1.0) : 0.5;
    double x = (i + frac) * dx_;
    if (x >= 1.0) x = 0.0;
    return {x, i};
}

int SampledPopulation::sample_v(int cell, std::mt19937_64& rng) const {
    auto k = static_cast<std::size_t>(cell);
    const double r = rho_[k];
    const double p_up = r > 0.0 ? 0.5 * (1.0 + j_[k] / r) : 0.5;
    return draw_u01(rng) < p_up ? +1 : -1;
}

namespace {

// length of the overlap between a periodic window [z-r, z+r] and [lo, hi]
double window_overlap(double lo, double hi, double z, double r) {
    if (r >= 0.5) return hi - lo;
    double a = z - r, b = z + r;
    a -= std::floor(a);
    b -= std::floor(b);
    auto seg = [&](double s0, double s1) {
        return std::max(0.0, std::min(hi, s1) - std::max(lo, s0));
    };
    if (a <= b) return seg(a, b);
    return seg(0.0, b) + seg(a, 1.0);   // window wraps through 0
}

struct QuadPair {
    double num = 0.0;   // integral of w(z-y) j(y)
    double den = 0.0;   // integral of w(z-y) rho(y)
};

QuadPair window_integrals(const SampledPopulation& pop, double radius, double z) {
    QuadPair q;
    for (int i = 0; i < pop.cells(); ++i) {
        const double ov =
            window_overlap(i * pop.dx(), (i + 1) * pop.dx(), z, radius);
        if (ov <= 0.0) continue;
        auto k = static_cast<std::size_t>(i);
        q.num += pop.j()[k] * ov;
        q.den += pop.rho()[k] * ov;
    }
    return q;
}

double kernel_radius(const InteractionKernel& kernel, int n_agents) {
    return kernel.support_radius(n_agents);
}

// batch-means standard error of the replicate mean
double batch_stderr(const std::vector<double>& samples) {
    const int R = static_cast<int>(samples.size());
    if (R < 2) return 0.0;
    const int B = std::min(100, R);
    std::vector<double> means(static_cast<std::size_t>(B), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(B), 0);
    for (int i = 0; i < R; ++i) {
        const auto b = static_cast<std::size_t>(static_cast<long>(i) * B / R);
        means[b] += samples[static_cast<std::size_t>(i)];
        ++counts[b];
    }
    double grand = 0.0;
    for (int b = 0; b < B; ++b) {
        auto k = static_cast<std::size_t>(b);
        means[k] /= counts[k];
        grand += means[k];
    }
    grand /= B;
    double var = 0.0;
    for (int b = 0; b < B; ++b) {
        const double d = means[static_cast<std::size_t>(b)] - grand;
        var += d * d;
    }
    var /= (B - 1);
    return std::sqrt(var / B);
}

// one replicate: weighted mean velocity over N-1 sampled agents at probe z
double replicate_u(const SampledPopulation& pop, double radius, int n_agents,
                   double z, std::mt19937_64& rng) {
    long num = 0, den = 0;
    for (int m = 0; m < n_agents - 1; ++m) {
        const auto [x, cell] = pop.sample_x(rng);
        double d = std::fabs(x - z);
        d = std::min(d, 1.0 - d);
        if (d <= radius) {
            num += pop.sample_v(cell, rng);
            ++den;
        } else {
            // burn the velocity draw anyway so the stream position depends
            // only on the replicate, not on the probe location
            (void)pop.sample_v(cell, rng);
        }
    }
    return den > 0 ? static_cast<double>(num) / den : 0.0;
}

McEstimate mc_weighted(const SampledPopulation& pop, const InteractionKernel& kernel,
                       int n_agents, double z, int replicates, std::uint64_t seed,
                       bool squared, std::uint64_t tag) {
    if (n_agents < 2) throw std::invalid_argument("need at least 2 agents");
    if (replicates < 2) throw std::invalid_argument("need at least 2 replicates");
    const double radius = kernel_radius(kernel, n_agents);
    const QuadPair q = window_integrals(pop, radius, z);
    if (!(q.den > 0.0)) throw std::runtime_error("Lemma hypothesis violated");

    std::vector<double> samples(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r) {
        std::mt19937_64 rng = replicate_stream(seed, tag, static_cast<std::uint64_t>(r));
        const double u = replicate_u(pop, radius, n_agents, z, rng);
        samples[static_cast<std::size_t>(r)] = squared ? u * u : u;
    }
    McEstimate est;
    est.replicates = replicates;
    double s = 0.0;
    for (double v : samples) s += v;
    est.mean = s / replicates;
    est.stderr_ = batch_stderr(samples);
    return est;
}

constexpr std::uint64_t kQnTag = 0x716e5f6d63ULL;       // "qn_mc"
constexpr std::uint64_t kShrinkTag = 0x7368725f6d63ULL; // "shr_mc"

} // namespace

double quadrature_Q_limit(const SampledPopulation& pop, const InteractionKernel& kernel,
                          double z, int n_agents) {
    const QuadPair q = window_integrals(pop, kernel.support_radius(n_agents), z);
    if (!(q.den > 0.0)) throw std::runtime_error("Lemma hypothesis violated");
    return q.num / q.den;
}

McEstimate mc_QN(const SampledPopulation& pop, const InteractionKernel& kernel,
                 int n_agents, double z, int replicates, std::uint64_t seed) {
    return mc_weighted(pop, kernel, n_agents, z, replicates, seed, false, kQnTag);
}

// Deliberately the same replicate stream as mc_QN: the estimators then see the
// same configurations, so their difference R - Q^2 is the replicate variance
// itself rather than the gap between two independent noise realizations.
McEstimate mc_RN(const SampledPopulation& pop, const InteractionKernel& kernel,
                 int n_agents, double z, int replicates, std::uint64_t seed) {
    return mc_weighted(pop, kernel, n_agents, z, replicates, seed, true, kQnTag);
}

std::vector<ShrinkRow> mc_shrink_limits(const SampledPopulation& pop, double alpha,
                                        const std::vector<int>& n_list, double z,
                                        int replicates, std::uint64_t seed) {
    if (!(alpha > 0.0)) throw std::invalid_argument("shrinking alpha must be > 0");
    const double rho_z = pop.rho_at(z);
    const double j_z = pop.j_at(z);
    if (!(rho_z > 0.0))
        throw std::invalid_argument("probe point must have positive density");
    const double ur = j_z / rho_z;

    double Q_lim, R_lim;
    if (alpha < 1.0) {
        Q_lim = ur;
        R_lim = ur * ur;
    } else if (alpha == 1.0) {
        Q_lim = ur * -std::expm1(-rho_z);
        R_lim = eta_closure(rho_z, j_z);
    } else {
        Q_lim = 0.0;
        R_lim = 0.0;
    }

    std::vector<ShrinkRow> rows;
    rows.reserve(n_list.size());
    for (int N : n_list) {
        if (N < 2) throw std::invalid_argument("need at least 2 agents");
        // window of total measure N^-alpha centred at the probe
        const double radius = 0.5 * std::pow(static_cast<double>(N), -alpha);
        std::vector<double> us(static_cast<std::size_t>(replicates));
        std::vector<double> u2(static_cast<std::size_t>(replicates));
        const std::uint64_t tag =
            mix2(kShrinkTag, mix2(static_cast<std::uint64_t>(N),
                                  std::bit_cast<std::uint64_t>(alpha)));
        for (int r = 0; r < replicates; ++r) {
            std::mt19937_64 rng = replicate_stream(seed, tag, static_cast<std::uint64_t>(r));
            const double u = replicate_u(pop, radius, N, z, rng);
            us[static_cast<std::size_t>(r)] = u;
            u2[static_cast<std::size_t>(r)] = u * u;
        }
        ShrinkRow row;
        row.n_agents = N;
        double sq = 0.0, sr = 0.0;
        for (int r = 0; r < replicates; ++r) {
            sq += us[static_cast<std::size_t>(r)];
            sr += u2[static_cast<std::size_t>(r)];
        }
        row.Q_est = sq / replicates;
        row.R_est = sr / replicates;
        row.Q_se = batch_stderr(us);
        row.R_se = batch_stderr(u2);
        row.Q_limit = Q_lim;
        row.R_limit = R_lim;
        rows.push_back(row);
    }
    return rows;
}

} // namespace swarmkin
