#include "swarmkin/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "swarmkin/abm.hpp"

namespace swarmkin {

NoiseRegime classify_regime(const ModelParams& p) {
    if (p.b <= 0.0) return NoiseRegime::LargeNoise;
    return p.gamma0 / p.b < 1.0 + 2.0 / p.n_agents ? NoiseRegime::SmallNoise
                                                   : NoiseRegime::LargeNoise;
}

double potential(double u, const ModelParams& p) {
    if (p.b <= 0.0)
        throw std::invalid_argument("potential undefined for b=0 (divide by b)");
    const double N = p.n_agents;
    const double A = p.gamma0 + p.b * (1.0 - u * u);
    return -0.5 * N * u * u + (1.0 - p.gamma0 * N / p.b) * std::log(A);
}

double potential_curvature(double u, const ModelParams& p) {
    if (p.b <= 0.0)
        throw std::invalid_argument("potential undefined for b=0 (divide by b)");
    const double N = p.n_agents;
    const double c = 1.0 - p.gamma0 * N / p.b;
    const double A = p.gamma0 + p.b * (1.0 - u * u);
    return -N - 2.0 * p.b * c * (A + 2.0 * p.b * u * u) / (A * A);
}

double curvature_at_zero(const ModelParams& p) {
    const double N = p.n_agents;
    const double g = p.gamma0, b = p.b;
    if (g + b <= 0.0) throw std::invalid_argument("curvature_at_zero: gamma0 + b must be > 0");
    const double s = g + b;
    const double lo = g - b / N, hi = b + b / N;
    return N / (s * s) * (lo * lo - hi * hi);
}

std::optional<double> ordered_state(const ModelParams& p, bool* overshoot) {
    if (overshoot) *overshoot = false;
    if (p.b <= 0.0) return std::nullopt;
    const double arg = 1.0 + 2.0 / p.n_agents - p.gamma0 / p.b;
    if (arg <= 0.0) return std::nullopt;
    const double us = std::sqrt(arg);
    if (us > 1.0) {
        if (overshoot) *overshoot = true;
        std::fprintf(stderr,
                     "warning: ordered state %.6g exceeds 1 (N below 2b/gamma0); "
                     "density support ends at |u|=1\n", us);
    }
    return us;
}

PotentialProfile potential_profile(const ModelParams& p, int grid_size) {
    if (grid_size < 3) throw std::invalid_argument("potential_profile: grid too small");
    PotentialProfile prof;
    prof.regime = classify_regime(p);
    prof.u_s = ordered_state(p);
    prof.u.resize(static_cast<std::size_t>(grid_size));
    prof.phi.resize(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        const double u = -1.0 + 2.0 * i / (grid_size - 1);
        prof.u[static_cast<std::size_t>(i)] = u;
        prof.phi[static_cast<std::size_t>(i)] = potential(u, p);
    }
    return prof;
}

StationaryDensity stationary_density(const ModelParams& p, int grid_size) {
    // normalization needs a fine quadrature regardless of the caller's choice
    grid_size = std::max(grid_size, 2001);
    StationaryDensity d;
    d.u.resize(static_cast<std::size_t>(grid_size));
    d.p.resize(static_cast<std::size_t>(grid_size));
    double phi_min = INFINITY;
    for (int i = 0; i < grid_size; ++i) {
        const double u = -1.0 + 2.0 * i / (grid_size - 1);
        d.u[static_cast<std::size_t>(i)] = u;
        const double phi = potential(u, p);
        d.p[static_cast<std::size_t>(i)] = phi;   // holds Phi until the exp pass
        phi_min = std::min(phi_min, phi);
    }
    const double h = 2.0 / (grid_size - 1);
    double Z = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        auto idx = static_cast<std::size_t>(i);
        d.p[idx] = std::exp(-(d.p[idx] - phi_min));
        Z += d.p[idx] * ((i == 0 || i == grid_size - 1) ? 0.5 : 1.0);
    }
    Z *= h;
    for (double& v : d.p) v /= Z;
    d.log_C = phi_min - std::log(Z);
    return d;
}

namespace {

// integral over [a,b] of the piecewise-linear interpolant of (grid u, values p)
double interp_integral(const std::vector<double>& u, const std::vector<double>& p,
                       double a, double b) {
    const int n = static_cast<int>(u.size());
    const double h = (u.back() - u.front()) / (n - 1);
    a = std::max(a, u.front());
    b = std::min(b, u.back());
    if (b <= a) return 0.0;
    auto value_at = [&](double t) {
        const double s = (t - u.front()) / h;
        int i = std::clamp(static_cast<int>(std::floor(s)), 0, n - 2);
        const double f = s - i;
        return p[static_cast<std::size_t>(i)] * (1.0 - f) +
               p[static_cast<std::size_t>(i + 1)] * f;
    };
    const int ia = std::clamp(static_cast<int>(std::ceil((a - u.front()) / h)), 0, n - 1);
    const int ib = std::clamp(static_cast<int>(std::floor((b - u.front()) / h)), 0, n - 1);
    double acc = 0.0;
    if (ia > ib) {   // both endpoints inside one cell
        acc = 0.5 * (value_at(a) + value_at(b)) * (b - a);
        return acc;
    }
    const double ua = u.front() + ia * h, ub = u.front() + ib * h;
    if (a < ua) acc += 0.5 * (value_at(a) + p[static_cast<std::size_t>(ia)]) * (ua - a);
    for (int i = ia; i < ib; ++i)
        acc += 0.5 * (p[static_cast<std::size_t>(i)] + p[static_cast<std::size_t>(i + 1)]) * h;
    if (b > ub) acc += 0.5 * (p[static_cast<std::size_t>(ib)] + value_at(b)) * (b - ub);
    return acc;
}

} // namespace

std::vector<double> bin_integrate(const StationaryDensity& d, int N) {
    std::vector<double> mass(static_cast<std::size_t>(N) + 1, 0.0);
    double total = 0.0;
    for (int r = 0; r <= N; ++r) {
        const double c = -1.0 + 2.0 * r / N;
        const double m = interp_integral(d.u, d.p, c - 1.0 / N, c + 1.0 / N);
        mass[static_cast<std::size_t>(r)] = m;
        total += m;
    }
    for (double& m : mass) m /= total;
    return mass;
}

double kramers_time(const ModelParams& p) {
    if (classify_regime(p) != NoiseRegime::SmallNoise)
        throw std::runtime_error("no metastable pair");
    bool overshoot = false;
    const double us_raw = ordered_state(p, &overshoot).value();
    double us = us_raw, kappa_well;
    if (overshoot) {
        // constrained minimizer of Phi on [-1,1]; curvature magnitude there
        const PotentialProfile prof = potential_profile(p, 4001);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < prof.phi.size(); ++i)
            if (prof.phi[i] < prof.phi[arg]) arg = i;
        us = std::fabs(prof.u[arg]);
        kappa_well = 0.5 * std::fabs(potential_curvature(us, p));
    } else {
        // quadratic Taylor coefficient of Phi at the well
        kappa_well = 0.5 * potential_curvature(us, p);
    }
    const double N = p.n_agents;
    const double barrier = potential(0.0, p) - potential(us, p);
    const double curv0 = potential_curvature(0.0, p);   // negative at the barrier top
    return N * M_PI / (p.gamma0 + p.b) * std::exp(barrier) / std::sqrt(-curv0 * kappa_well);
}

namespace {

// up/down jump rates of the aligned-count chain
inline double rate_up(int r, const ModelParams& p) {
    const double u = (2.0 * r - p.n_agents) / p.n_agents;
    return (p.n_agents - r) * switch_rate(-1.0, u, p);
}
inline double rate_down(int r, const ModelParams& p) {
    const double u = (2.0 * r - p.n_agents) / p.n_agents;
    return r * switch_rate(+1.0, u, p);
}

// detailed-balance weights in log space: lw[r+1] = lw[r] + ln up(r) - ln down(r+1)
std::vector<double> log_weights(const ModelParams& p) {
    const int N = p.n_agents;
    std::vector<double> lw(static_cast<std::size_t>(N) + 1);
    lw[0] = 0.0;
    for (int r = 0; r < N; ++r)
        lw[static_cast<std::size_t>(r) + 1] = lw[static_cast<std::size_t>(r)] +
            std::log(rate_up(r, p)) - std::log(rate_down(r + 1, p));
    return lw;
}

} // namespace

std::vector<double> master_equation_stationary(const ModelParams& p) {
    const int N = p.n_agents;
    if (N > 10000)
        throw std::invalid_argument("master_equation_stationary: N above the 1e4 solver bound");
    std::vector<double> lw = log_weights(p);
    const double lmax = *std::max_element(lw.begin(), lw.end());
    std::vector<double> pi(lw.size());
    double Z = 0.0;
    for (std::size_t r = 0; r < lw.size(); ++r) {
        pi[r] = std::exp(lw[r] - lmax);
        Z += pi[r];
    }
    for (double& v : pi) v /= Z;

    // the construction solves Q^T pi = 0 exactly up to round-off; verify
    double resid = 0.0, scale = 0.0;
    for (int r = 0; r <= N; ++r) {
        double flow = -(rate_up(r, p) + rate_down(r, p)) * pi[static_cast<std::size_t>(r)];
        if (r > 0) flow += rate_up(r - 1, p) * pi[static_cast<std::size_t>(r) - 1];
        if (r < N) flow += rate_down(r + 1, p) * pi[static_cast<std::size_t>(r) + 1];
        resid = std::max(resid, std::fabs(flow));
        scale = std::max(scale, (rate_up(r, p) + rate_down(r, p)) * pi[static_cast<std::size_t>(r)]);
    }
    if (scale > 0.0 && resid > 1e-12 * std::max(scale, 1.0))
        throw std::logic_error("master_equation_stationary: residual above 1e-12");
    return pi;
}

double master_equation_mfpt(const ModelParams& p, int r0, int r1) {
    const int N = p.n_agents;
    if (r0 < 0 || r0 > N || r1 < 0 || r1 > N)
        throw std::invalid_argument("master_equation_mfpt: state out of range");
    if (p.gamma0 <= 0.0 && p.b <= 0.0)
        throw std::runtime_error("singular system: gamma0 = b = 0 has no dynamics");
    if (r0 == r1) return 0.0;
    // the chain is symmetric under r -> N-r, so reduce to the upward passage
    if (r0 > r1) return master_equation_mfpt(p, N - r0, N - r1);

    const std::vector<double> lw = log_weights(p);
    // T(r0 -> r1) = sum_{k=r0}^{r1-1} (1/up(k)) sum_{j<=k} w_j / w_k
    double total = 0.0;
    for (int k = r0; k < r1; ++k) {
        double inner = 0.0;
        for (int j = 0; j <= k; ++j)
            inner += std::exp(lw[static_cast<std::size_t>(j)] - lw[static_cast<std::size_t>(k)]);
        total += inner / rate_up(k, p);
    }
    return total;
}

int nearest_lattice_index(double u, int N) {
    long r = std::lround((u + 1.0) * N / 2.0);
    return static_cast<int>(std::clamp(r, 0L, static_cast<long>(N)));
}

} // namespace swarmkin
