#include "swarmkin/abm.hpp"

#include <cmath>
#include <stdexcept>

#include "swarmkin/rng.hpp"

namespace swarmkin {

namespace {
// stream tags for the counter RNG; arbitrary distinct constants
constexpr std::uint64_t kInitPosTag = 0x706f73ULL;
constexpr std::uint64_t kInitVelTag = 0x76656cULL;
constexpr std::uint64_t kFlipTagBase = 0x666c6970ULL;
} // namespace

double local_mean_velocity(const SwarmState& s, const InteractionKernel& k, int i) {
    const int n = s.n();
    if (k.type == KernelType::Global) {
        double sum = 0.0;
        for (double v : s.v) sum += v;
        return sum / n;
    }
    const double radius = k.support_radius(n);
    double num = 0.0, den = 0.0;
    const double xi = s.x[static_cast<std::size_t>(i)];
    for (int m = 0; m < n; ++m) {
        if (periodic_distance(xi, s.x[static_cast<std::size_t>(m)]) <= radius) {
            num += s.v[static_cast<std::size_t>(m)];
            den += 1.0;
        }
    }
    return num / den;   // den >= 1: the self term is always inside the support
}

double switch_rate(double v, double u_loc, const ModelParams& p) {
    const double d = 1.0 - v * u_loc;   // (1-u) for v=+1, (1+u) for v=-1
    return p.gamma0 + p.b * d * d;
}

SwarmState init_state(const ModelParams& p) {
    SwarmState s;
    const int n = p.n_agents;
    s.x.resize(static_cast<std::size_t>(n));
    s.v.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        s.x[static_cast<std::size_t>(i)] =
            counter_u01(p.seed, kInitPosTag, static_cast<std::uint64_t>(i));
        s.v[static_cast<std::size_t>(i)] =
            counter_u01(p.seed, kInitVelTag, static_cast<std::uint64_t>(i)) < 0.5 ? -1.0 : 1.0;
    }
    return s;
}

StepReport step(SwarmState& s, const ModelParams& p, AbmRng& rng) {
    const int n = s.n();
    StepReport rep;

    // rates from the shared pre-step configuration
    double u_global = 0.0;
    if (p.kernel.type == KernelType::Global) {
        for (double v : s.v) u_global += v;
        u_global /= n;
    }
    const std::uint64_t stream = kFlipTagBase ^ (rng.step * 0x100000001b3ULL);
    double usum = 0.0;
    // two passes would re-evaluate u from partially flipped state; buffer flips
    // instead so the update stays synchronous
    static thread_local std::vector<char> flip;
    flip.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const double u_loc = p.kernel.type == KernelType::Global
                                 ? u_global
                                 : local_mean_velocity(s, p.kernel, i);
        const double prob = switch_rate(s.v[static_cast<std::size_t>(i)], u_loc, p) * p.dt;
        if (counter_u01(p.seed, stream, static_cast<std::uint64_t>(i)) < prob)
            flip[static_cast<std::size_t>(i)] = 1;
    }
    for (int i = 0; i < n; ++i) {
        auto idx = static_cast<std::size_t>(i);
        if (flip[idx]) {
            s.v[idx] = -s.v[idx];
            ++rep.n_switches;
        }
        double xn = s.x[idx] + s.v[idx] * p.dt;
        xn -= std::floor(xn);   // periodic wrap into [0,1)
        if (xn >= 1.0) xn = 0.0;
        s.x[idx] = xn;
        usum += s.v[idx];
    }
    s.time += p.dt;
    ++rng.step;
    rep.u_after = usum / n;
    return rep;
}

RunResult run(const ModelParams& p, long long n_steps, const RunRecorders& rec) {
    validate_params(p);
    if (n_steps < 1) throw std::invalid_argument("run: n_steps must be >= 1");
    if (rec.u_stride < 1) throw std::invalid_argument("run: u_stride must be >= 1");

    RunResult out;
    SwarmState s = init_state(p);
    AbmRng rng{p.seed, 0};
    const auto expected = static_cast<std::size_t>(n_steps / rec.u_stride + 1);
    out.series.t.reserve(expected);
    out.series.u.reserve(expected);
    for (long long k = 1; k <= n_steps; ++k) {
        const StepReport rep = step(s, p, rng);
        out.total_switches += rep.n_switches;
        if (k % rec.u_stride == 0) {
            out.series.t.push_back(s.time);
            out.series.u.push_back(rep.u_after);
        }
        if (rec.state_stride > 0 && k % rec.state_stride == 0) out.states.push_back(s);
    }
    if (rec.histogram) out.histogram = lattice_histogram(out.series, p.n_agents);
    return out;
}

SwitchingRecord switching_times(const MeanVelocitySeries& s, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("switching_times: threshold must lie in (0,1)");
    if (s.size() == 0)
        throw std::invalid_argument("switching_times: empty series");

    SwitchingRecord rec;
    int side = 0;          // +-1 once armed
    double t_mark = 0.0;   // time the current side was entered
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double u = s.u[i], t = s.t[i];
        if (side == 0) {
            if (u >= threshold) { side = 1; t_mark = t; }
            else if (u <= -threshold) { side = -1; t_mark = t; }
        } else if (side == 1 && u <= -threshold) {
            rec.durations.push_back(t - t_mark);
            side = -1; t_mark = t;
        } else if (side == -1 && u >= threshold) {
            rec.durations.push_back(t - t_mark);
            side = 1; t_mark = t;
        }
    }
    const int m = rec.count();
    if (m > 0) {
        double sum = 0.0;
        for (double d : rec.durations) sum += d;
        rec.mean = sum / m;
        if (m > 1) {
            double ss = 0.0;
            for (double d : rec.durations) ss += (d - rec.mean) * (d - rec.mean);
            rec.stderr_mean = std::sqrt(ss / (m - 1)) / std::sqrt(static_cast<double>(m));
        }
    }
    return rec;
}

} // namespace swarmkin
