#include "swarmkin/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmkin {

std::vector<double> lattice_histogram(const MeanVelocitySeries& s, int N) {
    if (N < 1) throw std::invalid_argument("lattice_histogram: N must be >= 1");
    std::vector<double> mass(N + 1, 0.0);
    for (double u : s.u) {
        long r = std::lround((u + 1.0) * N / 2.0);
        r = std::clamp(r, 0L, static_cast<long>(N));
        mass[static_cast<std::size_t>(r)] += 1.0;
    }
    if (!s.u.empty())
        for (double& m : mass) m /= static_cast<double>(s.u.size());
    return mass;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("tv_distance: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return 0.5 * acc;
}

namespace {

// 1/4-1/2-1/4 smoothing, one-sided renormalized at the ends.
std::vector<double> smooth3(const std::vector<double>& h) {
    const int n = static_cast<int>(h.size());
    std::vector<double> s(h.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.5 * h[i], w = 0.5;
        if (i > 0) { acc += 0.25 * h[i - 1]; w += 0.25; }
        if (i + 1 < n) { acc += 0.25 * h[i + 1]; w += 0.25; }
        s[i] = acc / w;
    }
    return s;
}

} // namespace

ModalityReport histogram_modality(const std::vector<double>& mass) {
    ModalityReport rep;
    const int n = static_cast<int>(mass.size());
    if (n < 3) return rep;
    const int N = n - 1;

    std::vector<double> h(mass.size());
    for (int i = 0; i < n; ++i) h[i] = 0.5 * (mass[i] + mass[n - 1 - i]);
    const std::vector<double> s = smooth3(h);

    // local maxima from the difference sign pattern (ends count one-sided)
    std::vector<int> peaks;
    for (int i = 0; i < n; ++i) {
        const bool up = (i == 0) || s[i] > s[i - 1];
        const bool down = (i == n - 1) || s[i] >= s[i + 1];
        if (up && down) peaks.push_back(i);
    }

    int left = -1, right = -1;
    for (int i : peaks) {
        const double u = -1.0 + 2.0 * i / N;
        if (u <= -0.5 && (left < 0 || s[i] > s[left])) left = i;
        if (u >= 0.5 && (right < 0 || s[i] > s[right])) right = i;
    }
    if (left < 0 || right < 0 || left >= right) return rep;

    rep.has_side_peaks = true;
    double trough = s[left];
    for (int i = left; i <= right; ++i) trough = std::min(trough, s[i]);
    const double side = std::min(s[left], s[right]);
    rep.trough_ratio = side > 0.0 ? trough / side : 1.0;
    rep.bimodal = rep.trough_ratio <= 1.0 / 3.0;
    return rep;
}

} // namespace swarmkin
