#include "swarmkin/params.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swarmkin {

double periodic_distance(double x, double y) {
    double d = std::fabs(x - y);
    return std::min(d, 1.0 - d);
}

double InteractionKernel::support_radius(int n_agents) const {
    switch (type) {
        case KernelType::Global:    return 0.5;
        case KernelType::TopHat:    return sigma;
        case KernelType::Shrinking:
            // total window measure N^-alpha, split over both sides of the probe
            return 0.5 * std::pow(static_cast<double>(n_agents), -alpha);
        case KernelType::Dirac:     return 0.0;
    }
    return 0.0;
}

double kernel_eval(const InteractionKernel& k, double s, int n_agents) {
    if (k.type == KernelType::Dirac)
        throw std::invalid_argument("kernel has no pointwise evaluation");
    if (k.type == KernelType::Global) return 1.0;
    return s <= k.support_radius(n_agents) ? 1.0 : 0.0;
}

const ModelParams& validate_params(const ModelParams& p) {
    if (!(p.gamma0 >= 0.0)) throw std::invalid_argument("gamma0 must be >= 0");
    if (!(p.b >= 0.0)) throw std::invalid_argument("b must be >= 0");
    if (p.n_agents < 1) throw std::invalid_argument("n_agents must be >= 1");
    if (!(p.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(p.dt * (p.gamma0 + 4.0 * p.b) < 1.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "dt too large: dt*(gamma0+4b) = %.6g >= 1", p.dt * (p.gamma0 + 4.0 * p.b));
        throw std::invalid_argument(buf);
    }
    switch (p.kernel.type) {
        case KernelType::TopHat:
            if (!(p.kernel.sigma > 0.0 && p.kernel.sigma <= 0.5))
                throw std::invalid_argument("tophat sigma must lie in (0, 0.5]");
            break;
        case KernelType::Shrinking:
            if (!(p.kernel.alpha > 0.0))
                throw std::invalid_argument("shrinking alpha must be > 0");
            break;
        default: break;
    }
    return p;
}

std::string kernel_to_string(const InteractionKernel& k) {
    char buf[64];
    switch (k.type) {
        case KernelType::Global: return "global";
        case KernelType::Dirac:  return "dirac";
        case KernelType::TopHat:
            std::snprintf(buf, sizeof buf, "tophat:%.17g", k.sigma);
            return buf;
        case KernelType::Shrinking:
            std::snprintf(buf, sizeof buf, "shrinking:%.17g", k.alpha);
            return buf;
    }
    return "global";
}

InteractionKernel kernel_from_string(const std::string& s) {
    if (s == "global") return InteractionKernel::global();
    if (s == "dirac") return InteractionKernel::dirac();
    auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    if (head == "tophat" || head == "shrinking") {
        if (colon == std::string::npos || colon + 1 == s.size())
            throw std::invalid_argument("kernel '" + head + "' needs a parameter, e.g. " +
                                        head + (head == "tophat" ? ":0.2" : ":1.0"));
        std::size_t used = 0;
        double val = std::stod(s.substr(colon + 1), &used);
        if (used != s.size() - colon - 1)
            throw std::invalid_argument("bad kernel parameter in '" + s + "'");
        return head == "tophat" ? InteractionKernel::tophat(val)
                                : InteractionKernel::shrinking(val);
    }
    throw std::invalid_argument("unknown kernel '" + s +
                                "' (expected global|tophat:<sigma>|dirac|shrinking:<alpha>)");
}

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

ModelParams parse_config_text(const std::string& text) {
    ModelParams p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "gamma0") p.gamma0 = std::stod(val);
            else if (key == "b") p.b = std::stod(val);
            else if (key == "n_agents") p.n_agents = std::stoi(val);
            else if (key == "dt") p.dt = std::stod(val);
            else if (key == "seed") p.seed = std::stoull(val);
            else if (key == "kernel") p.kernel = kernel_from_string(val);
            else
                throw std::invalid_argument("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": bad value for '" + key + "'");
        }
    }
    return p;
}

ModelParams load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const ModelParams& p) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "gamma0 = %.17g\n", p.gamma0); out += buf;
    std::snprintf(buf, sizeof buf, "b = %.17g\n", p.b); out += buf;
    std::snprintf(buf, sizeof buf, "n_agents = %d\n", p.n_agents); out += buf;
    std::snprintf(buf, sizeof buf, "dt = %.17g\n", p.dt); out += buf;
    std::snprintf(buf, sizeof buf, "seed = %llu\n",
                  static_cast<unsigned long long>(p.seed)); out += buf;
    out += "kernel = " + kernel_to_string(p.kernel) + "\n";
    return out;
}

} // namespace swarmkin
