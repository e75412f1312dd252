#pragma once
// Two-speed kinetic solver on the periodic unit interval: densities p+ (right
// movers) and p- (left movers) on a uniform cell-centered grid, advanced by
// first-order upwind transport plus a semi-implicit per-cell exchange whose
// rates depend on a closure velocity field u.  Closures range from the
// kernel-smoothed nonlocal model down to the local j/rho limit, the
// interaction-free telegraph system, and the borderline shrinking-radius
// closure built on G(rho) = sum_k rho^k/(k! k).

#include <string>
#include <vector>

#include "swarmkin/params.hpp"

namespace swarmkin {

struct KineticField {
    int cells = 0;
    double dx = 0.0;
    double time = 0.0;
    std::vector<double> pp;   // density of +1 movers, cell averages
    std::vector<double> pm;   // density of -1 movers

    double rho(int i) const { return pp[static_cast<std::size_t>(i)] + pm[static_cast<std::size_t>(i)]; }
    double flux(int i) const { return pp[static_cast<std::size_t>(i)] - pm[static_cast<std::size_t>(i)]; }
    double mass() const;                    // dx * sum(rho)
    std::vector<double> rho_vec() const;
    std::vector<double> flux_vec() const;
};

// uniform state pp = pp_val, pm = pm_val everywhere
KineticField uniform_field(int M, double pp_val, double pm_val);

// deposit a box profile of the given height on [lo, hi] into p+ (plus=true)
// or p-, projected by exact cell averages of the indicator
void add_block(KineticField& f, bool plus, double lo, double hi, double height);

// the standard demo initial state: two opposing beams, p+ = 2.2 on
// [0.125, 0.375] and p- = 1.8 on [0.625, 0.875], cell-averaged
KineticField counterflow_blocks(int M);

struct ClosureModel {
    enum class Kind { Nonlocal, NonlocalRegularized, DiracLocal, ShrinkAlpha1, Telegraph };
    Kind kind = Kind::Nonlocal;
    InteractionKernel kernel;   // used by the two nonlocal kinds
    double eps = 0.0;           // regularization floor of NonlocalRegularized

    static ClosureModel nonlocal(InteractionKernel k);
    static ClosureModel regularized(InteractionKernel k, double eps);
    static ClosureModel dirac_local();
    static ClosureModel shrink_alpha1();
    static ClosureModel telegraph();
};

std::string closure_to_string(const ClosureModel& c);
ClosureModel closure_from_string(const std::string& s);

// closure velocity per cell for the pointwise closures:
//   Nonlocal            (W*j)/(W*rho), 0 where the smoothed density vanishes
//   NonlocalRegularized (W*j)/(eps + W*rho)
//   DiracLocal          j/rho where rho > 0, else 0
// Convolutions use midpoint quadrature with the kernel sampled at cell
// centers (unnormalized; the ratio cancels any common factor).  Telegraph and
// ShrinkAlpha1 have no pointwise velocity and are rejected here.
std::vector<double> mean_velocity_field(const KineticField& f, const ClosureModel& c);

// collision right-hand side at a frozen velocity field:
//   d(p+) = -[g0 + b(1-u)^2] p+ + [g0 + b(1+u)^2] p-,  d(p-) = -d(p+)
void rhs_collision(const KineticField& f, const std::vector<double>& u,
                   const ModelParams& p, std::vector<double>& dpp, std::vector<double>& dpm);

// one step of size dt: upwind transport (p+ right, p- left, periodic), then
// the 2x2 exchange solved implicitly per cell with u frozen from the pre-step
// field.  Mass-exact and positivity-preserving for any dt <= dx.
KineticField step_kinetic(const KineticField& f, const ClosureModel& c,
                          const ModelParams& p, double dt);

struct Snapshot {
    double time = 0.0;
    KineticField field;
    std::vector<double> u;
};

struct DiagRow {
    double time = 0.0;
    double mass = 0.0;
    double l2_j = 0.0;     // sqrt(integral of j^2)
    double l2_rho = 0.0;   // sqrt(integral of rho^2)
};

struct SolveRecorders {
    std::vector<double> snapshot_times;   // best-effort nearest step
    int diag_stride = 0;                  // 0 = no diagnostics
};

struct SolveResult {
    std::vector<Snapshot> snapshots;
    std::vector<DiagRow> diagnostics;
    KineticField final_state;
};

SolveResult solve(const KineticField& f0, const ClosureModel& c, const ModelParams& p,
                  double T, double dt, const SolveRecorders& rec = {});

// spatially homogeneous mean velocity under the flat kernel:
//   du/dt = -2 (g0 + b (u^2 - 1)) u
// integrated by classical RK4; predicted_limit classifies the t -> inf
// behaviour (g0 <= b: sign(u0) sqrt(1 - g0/b), else 0).
struct OdeResult {
    std::vector<double> t;
    std::vector<double> u;
    double predicted_limit = 0.0;
};

OdeResult global_u_ode(double u0, const ModelParams& p, double T, double dt);

// G(rho) = sum_{k>=1} rho^k / (k! k); series with term-ratio stopping for
// rho <= 30, exponential-integral asymptotics beyond
double special_G(double rho);

// eta = (j/rho)^2 (1 - e^-rho) + (1 - (j/rho)^2) e^-rho G(rho); eta(0,0) = 0
double eta_closure(double rho, double j);

// one step of the borderline shrinking-radius model: transport as in
// step_kinetic, then flux relaxation dj/dt = -2(g0 + b(1+eta)) j
// + 4 b j (1 - e^-rho) applied implicitly at eta, rho frozen from the
// pre-step field (cast as a 2x2 exchange with nonnegative rates)
KineticField step_shrink_alpha1(const KineticField& f, const ModelParams& p, double dt);

struct TelegraphResult {
    std::vector<double> times;
    std::vector<std::vector<double>> rho;
    KineticField final_state;
};

// damped wave equation d2t rho + 2(g0+b) dt rho = d2x rho as the first-order
// (rho, j) system with dj/dt = -2(g0+b) j, reusing the u = 0 stepper; the
// initial flux is the zero-mean antiderivative of -drho0
TelegraphResult solve_telegraph(const std::vector<double>& rho0,
                                const std::vector<double>& drho0,
                                const ModelParams& p, double T, double dt,
                                int record_stride = 1);

// late-time structure report for the local-closure equilibria: is p- flat and
// p+ two-valued, and how well do the plateau relations
//   p1 p2 = (p-)^2   and   p1/p2 = ((1-u_s)/(1+u_s))^2
// hold.  Plateaus are cluster medians after splitting sorted p+ at its
// largest gap.
struct TravelingWaveReport {
    bool in_regime = false;
    std::string message;
    double p_low = 0.0;
    double p_high = 0.0;
    double p_minus = 0.0;
    double u_s = 0.0;
    double residual_product = 0.0;   // |p1 p2 - pm^2| / pm^2
    double residual_ratio = 0.0;     // |p1/p2 - ((1-u_s)/(1+u_s))^2|
    double j_l2 = 0.0;
};

TravelingWaveReport traveling_wave_check(const KineticField& f, const ModelParams& p);

} // namespace swarmkin
