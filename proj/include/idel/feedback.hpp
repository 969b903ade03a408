#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "idel/grid.hpp"
#include "idel/hyperbolic_system.hpp"

namespace idel {

/// Three arrangements of the same boundary feedback for the recirculation
/// plant x_t + x_z = g x(t,1), x(t,0) = u(t):
///   KernelIntegral  u(t) = int_0^1 k(z) x(t,z) dz with k(z) = -g e^{g z}
///   IdeCoordinates  the distributed-delay law in (p, v) coordinates
///   DelayedTwoPoint the same law fed by the boundary traces x(.,1), x(.,0)
enum class ControllerKind { KernelIntegral, DelayedTwoPoint, IdeCoordinates };

/// The kernel k(z) = -g exp(g z).
double kernel(double g, double z);

/// int_0^1 k(z) x(z) dz for a cell profile, k integrated exactly over each
/// cell (its cell averages), so the sum is the exact integral of k against
/// the piecewise-constant profile.
double control_kernel(double g, const SampledFn& profile);

/// Distributed-delay law: p history on [t-1, t] (K+1 cells, current cell
/// included — the plant commits p(t) before u(t)), v history on [t-1, t).
/// Kernels are the exactly integrated exponentials of the closed-form law
/// plus its boundary point term.
double control_ide(double g, const SampledFn& p_hist, const SampledFn& v_hist);

/// Same sums fed by the measured traces x(s,1) (current value included) and
/// x(s,0); only two point sensors are needed.
double control_two_point(double g, const SampledFn& x1_hist, const SampledFn& x0_hist);

/// The section's plant as a HyperbolicSystem (c = 1, a = 0, K_1 = x(1),
/// G = u), for conversion and equivalence runs.
HyperbolicSystem recirculation_plant(double g);

struct ClosedLoopResult {
    SampledFn p;  // boundary trace x(.,1) on [-1, T)
    SampledFn v;  // boundary trace x(.,0) on [-1, T)
    SampledFn u;  // control on [0, T)
    std::vector<std::pair<double, SampledFn>> snapshots;
    double controller_disagreement = 0.0; // max over steps of the arrangements' spread
    double gain_g = 0.0;
    double step = 0.0;

    /// sup_z |x(t,z)| over the committed times t >= t_from.
    double sup_after(double t_from) const;
};

/// Closed loop with additive actuator error w: the (p, v) closure marches
/// with exponentially weighted cell quadrature (the exact per-cell
/// integration of the recirculation flow for cell-constant delayed feeds),
/// so the law above is an exact discrete deadbeat: p(t) = w(t-1) for
/// t >= 1 + 2h and the profile vanishes identically for t >= 2 + 2h when
/// w = 0. u is piecewise constant, computed from the state at each cell's
/// left edge.
ClosedLoopResult closed_loop(double g, const SampledFn& x0, ControllerKind kind,
                             const SampledFn& w, double T,
                             std::vector<double> snapshot_times = {});

/// Same march with u supplied externally (u = 0 reproduces the open loop).
ClosedLoopResult open_loop(double g, const SampledFn& x0, const SampledFn& u, double T,
                           std::vector<double> snapshot_times = {});

/// Profile at an aligned time from the closed-loop traces (the quadrature
/// matches the plant's, so x(t,1) equals p(t) exactly).
SampledFn loop_profile(double g, const SampledFn& p, const SampledFn& v, double t,
                       std::int64_t K);

struct IssGainReport {
    int trials = 0;
    double measured_gain = 0.0;    // smallest Gamma with steady sup_z|x| <= Gamma sup|w|
    double zero_input_residual = 0.0; // sup_z|x| after t = 2 + 2h with w = 0
    double linearity_defect = 0.0; // | resid(2w) - 2 resid(w) | / resid(w)
};

/// Measure the ISS gain over random initial data and bounded random w.
IssGainReport iss_gain_measurement(double g, int trials, double T, int K,
                                   std::uint64_t seed);

} // namespace idel
