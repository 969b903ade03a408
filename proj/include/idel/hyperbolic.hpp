#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "idel/functionals.hpp"
#include "idel/hyperbolic_system.hpp"
#include "idel/ide_solver.hpp"

namespace idel {

/// (A(p)v)(z) = exp(int_{-z/c}^{0} a(p(q), z + c q) dq) * v(-z/c).
double op_A(const HyperbolicSystem& sys, const SampledFn& p, const SampledFn& v, double z);

/// (B(p))(z) = int_{-z/c}^{0} exp(int_s^0 a(p(q), z + c q) dq) <g(z + c s), p(s)> ds.
double op_B(const HyperbolicSystem& sys, const SampledFn& p, double z);

/// The closure system in (p_1..p_N, v) coordinates with delay r = 1/c;
/// moduli come from the closed-form reconstruction bounds.
IdeSystem to_ide(std::shared_ptr<const HyperbolicSystem> sys);

/// (p, v) history on [-1/c, 0) matching a profile x0 on (0,1]: p identically
/// zero and v from the characteristic integration. initial_pv is the general
/// embedding with a caller-chosen p history.
SampledFn initial_v(const HyperbolicSystem& sys, const SampledFn& x0);
SampledFn initial_pv(const HyperbolicSystem& sys, const SampledFn& x0, const SampledFn& p_hist);

/// Profile at time t from a solved (p, v) trajectory: the two-branch
/// characteristic formula (source integral plus exp-weighted v(t - z/c) for
/// z <= c t, exp-weighted x0(z - c t) beyond the wash front).
SampledFn reconstruct(const HyperbolicSystem& sys, const SampledFn& pv, const SampledFn& x0,
                      double t);

struct PdeResult {
    Trajectory closure;                                  // (p, v) trajectory
    std::vector<std::pair<double, SampledFn>> snapshots; // requested profiles
};

/// Convert, solve the closure IDE, reconstruct snapshots. Grids obey unit
/// CFL: dz = c * h with h the time step of x0's companion grid (K cells over
/// (0, 1] give h = 1/(c K)).
PdeResult solve_pde(const HyperbolicSystem& sys, const SampledFn& x0, const SampledFn& w,
                    double T, const SolveConfig& cfg, std::vector<double> snapshot_times);

/// Independent first-order oracle: upwind march at unit CFL with explicit
/// source, boundary cell from G, p from the current profile quadrature.
std::vector<std::pair<double, SampledFn>> upwind_reference(const HyperbolicSystem& sys,
                                                           const SampledFn& x0,
                                                           const SampledFn& w, double T,
                                                           std::vector<double> snapshot_times,
                                                           double blowup_threshold = 1e12);

/// (sum_cells |f - g|^mu dz)^(1/mu); mu >= 1.
double l_mu_distance(const SampledFn& f, const SampledFn& g, double mu);

/// z-grid with K cells over (0, 1] (cell width 1/K).
Grid profile_grid(int K);

/// Time grid companion of a profile grid under unit CFL (step = 1/(c K)).
Grid history_grid(const HyperbolicSystem& sys, int K);

} // namespace idel
