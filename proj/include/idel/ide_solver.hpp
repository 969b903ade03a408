#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "idel/functionals.hpp"
#include "idel/grid.hpp"

namespace idel {

struct SolveConfig {
    double tol = 1e-12;          // absolute sup-norm stop on iterate differences
    int max_picard_iters = 200;
    double blowup_threshold = 1e12;
    double horizon = 1.0;        // simulate on [t0, t0 + horizon)
};

struct WindowDiag {
    double t0 = 0.0;     // window start
    double R = 0.0;      // norm bound used for the contraction window
    double delta = 0.0;  // window length
    int sweeps = 0;      // max fixed-point iterations over the window's cells
    double factor = 0.0; // max measured contraction ratio
};

/// Solution of x(t) = f(x_t, w_t) on [-r, t_max_reached) with diagnostics.
struct Trajectory {
    SampledFn solution;
    SampledFn input;
    double t_max_reached = 0.0;
    bool escaped = false;
    double last_norm = 0.0;
    std::vector<WindowDiag> windows;
    double max_factor = 0.0;
    int max_sweeps = 0;

    const WindowDiag& window(std::size_t i) const { return windows[i]; }
};

/// Contraction window delta = min(r, 1/(2 N(5 a(R)) + eps0)) rounded down to a
/// grid multiple; throws contraction_error when it falls below one step.
double contraction_window(const IdeSystem& sys, double R, double step);

/// Extend a history by one contraction window of length delta: successive
/// approximations from the zero seed until the iterate difference falls
/// under cfg.tol. Returns the extension on [t0, t0 + delta).
SampledFn picard_step(const IdeSystem& sys, const SampledFn& base_history,
                      const SampledFn& input, double delta, const SolveConfig& cfg,
                      WindowDiag* diag = nullptr, double seed_value = 0.0);

/// March contraction windows until the horizon, recomputing delta from the
/// running norm bound per window. Escape (a value beyond blowup_threshold) is
/// reported, never clipped.
Trajectory solve(const IdeSystem& sys, const SampledFn& x0, const SampledFn& input,
                 const SolveConfig& cfg);

struct LipschitzConstants {
    double G = 1.0;
    double P = 0.0;
};

/// G(s) = (1 + 2M(s))^(2 + 2 r N(s)),  P(s) = (2 N(s) + 1/r) ln(1 + 2M(s)).
LipschitzConstants lipschitz_constants(const Moduli& moduli, double r, double s);

/// Max over committed cells of |value - commit-evaluation| along a finished
/// trajectory (the fixed-point residual under the solver's own collocation).
double collocation_residual(const IdeSystem& sys, const Trajectory& traj);

/// Plain-text diagnostic lines, one per window:
/// "window k: R=..., delta=..., sweeps=..., factor=..."
std::string diag_lines(const Trajectory& traj);

} // namespace idel
