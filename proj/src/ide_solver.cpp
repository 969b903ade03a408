#include "idel/ide_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace idel {

namespace {

double vec_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct CellBuffer {
    // Growable storage behind a SampledFn-compatible view; avoids reallocating
    // a SampledFn per committed cell.
    Grid grid;
    int dim;
    std::vector<double> values;

    explicit CellBuffer(const SampledFn& base)
        : grid(base.grid()), dim(base.dim()),
          values(base.values().begin(), base.values().end()) {}

    SampledFn fn() const { return SampledFn(grid, dim, values); }

    void push_cell() {
        values.insert(values.end(), dim, 0.0);
        grid = Grid(grid.step(), grid.first_cell(), grid.count() + 1);
    }

    void set_last(std::span<const double> v) {
        std::copy(v.begin(), v.end(), values.end() - dim);
    }

    std::span<const double> last() const {
        return std::span<const double>(values.data() + values.size() - dim, dim);
    }

    double tail_sup(double r) const {
        // sup norm over the trailing window [t_end - r, t_end)
        const std::int64_t cells = std::llround(r / grid.step());
        const std::int64_t from = std::max<std::int64_t>(0, grid.count() - cells);
        double best = 0.0;
        for (std::int64_t k = from; k < grid.count(); ++k) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j) {
                const double x = values[k * dim + j];
                s += x * x;
            }
            best = std::max(best, s);
        }
        return std::sqrt(best);
    }
};

struct WindowOutcome {
    bool escaped = false;
    std::int64_t cells_done = 0;
    int max_iters = 0;
    double max_ratio = 0.0;
};

// Commit n_cells cells by per-cell successive approximation. The in-window
// reads are causal (midpoint collocation touches the committing cell only
// through its own iterate), so cells are solved left to right; each cell's
// fixed point contracts at least as fast as the whole-window sweep.
WindowOutcome extend_window(const IdeSystem& sys, CellBuffer& buf, const SampledFn& input,
                            std::int64_t n_cells, const SolveConfig& cfg, double seed_value) {
    WindowOutcome out;
    std::vector<double> next(sys.n, 0.0);
    std::vector<double> seed(sys.n, seed_value);
    const bool self = commit_reads_self(sys);
    const double floor_diff = std::max(cfg.tol * 100.0, 1e-300);
    for (std::int64_t c = 0; c < n_cells; ++c) {
        buf.push_cell();
        buf.set_last(seed);
        const std::int64_t k = buf.grid.first_cell() + buf.grid.count() - 1;
        double prev_diff = -1.0;
        int iters = 0;
        for (;;) {
            ++iters;
            const StateView view(buf.grid, buf.dim, buf.values);
            eval_commit(sys, view, input, k, next);
            bool finite = true;
            for (int j = 0; j < sys.n; ++j) finite = finite && std::isfinite(next[j]);
            if (!finite) {
                out.escaped = true;
                return out;
            }
            double diff = 0.0;
            const std::span<const double> cur = view.cell(k);
            for (int j = 0; j < sys.n; ++j) diff = std::max(diff, std::abs(next[j] - cur[j]));
            buf.set_last(next);
            if (!self) break; // strictly causal: one evaluation is the fixed point
            if (prev_diff > floor_diff && diff > floor_diff) {
                out.max_ratio = std::max(out.max_ratio, diff / prev_diff);
            }
            if (diff <= cfg.tol) break;
            if (iters >= cfg.max_picard_iters) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "picard iteration did not contract within %d sweeps "
                              "(last difference %.3e, measured factor %.3f)",
                              cfg.max_picard_iters, diff,
                              prev_diff > 0 ? diff / prev_diff : 0.0);
                throw contraction_error(msg);
            }
            prev_diff = diff;
        }
        out.max_iters = std::max(out.max_iters, iters);
        ++out.cells_done;
        const double norm = vec_norm(buf.last());
        if (!std::isfinite(norm) || norm > cfg.blowup_threshold) {
            out.escaped = true;
            return out;
        }
    }
    return out;
}

double input_sup(const SampledFn& input, double a, double b) {
    const Grid& g = input.grid();
    const double lo = std::max(a, g.t_start());
    const double hi = std::min(b, g.t_end());
    if (hi <= lo + 0.5 * g.step()) return 0.0;
    const std::int64_t ka = g.cell_containing(lo);
    const std::int64_t kb = g.cell_containing(hi - 0.5 * g.step());
    double best = 0.0;
    for (std::int64_t k = std::max(ka, g.first_cell());
         k <= std::min(kb, g.first_cell() + g.count() - 1); ++k) {
        best = std::max(best, vec_norm(input.cell(k)));
    }
    return best;
}

} // namespace

double contraction_window(const IdeSystem& sys, double R, double step) {
    constexpr double kEps0 = 1e-9;
    const double Na = sys.moduli.N(5.0 * sys.moduli.a(R));
    const double raw = std::min(sys.r, 1.0 / (2.0 * Na + kEps0));
    std::int64_t cells = static_cast<std::int64_t>(std::floor(raw / step + 1e-9));
    // keep 2 N delta < 1 strict even after rounding
    while (cells > 0 && 2.0 * Na * (cells * step) >= 1.0) --cells;
    if (cells < 1) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "grid too coarse for contraction window: delta=%.3e < step=%.3e "
                      "(requires step <= %.3e)",
                      raw, step, raw);
        throw contraction_error(msg);
    }
    return static_cast<double>(cells) * step;
}

SampledFn picard_step(const IdeSystem& sys, const SampledFn& base_history,
                      const SampledFn& input, double delta, const SolveConfig& cfg,
                      WindowDiag* diag, double seed_value) {
    const double h = base_history.grid().step();
    const std::int64_t n_cells = std::llround(delta / h);
    CellBuffer buf(base_history);
    const double t0 = base_history.grid().t_end();
    const double R = std::max(base_history.sup_norm(), input_sup(input, t0 - sys.r, t0 + delta));
    WindowOutcome out = extend_window(sys, buf, input, n_cells, cfg, seed_value);
    if (out.escaped) {
        throw escape_error("picard_step: values exceeded the blow-up threshold");
    }
    if (diag) {
        diag->t0 = t0;
        diag->R = R;
        diag->delta = delta;
        diag->sweeps = out.max_iters;
        diag->factor = out.max_ratio;
    }
    const SampledFn full = buf.fn();
    return full.window(t0, t0 + delta);
}

Trajectory solve(const IdeSystem& sys, const SampledFn& x0, const SampledFn& input,
                 const SolveConfig& cfg) {
    const Grid& g0 = x0.grid();
    const double h = g0.step();
    if (std::llround(sys.r / h) < 1 || !g0.aligned(sys.r)) {
        throw validation_error("solve: delay horizon r must be a positive multiple of the step");
    }
    if (x0.dim() != sys.n) throw validation_error("solve: x0 dimension mismatch");
    const double t0 = g0.t_end();
    const double t_final = t0 + cfg.horizon;
    if (!g0.aligned(cfg.horizon)) {
        throw validation_error("solve: horizon must be cell-aligned");
    }
    const int want_dim = std::max(1, sys.input_dim());
    if (input.dim() != want_dim) throw validation_error("solve: input dimension mismatch");
    if (input.grid().t_start() > t0 - sys.r + 0.5 * h ||
        input.grid().t_end() < t_final - 0.5 * h) {
        throw validation_error("solve: input must cover [t0 - r, t0 + horizon)");
    }

    Trajectory traj{SampledFn(g0, sys.n), input, t0, false, 0.0, {}, 0.0, 0};
    CellBuffer buf(x0);
    double R_run = std::max(x0.sup_norm(), input_sup(input, t0 - sys.r, t0));

    double t = t0;
    while (t < t_final - 0.5 * h) {
        // two passes: delta from past data, then widen R by the window's input
        double delta = contraction_window(sys, R_run, h);
        for (int pass = 0; pass < 8; ++pass) {
            const double R2 = std::max(R_run, input_sup(input, t - sys.r, t + delta));
            const double d2 = contraction_window(sys, R2, h);
            if (d2 >= delta) break;
            delta = d2;
        }
        const double R_win = std::max(R_run, input_sup(input, t - sys.r, t + delta));
        const std::int64_t n_cells =
            std::min(std::llround(delta / h), std::llround((t_final - t) / h));

        WindowOutcome out = extend_window(sys, buf, input, n_cells, cfg, 0.0);
        WindowDiag diag;
        diag.t0 = t;
        diag.R = R_win;
        diag.delta = static_cast<double>(n_cells) * h;
        diag.sweeps = out.max_iters;
        diag.factor = out.max_ratio;
        traj.windows.push_back(diag);
        traj.max_factor = std::max(traj.max_factor, out.max_ratio);
        traj.max_sweeps = std::max(traj.max_sweeps, out.max_iters);

        t += static_cast<double>(out.cells_done) * h;
        if (out.escaped) {
            traj.escaped = true;
            traj.last_norm = vec_norm(buf.last());
            break;
        }
        R_run = std::max(buf.tail_sup(sys.r), input_sup(input, t - sys.r, t));
    }

    traj.solution = buf.fn();
    traj.t_max_reached = traj.solution.grid().t_end();
    if (!traj.escaped) traj.last_norm = buf.tail_sup(sys.r);
    return traj;
}

LipschitzConstants lipschitz_constants(const Moduli& moduli, double r, double s) {
    const double M = moduli.M(s);
    const double N = moduli.N(s);
    LipschitzConstants lc;
    lc.G = std::pow(1.0 + 2.0 * M, 2.0 + 2.0 * r * N);
    lc.P = (2.0 * N + 1.0 / r) * std::log(1.0 + 2.0 * M);
    return lc;
}

double collocation_residual(const IdeSystem& sys, const Trajectory& traj) {
    const SampledFn& sol = traj.solution;
    const Grid& g = sol.grid();
    const std::int64_t k_first = g.first_cell() + std::llround(sys.r / g.step());
    std::vector<double> val(sys.n, 0.0);
    double worst = 0.0;
    for (std::int64_t k = k_first; k < g.first_cell() + g.count(); ++k) {
        eval_commit(sys, sol, traj.input, k, val);
        const std::span<const double> cur = sol.cell(k);
        for (int j = 0; j < sys.n; ++j) worst = std::max(worst, std::abs(val[j] - cur[j]));
    }
    return worst;
}

std::string diag_lines(const Trajectory& traj) {
    std::string out;
    char buf[160];
    for (std::size_t i = 0; i < traj.windows.size(); ++i) {
        const WindowDiag& w = traj.windows[i];
        std::snprintf(buf, sizeof buf, "window %zu: R=%.6g, delta=%.6g, sweeps=%d, factor=%.6g\n",
                      i, w.R, w.delta, w.sweeps, w.factor);
        out += buf;
    }
    return out;
}

} // namespace idel
