#include "idel/feedback.hpp"

#include <algorithm>
#include <cmath>

#include "idel/hyperbolic.hpp"
#include "idel/rng.hpp"

namespace idel {

namespace {

// (e^{g h} - 1), the exponential-Euler cell weight; ~ g h as g -> 0.
double cell_weight(double g, double h) { return std::expm1(g * h); }

struct LoopState {
    double g = 0.0;
    double h = 0.0;
    std::int64_t K = 0;
    std::vector<double> p; // index m + K
    std::vector<double> v;

    double pm(std::int64_t m) const { return p[m + K]; }
    double vm(std::int64_t m) const { return v[m + K]; }
};

// The distributed-delay law at step m: reads p on [t-1, t] (current cell
// included; the plant commits p(t) before u(t)) and v on [t-1, t).
double law_ide(const LoopState& s, std::int64_t m) {
    const double g = s.g;
    const double h = s.h;
    const double w = cell_weight(g, h);
    double acc = 0.0;
    for (std::int64_t l = m - s.K; l < m; ++l) {
        acc += std::exp(g * static_cast<double>(m - 1 - l) * h) * (s.vm(l) - s.pm(l));
    }
    return -std::exp(g) * (s.pm(m) - s.vm(m - s.K)) - w * acc;
}

// Kernel arrangement: -g sum_j (int_cell e^{gz} dz) x_j over the profile the
// loop's quadrature implies. Algebraically the same sum as law_ide.
double law_kernel(const LoopState& s, std::int64_t m) {
    const double g = s.g;
    const double h = s.h;
    const double w = cell_weight(g, h);
    double prefix = 0.0;
    double acc = 0.0;
    for (std::int64_t j = 0; j < s.K; ++j) {
        prefix += w * s.pm(m - 1 - j);
        const double xj = s.vm(m - 1 - j) + prefix;
        acc += w * std::exp(g * static_cast<double>(j) * h) * xj;
    }
    return -acc;
}

ClosedLoopResult run_loop(double g, const SampledFn& x0, const SampledFn* w,
                          const SampledFn* u_ext, ControllerKind kind, double T,
                          std::vector<double> snapshot_times) {
    const std::int64_t K = x0.grid().count();
    if (x0.dim() != 1) throw validation_error("closed_loop: x0 must be a scalar profile");
    const double h = 1.0 / static_cast<double>(K);
    const Grid tg(h, 0, 1);
    if (!tg.aligned(T)) throw validation_error("closed_loop: T must be cell-aligned");
    const std::int64_t M = tg.index_of(T);

    LoopState s;
    s.g = g;
    s.h = h;
    s.K = K;
    s.p.assign(static_cast<std::size_t>(M + K), 0.0);
    s.v.assign(static_cast<std::size_t>(M + K), 0.0);
    for (std::int64_t l = -K; l < 0; ++l) {
        s.v[l + K] = x0.cell_local(-l - 1)[0]; // v(t) = x0(-t) wash (a = 0)
    }

    const double weight = cell_weight(g, h);
    std::vector<double> u_trace(static_cast<std::size_t>(M), 0.0);
    double disagreement = 0.0;

    double running = 0.0; // sum of the K previous p cells
    for (std::int64_t m = 0; m < M; ++m) {
        s.p[m + K] = s.vm(m - K) + weight * running;
        if (!std::isfinite(s.pm(m)) || std::abs(s.pm(m)) > 1e12) {
            throw escape_error("closed_loop: boundary trace exceeded the blow-up threshold");
        }
        double u = 0.0;
        if (u_ext) {
            u = u_ext->cell(u_ext->grid().cell_containing(tg.cell_lo(m)))[0];
        } else {
            const double ui = law_ide(s, m);
            const double uk = law_kernel(s, m);
            disagreement = std::max(disagreement, std::abs(ui - uk));
            u = (kind == ControllerKind::KernelIntegral) ? uk : ui;
        }
        u_trace[m] = u;
        const double wm = w ? w->cell(w->grid().cell_containing(tg.cell_lo(m)))[0] : 0.0;
        s.v[m + K] = u + wm;
        running += s.pm(m) - s.pm(m - K);
    }

    ClosedLoopResult res{SampledFn(Grid(h, -K, M + K), 1, std::move(s.p)),
                         SampledFn(Grid(h, -K, M + K), 1, std::move(s.v)),
                         SampledFn(Grid(h, 0, M), 1, std::move(u_trace)),
                         {},
                         disagreement,
                         g,
                         h};
    for (double ts : snapshot_times) {
        if (ts > T + 0.5 * h) continue;
        res.snapshots.emplace_back(ts, loop_profile(g, res.p, res.v, ts, K));
    }
    return res;
}

} // namespace

double kernel(double g, double z) { return -g * std::exp(g * z); }

double control_kernel(double g, const SampledFn& profile) {
    const std::int64_t K = profile.grid().count();
    const double dz = profile.grid().step();
    const double w = cell_weight(g, dz); // g * int_cell e^{gz} dz = w * e^{g j dz}
    double acc = 0.0;
    for (std::int64_t j = 0; j < K; ++j) {
        acc += w * std::exp(g * static_cast<double>(j) * dz) * profile.cell_local(j)[0];
    }
    return -acc;
}

double control_ide(double g, const SampledFn& p_hist, const SampledFn& v_hist) {
    const std::int64_t K = v_hist.grid().count();
    if (p_hist.grid().count() != K + 1) {
        throw validation_error(
            "control_ide: p history must cover [t-1, t] (one delay unit plus the current cell)");
    }
    const double h = v_hist.grid().step();
    const double w = cell_weight(g, h);
    double acc = 0.0;
    for (std::int64_t i = 0; i < K; ++i) { // lag K-1-i cells before the end
        const double ew = std::exp(g * static_cast<double>(K - 1 - i) * h);
        acc += ew * (v_hist.cell_local(i)[0] - p_hist.cell_local(i)[0]);
    }
    const double p_now = p_hist.cell_local(K)[0];
    const double v_lag = v_hist.cell_local(0)[0];
    return -std::exp(g) * (p_now - v_lag) - w * acc;
}

double control_two_point(double g, const SampledFn& x1_hist, const SampledFn& x0_hist) {
    return control_ide(g, x1_hist, x0_hist);
}

HyperbolicSystem recirculation_plant(double g) {
    HyperbolicSystem sys;
    sys.c = 1.0;
    sys.a_fn = CoefficientA{ScalarFn::constant(0.0), {0.0}};
    sys.g_fns = {ScalarFn::constant(g)};
    sys.K_fns = {BoundaryFunctional::point_eval_end()};
    sys.G_fn = BoundaryFunctional::input_u();
    sys.m1 = 0;
    sys.m2 = 1;
    return sys;
}

double ClosedLoopResult::sup_after(double t_from) const {
    const Grid& ug = u.grid();
    const std::int64_t K = -p.grid().first_cell();
    double best = 0.0;
    for (std::int64_t m = ug.cell_containing(t_from + 0.49 * step);
         m < ug.first_cell() + ug.count(); ++m) {
        const SampledFn prof = loop_profile(gain_g, p, v, ug.cell_lo(m), K);
        best = std::max(best, prof.sup_norm());
    }
    return best;
}

SampledFn loop_profile(double g, const SampledFn& p, const SampledFn& v, double t,
                       std::int64_t K) {
    const Grid& tg = p.grid();
    const double h = tg.step();
    const std::int64_t m = tg.index_of(t);
    const double w = cell_weight(g, h);
    std::vector<double> out(static_cast<std::size_t>(K), 0.0);
    double prefix = 0.0;
    for (std::int64_t j = 0; j < K; ++j) {
        const std::int64_t cell = m - 1 - j;
        prefix += w * p.cell(cell)[0];
        out[j] = v.cell(cell)[0] + prefix;
    }
    return SampledFn(profile_grid(static_cast<int>(K)), 1, std::move(out));
}

ClosedLoopResult closed_loop(double g, const SampledFn& x0, ControllerKind kind,
                             const SampledFn& w, double T,
                             std::vector<double> snapshot_times) {
    return run_loop(g, x0, &w, nullptr, kind, T, std::move(snapshot_times));
}

ClosedLoopResult open_loop(double g, const SampledFn& x0, const SampledFn& u, double T,
                           std::vector<double> snapshot_times) {
    return run_loop(g, x0, nullptr, &u, ControllerKind::KernelIntegral, T,
                    std::move(snapshot_times));
}

IssGainReport iss_gain_measurement(double g, int trials, double T, int K,
                                   std::uint64_t seed) {
    IssGainReport rep;
    rep.trials = trials;
    const double h = 1.0 / K;
    const Grid zg = profile_grid(K);
    const Grid wg(h, 0, std::llround(T / h));
    const double settle = 2.0 + 2.0 * h;

    for (int i = 0; i < trials; ++i) {
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        std::vector<double> x0v(static_cast<std::size_t>(K));
        for (double& x : x0v) x = rng.next_in(-1.0, 1.0);
        const SampledFn x0(zg, 1, std::move(x0v));

        // zero-error run: the residual after the deadbeat settles
        {
            const SampledFn w0 = SampledFn::constant(wg, 0.0);
            const ClosedLoopResult r = closed_loop(g, x0, ControllerKind::KernelIntegral, w0, T);
            rep.zero_input_residual = std::max(rep.zero_input_residual, r.sup_after(settle));
        }

        std::vector<double> wv(static_cast<std::size_t>(wg.count()));
        double wsup = 0.0;
        for (double& x : wv) {
            x = rng.next_in(-1.0, 1.0);
            wsup = std::max(wsup, std::abs(x));
        }
        const SampledFn w1(wg, 1, wv);
        const ClosedLoopResult r1 = closed_loop(g, x0, ControllerKind::KernelIntegral, w1, T);
        const double resid1 = r1.sup_after(settle);
        rep.measured_gain = std::max(rep.measured_gain, resid1 / wsup);

        for (double& x : wv) x *= 2.0;
        const SampledFn w2(wg, 1, std::move(wv));
        const ClosedLoopResult r2 = closed_loop(g, x0, ControllerKind::KernelIntegral, w2, T);
        const double resid2 = r2.sup_after(settle);
        if (resid1 > 0.0) {
            rep.linearity_defect =
                std::max(rep.linearity_defect, std::abs(resid2 - 2.0 * resid1) / resid1);
        }
    }
    return rep;
}

} // namespace idel
