#include "idel/hyperbolic.hpp"

#include <algorithm>
#include <cmath>

namespace idel {

namespace {

double functional_l_term(const BoundaryFunctional& f, double d_bound) {
    const double dfac = f.times_d ? std::max(1.0, d_bound) : 1.0;
    switch (f.kind) {
        case BoundaryFunctional::Kind::Zero:
        case BoundaryFunctional::Kind::InputU:
            return 0.0;
        case BoundaryFunctional::Kind::PointEvalEnd:
            return std::abs(f.scale) * dfac;
        case BoundaryFunctional::Kind::WeightedIntegral:
            return std::abs(f.scale) * dfac * f.weight.abs_bound(0.0, 1.0);
    }
    return 0.0;
}

double functional_sigma_term(const BoundaryFunctional& f, double d_bound) {
    const double dfac = f.times_d ? std::max(1.0, d_bound) : 1.0;
    switch (f.kind) {
        case BoundaryFunctional::Kind::Zero:
            return 0.0;
        case BoundaryFunctional::Kind::InputU:
            return std::abs(f.scale);
        case BoundaryFunctional::Kind::PointEvalEnd:
            return std::abs(f.scale) * dfac;
        case BoundaryFunctional::Kind::WeightedIntegral:
            return std::abs(f.scale) * dfac * f.weight.abs_integral_bound(0.0, 1.0);
    }
    return 0.0;
}

bool all_g_constant(const HyperbolicSystem& sys) {
    for (const auto& g : sys.g_fns) {
        if (!g.is_constant()) return false;
    }
    return true;
}

} // namespace

double HyperbolicSystem::functional_lip() const {
    double L = functional_l_term(G_fn, d_bound);
    for (const auto& k : K_fns) L += functional_l_term(k, d_bound);
    return L;
}

double HyperbolicSystem::sigma_coef() const {
    double s = functional_sigma_term(G_fn, d_bound);
    for (const auto& k : K_fns) s += functional_sigma_term(k, d_bound);
    return s;
}

double HyperbolicSystem::b_coef() const { return sigma_coef(); }

double HyperbolicSystem::g_sup_norm() const {
    double s = 0.0;
    for (const auto& g : g_fns) {
        const double b = g.abs_bound(0.0, 1.0);
        s += b * b;
    }
    return std::sqrt(s);
}

double apply_functional(const BoundaryFunctional& f, const HyperbolicSystem& sys,
                        std::span<const double> profile, double dz,
                        std::span<const double> w_now) {
    double val = 0.0;
    switch (f.kind) {
        case BoundaryFunctional::Kind::Zero:
            return 0.0;
        case BoundaryFunctional::Kind::PointEvalEnd:
            val = profile.empty() ? 0.0 : profile[profile.size() - 1];
            break;
        case BoundaryFunctional::Kind::WeightedIntegral: {
            double acc = 0.0;
            for (std::size_t j = 0; j < profile.size(); ++j) {
                acc += f.weight((static_cast<double>(j) + 0.5) * dz) * profile[j];
            }
            val = acc * dz;
            break;
        }
        case BoundaryFunctional::Kind::InputU:
            return f.scale * w_now[sys.m1 + f.u_index];
    }
    if (f.times_d) val *= w_now[f.d_index];
    return f.scale * val;
}

void reconstruct_profile(const HyperbolicSystem& sys, const StateView& state,
                         std::int64_t eval_cell, std::span<double> profile_out) {
    const Grid& g = state.grid();
    const double h = g.step();
    const double c = sys.c;
    const double dz = c * h;
    const int N = sys.n_channels();
    const std::int64_t K = static_cast<std::int64_t>(profile_out.size());

    if (sys.a_fn.is_zero() && all_g_constant(sys)) {
        // a == 0: pure reads plus constant-g prefix quadrature, O(K) total.
        std::vector<double> gconst(N);
        for (int i = 0; i < N; ++i) gconst[i] = sys.g_fns[i].constant_value();
        std::vector<double> prefix(N, 0.0);
        for (std::int64_t j = 0; j < K; ++j) {
            const std::span<const double> oldest = state.cell(eval_cell - 1 - j);
            double acc = 0.0;
            for (int i = 0; i < N; ++i) {
                prefix[i] += 0.5 * h * oldest[i];
                acc += gconst[i] * prefix[i];
            }
            profile_out[j] = state.cell(eval_cell - 1 - j)[N] + acc;
            // the half cell just consumed becomes a full cell for the next j
            for (int i = 0; i < N; ++i) prefix[i] += 0.5 * h * oldest[i];
        }
        return;
    }

    const double t = g.cell_lo(eval_cell);
    for (std::int64_t j = 0; j < K; ++j) {
        const double zj = (static_cast<double>(j) + 0.5) * dz;
        double acc_a = 0.0; // integral of a from the current piece midpoint up to t
        double B = 0.0;
        // pieces i = 0..j walk backwards from t along the characteristic
        for (std::int64_t i = 0; i <= j; ++i) {
            const std::int64_t cell = eval_cell - 1 - i;
            const double len = (i == j) ? 0.5 * h : h;
            const double s_mid = (i == j) ? t - (static_cast<double>(j) + 0.25) * h
                                          : t - (static_cast<double>(i) + 0.5) * h;
            const double z_arg = zj + c * (s_mid - t);
            const std::span<const double> pv = state.cell(cell);
            const std::span<const double> p(pv.data(), N);
            const double a_val = sys.a_fn(p, z_arg);
            double gp = 0.0;
            for (int ch = 0; ch < N; ++ch) gp += sys.g_fns[ch](z_arg) * p[ch];
            B += std::exp(acc_a + 0.5 * a_val * len) * gp * len;
            acc_a += a_val * len;
        }
        profile_out[j] = std::exp(acc_a) * state.cell(eval_cell - 1 - j)[N] + B;
    }
}

double op_A(const HyperbolicSystem& sys, const SampledFn& p, const SampledFn& v, double z) {
    if (z <= 0.0 || z > 1.0) throw domain_error("op_A: z must lie in (0, 1]");
    const Grid& g = p.grid();
    const double c = sys.c;
    const double lo = -z / c;
    const double vread = v.cell(v.grid().cell_containing(lo))[0];
    if (sys.a_fn.is_zero()) return vread;
    double acc = 0.0;
    const std::int64_t k_lo = g.cell_containing(lo);
    const std::int64_t k_hi = g.cell_containing(-0.5 * g.step());
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double a = std::max(lo, g.cell_lo(k));
        const double b = std::min(0.0, g.cell_hi(k));
        if (b <= a) continue;
        const double mid = 0.5 * (a + b);
        acc += sys.a_fn(p.cell(k), z + c * mid) * (b - a);
    }
    return std::exp(acc) * vread;
}

double op_B(const HyperbolicSystem& sys, const SampledFn& p, double z) {
    if (z <= 0.0 || z > 1.0) throw domain_error("op_B: z must lie in (0, 1]");
    const Grid& g = p.grid();
    const double c = sys.c;
    const int N = sys.n_channels();
    const double lo = -z / c;
    // walk from s = 0 backwards so the inner suffix integral accumulates
    double acc_a = 0.0;
    double B = 0.0;
    const std::int64_t k_hi = g.cell_containing(-0.5 * g.step());
    const std::int64_t k_lo = g.cell_containing(lo);
    for (std::int64_t k = k_hi; k >= k_lo; --k) {
        const double a = std::max(lo, g.cell_lo(k));
        const double b = std::min(0.0, g.cell_hi(k));
        if (b <= a) continue;
        const double len = b - a;
        const double mid = 0.5 * (a + b);
        const double z_arg = z + c * mid;
        const std::span<const double> pc = p.cell(k);
        const double a_val = sys.a_fn(pc, z_arg);
        double gp = 0.0;
        for (int ch = 0; ch < N; ++ch) gp += sys.g_fns[ch](z_arg) * pc[ch];
        B += std::exp(acc_a + 0.5 * a_val * len) * gp * len;
        acc_a += a_val * len;
    }
    return B;
}

IdeSystem to_ide(std::shared_ptr<const HyperbolicSystem> sys) {
    if (!sys || sys->c <= 0.0) throw validation_error("to_ide: transport speed must be positive");
    if (sys->K_fns.empty()) throw validation_error("to_ide: at least one K functional required");
    if (sys->g_fns.size() != sys->K_fns.size()) {
        throw validation_error("to_ide: g and K channel counts differ");
    }
    IdeSystem ide;
    ide.n = sys->n_channels() + 1;
    ide.r = 1.0 / sys->c;
    ide.m1 = sys->m1;
    ide.m2 = sys->m2;
    ide.d_comp_bound = sys->d_bound;
    ide.rhs = ConvertedHyperbolic{sys};
    ide.moduli = compute_moduli(ide.rhs, ide.r, ide.m2);
    return ide;
}

SampledFn initial_pv(const HyperbolicSystem& sys, const SampledFn& x0,
                     const SampledFn& p_hist) {
    const std::int64_t K = x0.grid().count();
    const int N = sys.n_channels();
    const double c = sys.c;
    const double h = 1.0 / (c * static_cast<double>(K));
    const Grid tg(h, -K, K);
    if (p_hist.dim() != N || p_hist.grid().count() != K) {
        throw validation_error("initial_pv: p history must have N channels on K cells");
    }
    std::vector<double> vals(static_cast<std::size_t>(K) * (N + 1), 0.0);
    for (std::int64_t l = 0; l < K; ++l) { // local cell l covers [-(K-l) h, -(K-l-1) h)
        const std::int64_t cell = -K + l;
        const double q = -tg.cell_mid(cell); // q in (0, 1/c]
        // x0(c q): the matching z cell
        const double x0v = x0.cell(x0.grid().cell_containing(c * q))[0];
        // pieces over s in [-q, 0): oldest first, accumulating the prefix
        // integral of a from -q along the characteristic
        double acc = 0.0;  // integral of a from -q to the current piece start
        double sub = 0.0;  // the g-weighted source subtraction
        const std::int64_t k_lo = tg.cell_containing(-q);
        for (std::int64_t k = k_lo; k <= -1; ++k) {
            const double a = std::max(-q, tg.cell_lo(k));
            const double b = std::min(0.0, tg.cell_hi(k));
            if (b <= a) continue;
            const double len = b - a;
            const double mid = 0.5 * (a + b);
            const double z_arg = c * (q + mid);
            const std::span<const double> p = p_hist.cell_local(k + K);
            const double a_val = sys.a_fn(p, z_arg);
            double gp = 0.0;
            for (int ch = 0; ch < N; ++ch) gp += sys.g_fns[ch](z_arg) * p[ch];
            sub += std::exp(-(acc + 0.5 * a_val * len)) * gp * len;
            acc += a_val * len;
        }
        const double v = std::exp(-acc) * x0v - sub;
        for (int ch = 0; ch < N; ++ch) vals[l * (N + 1) + ch] = p_hist.cell_local(l)[ch];
        vals[l * (N + 1) + N] = v;
    }
    return SampledFn(tg, N + 1, std::move(vals));
}

SampledFn initial_v(const HyperbolicSystem& sys, const SampledFn& x0) {
    const std::int64_t K = x0.grid().count();
    const double h = 1.0 / (sys.c * static_cast<double>(K));
    const SampledFn zero_p(Grid(h, -K, K), sys.n_channels());
    return initial_pv(sys, x0, zero_p);
}

SampledFn reconstruct(const HyperbolicSystem& sys, const SampledFn& pv, const SampledFn& x0,
                      double t) {
    const Grid& tg = pv.grid();
    const double h = tg.step();
    const double c = sys.c;
    const double dz = c * h;
    const int N = sys.n_channels();
    const std::int64_t K = x0.grid().count();
    const std::int64_t m = tg.index_of(t);
    if (m < 0 || m > tg.first_cell() + tg.count()) {
        throw domain_error("reconstruct: time outside the trajectory");
    }
    std::vector<double> out(static_cast<std::size_t>(K), 0.0);
    for (std::int64_t j = 0; j < K; ++j) {
        const double zj = (static_cast<double>(j) + 0.5) * dz;
        const bool wash = j >= m; // z > c t: still carried by the initial profile
        const double s_lo = wash ? 0.0 : t - zj / c;
        double endpoint;
        if (wash) {
            endpoint = x0.cell(x0.grid().cell_containing(zj - c * t))[0];
        } else {
            endpoint = pv.cell(tg.cell_containing(s_lo))[N];
        }
        // pieces over [s_lo, t), oldest first, prefix integral of a
        double B = 0.0;
        double full_a = 0.0;
        if (t > s_lo) {
            const std::int64_t k_lo = tg.cell_containing(s_lo);
            const std::int64_t k_hi = tg.cell_containing(t - 0.5 * h);
            // first pass gathers the total integral so the suffix
            // exp(int_tau^t a) can reuse the prefix accumulation
            std::vector<double> avals, lens, zargs;
            for (std::int64_t k = k_lo; k <= k_hi; ++k) {
                const double a = std::max(s_lo, tg.cell_lo(k));
                const double b = std::min(t, tg.cell_hi(k));
                if (b <= a) continue;
                const double mid = 0.5 * (a + b);
                const double z_arg = zj + c * (mid - t);
                const std::span<const double> pvc = pv.cell(k);
                const std::span<const double> p(pvc.data(), N);
                avals.push_back(sys.a_fn(p, z_arg));
                lens.push_back(b - a);
                zargs.push_back(z_arg);
            }
            for (std::size_t i = 0; i < avals.size(); ++i) full_a += avals[i] * lens[i];
            double run = 0.0; // integral of a over pieces before the current one
            std::size_t idx = 0;
            for (std::int64_t k = k_lo; k <= k_hi; ++k) {
                const double a = std::max(s_lo, tg.cell_lo(k));
                const double b = std::min(t, tg.cell_hi(k));
                if (b <= a) continue;
                const std::span<const double> pvc = pv.cell(k);
                const std::span<const double> p(pvc.data(), N);
                double gp = 0.0;
                for (int ch = 0; ch < N; ++ch) gp += sys.g_fns[ch](zargs[idx]) * p[ch];
                const double suffix = full_a - run - 0.5 * avals[idx] * lens[idx];
                B += std::exp(suffix) * gp * lens[idx];
                run += avals[idx] * lens[idx];
                ++idx;
            }
        }
        out[j] = std::exp(full_a) * endpoint + B;
    }
    return SampledFn(profile_grid(static_cast<int>(K)), 1, std::move(out));
}

PdeResult solve_pde(const HyperbolicSystem& sys, const SampledFn& x0, const SampledFn& w,
                    double T, const SolveConfig& cfg, std::vector<double> snapshot_times) {
    const std::int64_t K = x0.grid().count();
    if (!(x0.grid() == profile_grid(static_cast<int>(K)))) {
        throw validation_error("solve_pde: x0 must live on the K-cell profile grid over (0,1]");
    }
    const double h = 1.0 / (sys.c * static_cast<double>(K));
    if ((sys.m1 + sys.m2) > 0 && !w.grid().same_step(Grid(h, 0, 1))) {
        throw validation_error("solve_pde: input step must equal 1/(c K) (unit CFL)");
    }
    const SampledFn pv0 = initial_v(sys, x0);
    IdeSystem ide = to_ide(std::make_shared<HyperbolicSystem>(sys));
    SolveConfig c2 = cfg;
    c2.horizon = T;
    PdeResult res{solve(ide, pv0, w, c2), {}};
    for (double t : snapshot_times) {
        if (t > res.closure.t_max_reached + 0.5 * pv0.grid().step()) continue;
        res.snapshots.emplace_back(t, reconstruct(sys, res.closure.solution, x0, t));
    }
    return res;
}

std::vector<std::pair<double, SampledFn>> upwind_reference(const HyperbolicSystem& sys,
                                                           const SampledFn& x0,
                                                           const SampledFn& w, double T,
                                                           std::vector<double> snapshot_times,
                                                           double blowup_threshold) {
    const std::int64_t K = x0.grid().count();
    const int N = sys.n_channels();
    const double c = sys.c;
    const double h = 1.0 / (c * static_cast<double>(K));
    const double dz = c * h;
    const Grid tg(h, 0, std::llround(T / h));
    const std::int64_t steps = tg.count();

    std::vector<double> x(x0.values().begin(), x0.values().end());
    std::vector<double> xn(x.size(), 0.0);
    std::vector<double> p(N, 0.0);
    std::vector<std::pair<double, SampledFn>> snaps;
    auto maybe_snap = [&](std::int64_t m) {
        for (double ts : snapshot_times) {
            if (std::abs(ts - static_cast<double>(m) * h) <= 1e-9 * std::max(1.0, std::abs(ts))) {
                snaps.emplace_back(ts, SampledFn(x0.grid(), 1, x));
            }
        }
    };
    maybe_snap(0);
    std::vector<double> wzero(std::max(1, sys.m1 + sys.m2), 0.0);
    std::vector<double> p_prev(N, 0.0);
    bool have_prev = false;
    for (std::int64_t m = 0; m < steps; ++m) {
        const std::span<const double> wm =
            (sys.m1 + sys.m2) > 0 ? w.cell(w.grid().cell_containing(tg.cell_lo(m)))
                                  : std::span<const double>(wzero);
        for (int i = 0; i < N; ++i) {
            p[i] = apply_functional(sys.K_fns[i], sys, x, dz, wm);
        }
        const double v = apply_functional(sys.G_fn, sys, x, dz, wm);
        // explicit source with two-step averaged p: exact on stationary data
        std::vector<double> pe(N);
        for (int i = 0; i < N; ++i) pe[i] = have_prev ? 0.5 * (p[i] + p_prev[i]) : p[i];
        for (std::int64_t j = K - 1; j >= 1; --j) {
            const double zj = (static_cast<double>(j) + 0.5) * dz;
            double gp = 0.0;
            for (int i = 0; i < N; ++i) gp += sys.g_fns[i](zj) * pe[i];
            const double up = x[j - 1];
            xn[j] = up + h * (sys.a_fn(pe, zj) * up + gp);
        }
        {
            const double z0 = 0.5 * dz;
            double gp = 0.0;
            for (int i = 0; i < N; ++i) gp += sys.g_fns[i](z0) * pe[i];
            xn[0] = v + 0.5 * h * (sys.a_fn(pe, z0) * v + gp);
        }
        p_prev = p;
        have_prev = true;
        x.swap(xn);
        double sup = 0.0;
        for (double q : x) sup = std::max(sup, std::abs(q));
        if (!std::isfinite(sup) || sup > blowup_threshold) {
            throw escape_error("upwind_reference: profile exceeded the blow-up threshold");
        }
        maybe_snap(m + 1);
    }
    return snaps;
}

double l_mu_distance(const SampledFn& f, const SampledFn& g, double mu) {
    if (mu < 1.0) throw domain_error("l_mu_distance: mu must be >= 1");
    if (!(f.grid() == g.grid()) || f.dim() != g.dim()) {
        throw domain_error("l_mu_distance: functions live on different grids");
    }
    double acc = 0.0;
    const double dz = f.grid().step();
    for (std::int64_t k = 0; k < f.grid().count(); ++k) {
        double d2 = 0.0;
        for (int j = 0; j < f.dim(); ++j) {
            const double d = f.cell_local(k)[j] - g.cell_local(k)[j];
            d2 += d * d;
        }
        acc += std::pow(std::sqrt(d2), mu) * dz;
    }
    return std::pow(acc, 1.0 / mu);
}

Grid profile_grid(int K) { return Grid(1.0 / static_cast<double>(K), 0, K); }

Grid history_grid(const HyperbolicSystem& sys, int K) {
    const double h = 1.0 / (sys.c * static_cast<double>(K));
    return Grid(h, -K, K);
}

} // namespace idel
