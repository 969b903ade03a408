#include "idel/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace idel {

namespace {

// Accumulate out += Mat * x for a row-major dim x dim matrix.
void add_mat_vec(std::span<const double> mat, std::span<const double> x, double scale,
                 std::span<double> out) {
    const int n = static_cast<int>(out.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < static_cast<int>(x.size()); ++j) acc += mat[i * x.size() + j] * x[j];
        out[i] += scale * acc;
    }
}

double frobenius(std::span<const double> mat) {
    double s = 0.0;
    for (double v : mat) s += v * v;
    return std::sqrt(s);
}

// int_{t_eval - r}^{t_eval} k(s - t_eval) * (Mat x(s)) ds on the cell function,
// kernel sampled at the midpoint of each overlap piece (midpoint rule).
void add_kernel_integral(const ScalarFn& kfn, std::span<const double> mat, double scale,
                         const StateView& state, double t_eval, double r,
                         std::span<double> out) {
    const Grid& g = state.grid();
    const double h = g.step();
    const double lo = t_eval - r;
    const std::int64_t k_lo = g.cell_containing(lo);
    const std::int64_t k_hi = g.cell_containing(t_eval - 0.5 * h);
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double a = std::max(lo, g.cell_lo(k));
        const double b = std::min(t_eval, g.cell_hi(k));
        const double len = b - a;
        if (len <= 0.0) continue;
        const double w = kfn(0.5 * (a + b) - t_eval) * len * scale;
        add_mat_vec(mat, state.cell(k), w, out);
    }
}

double scalar_kernel_integral(const ScalarFn& kfn, const StateView& state, double t_eval,
                              double r) {
    const Grid& g = state.grid();
    const double h = g.step();
    const double lo = t_eval - r;
    const std::int64_t k_lo = g.cell_containing(lo);
    const std::int64_t k_hi = g.cell_containing(t_eval - 0.5 * h);
    double acc = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double a = std::max(lo, g.cell_lo(k));
        const double b = std::min(t_eval, g.cell_hi(k));
        const double len = b - a;
        if (len <= 0.0) continue;
        acc += kfn(0.5 * (a + b) - t_eval) * len * state.cell(k)[0];
    }
    return acc;
}

std::span<const double> input_at(const SampledFn& input, double t_eval) {
    return input.cell(input.grid().cell_containing(t_eval));
}

// f evaluated at an arbitrary time t_eval, reading state strictly before
// t_eval and the input cell containing t_eval.
void eval_at(const IdeSystem& sys, const StateView& state, const SampledFn& input,
             double t_eval, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);

    if (const auto* lin = std::get_if<LinearScalarDistributed>(&sys.rhs)) {
        const std::span<const double> w = input_at(input, t_eval);
        const double d = sys.m1 > 0 ? w[0] : 1.0;
        const double u = sys.m2 > 0 ? w[sys.m1] : 0.0;
        out[0] = d * scalar_kernel_integral(lin->q, state, t_eval, sys.r) + u;
        return;
    }

    if (const auto* pk = std::get_if<PointPlusKernel>(&sys.rhs)) {
        for (const auto& pt : pk->points) {
            const std::int64_t cell = state.grid().cell_containing(t_eval - pt.tau);
            add_mat_vec(pt.matrix, state.cell(cell), 1.0, out);
        }
        for (const auto& kt : pk->kernels) {
            add_kernel_integral(kt.fn, kt.matrix, 1.0, state, t_eval, sys.r, out);
        }
        if (!pk->input_matrix.empty() && sys.m2 > 0) {
            const std::span<const double> w = input_at(input, t_eval);
            const int n = pk->n;
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < sys.m2; ++j) {
                    acc += pk->input_matrix[i * sys.m2 + j] * w[sys.m1 + j];
                }
                out[i] += acc;
            }
        }
        return;
    }

    if (const auto* conv = std::get_if<ConvertedHyperbolic>(&sys.rhs)) {
        const HyperbolicSystem& pde = *conv->pde;
        const Grid& g = state.grid();
        const std::int64_t k = g.index_of(t_eval);
        const std::int64_t K = std::llround(sys.r / g.step());
        std::vector<double> profile(static_cast<std::size_t>(K), 0.0);
        reconstruct_profile(pde, state, k, profile);
        const double dz = pde.c * g.step();
        const std::span<const double> w = input_at(input, t_eval);
        const int N = pde.n_channels();
        for (int i = 0; i < N; ++i) {
            out[i] = apply_functional(pde.K_fns[i], pde, profile, dz, w);
        }
        out[N] = apply_functional(pde.G_fn, pde, profile, dz, w);
        return;
    }

    const auto& ext = std::get<ExternalRhs>(sys.rhs);
    HistoryView view(state, t_eval, sys.r);
    ext.eval(view, input_at(input, t_eval), out);
}

} // namespace

double IdeSystem::d_sup() const {
    return m1 > 0 ? d_comp_bound * std::sqrt(static_cast<double>(m1)) : 0.0;
}

std::span<const double> HistoryView::value(double s) const {
    if (s < -r_ || s >= 0.0) throw domain_error("HistoryView: offset outside [-r, 0)");
    return state_.cell(state_.grid().cell_containing(t_eval_ + s));
}

bool commit_reads_self(const IdeSystem& sys) {
    return !std::holds_alternative<ConvertedHyperbolic>(sys.rhs);
}

void eval_commit(const IdeSystem& sys, const StateView& state, const SampledFn& input,
                 std::int64_t k, std::span<double> out) {
    const double h = state.grid().step();
    const double t_eval =
        commit_reads_self(sys) ? state.grid().cell_lo(k) + 0.5 * h : state.grid().cell_lo(k);
    eval_at(sys, state, input, t_eval, out);
}

std::vector<double> eval_rhs(const IdeSystem& sys, const SampledFn& history,
                             const SampledFn& input) {
    if (!history.grid().same_step(input.grid())) {
        throw alignment_error("eval_rhs: history and input must share the grid step");
    }
    const double span = history.grid().t_end() - history.grid().t_start();
    if (span + 0.5 * history.grid().step() < sys.r) {
        throw domain_error("eval_rhs: history shorter than the delay horizon r");
    }
    if (history.dim() != sys.n) throw domain_error("eval_rhs: history dimension mismatch");
    if (input.dim() != sys.input_dim() && sys.input_dim() > 0) {
        throw domain_error("eval_rhs: input dimension mismatch");
    }
    const double t_eval = history.grid().t_end();
    if (input.grid().t_end() < t_eval + 0.5 * input.grid().step()) {
        throw domain_error("eval_rhs: input must cover the current cell (w(t))");
    }
    std::vector<double> out(sys.n, 0.0);
    eval_at(sys, history, input, t_eval, out);
    for (double v : out) {
        if (!std::isfinite(v)) throw data_error("eval_rhs: non-finite result");
    }
    return out;
}

Moduli compute_moduli(const RhsDescriptor& desc, double r, int m2) {
    Moduli m;
    m.audited = true;

    if (const auto* lin = std::get_if<LinearScalarDistributed>(&desc)) {
        // Split the kernel integral at -h: the recent part is bounded by
        // sup|q| * h, the tail by int|q|. Hence N = sup|q|, M = int|q|,
        // a(R) = (int|q| + 1) R with the additive input folded in.
        const double q_sup = lin->q.abs_bound(-r, 0.0);
        const double q_int = lin->q.abs_integral_bound(-r, 0.0);
        m.N = [q_sup](double) { return q_sup; };
        m.M = [q_int](double) { return q_int; };
        m.a = [q_int](double R) { return std::max(R, (q_int + 1.0) * R); };
        m.b = [q_int](double s) { return std::max(s, (q_int + 1.0) * s); };
        m.has_b = true;
        return m;
    }

    if (const auto* pk = std::get_if<PointPlusKernel>(&desc)) {
        double n_const = 0.0;
        double m_const = 0.0;
        for (const auto& pt : pk->points) {
            const double lip = frobenius(pt.matrix);
            m_const += lip;
            if (pt.tau < r) n_const += lip / pt.tau; // reads can fall in the recent window
        }
        for (const auto& kt : pk->kernels) {
            const double bmat = frobenius(kt.matrix);
            n_const += kt.fn.abs_bound(-r, 0.0) * bmat;
            m_const += kt.fn.abs_integral_bound(-r, 0.0) * bmat;
        }
        double e_norm = frobenius(pk->input_matrix);
        m.N = [n_const](double) { return n_const; };
        m.M = [m_const](double) { return m_const; };
        m.a = [m_const, e_norm](double R) { return std::max(R, (m_const + e_norm) * R); };
        m.b = [m_const, e_norm](double s) { return std::max(s, (m_const + e_norm) * s); };
        m.has_b = true;
        (void)m2;
        return m;
    }

    if (const auto* conv = std::get_if<ConvertedHyperbolic>(&desc)) {
        // Closed forms through the reconstruction operators: profile bound
        // K(R), reaction bound M~(R), source bound C, and the two
        // characteristic-weight constants B1, B2.
        const HyperbolicSystem pde = *conv->pde; // copy small struct into closures
        const double c = pde.c;
        const double C = pde.g_sup_norm();
        const double L = pde.functional_lip();
        const double sig = pde.sigma_coef();
        const double La = pde.a_fn.lip_in_p();
        auto Mtil = [pde](double R) { return pde.a_fn.abs_bound(R); };
        auto Kof = [c, C, Mtil](double R) {
            return (1.0 + C / c) * std::exp(Mtil(R) / c) * R;
        };
        m.N = [c, L, C, La, Mtil](double R) {
            const double B1 = std::exp(Mtil(R) / c);
            const double B2 = (R * La + C + C * R * La / c) * std::exp(3.0 * Mtil(R) / c);
            return c * L * B1 + 2.0 * L * B2;
        };
        m.M = [c, L, C, La, Mtil](double R) {
            const double B1 = std::exp(Mtil(R) / c);
            const double B2 = (R * La + C + C * R * La / c) * std::exp(3.0 * Mtil(R) / c);
            return L * (B1 + B2 / c);
        };
        m.a = [sig, Kof](double R) { return std::max(R, sig * Kof(R)); };
        const double bc = pde.b_coef();
        m.b = [bc, Kof](double s) { return std::max(s, bc * Kof(s)); };
        m.has_b = true;
        return m;
    }

    throw domain_error("compute_moduli: external descriptors carry caller moduli");
}

IdeSystem make_linear_scalar_distributed(ScalarFn q, double r) {
    IdeSystem sys;
    sys.n = 1;
    sys.r = r;
    sys.m1 = 1; // d in [-1, 1]
    sys.m2 = 1; // scalar u
    sys.d_comp_bound = 1.0;
    sys.rhs = LinearScalarDistributed{std::move(q)};
    sys.moduli = compute_moduli(sys.rhs, r, sys.m2);
    return sys;
}

IdeSystem make_point_plus_kernel(PointPlusKernel desc, double r) {
    for (const auto& pt : desc.points) {
        if (!(pt.tau > 0.0) || pt.tau > r) {
            throw validation_error("point delay tau must lie in (0, r]");
        }
        if (pt.matrix.size() != static_cast<std::size_t>(desc.n) * desc.n) {
            throw validation_error("point term matrix must be n x n");
        }
    }
    for (const auto& kt : desc.kernels) {
        if (kt.matrix.size() != static_cast<std::size_t>(desc.n) * desc.n) {
            throw validation_error("kernel term matrix must be n x n");
        }
    }
    IdeSystem sys;
    sys.n = desc.n;
    sys.r = r;
    sys.m1 = 0;
    sys.m2 = desc.input_matrix.empty()
                 ? 0
                 : static_cast<int>(desc.input_matrix.size() / desc.n);
    sys.rhs = std::move(desc);
    sys.moduli = compute_moduli(sys.rhs, r, sys.m2);
    return sys;
}

IdeSystem make_external(ExternalRhs rhs, double r, int m1, int m2, Moduli moduli) {
    IdeSystem sys;
    sys.n = rhs.n;
    sys.r = r;
    sys.m1 = m1;
    sys.m2 = m2;
    sys.rhs = std::move(rhs);
    sys.moduli = std::move(moduli);
    sys.moduli.audited = false;
    return sys;
}

} // namespace idel
