#pragma once

#include <memory>

#include "idel/feedback.hpp"
#include "idel/functionals.hpp"
#include "idel/hyperbolic.hpp"
#include "idel/rng.hpp"

namespace idel::testing {

// x(t) = d(t) int_{-1}^0 q x(t+s) ds + u(t) with constant q
inline IdeSystem example_linear_distributed(double q = 0.5, double r = 1.0) {
    return make_linear_scalar_distributed(ScalarFn::constant(q), r);
}

// x_t + x_z = g d(t) int_0^1 x dz, x(t,0) = 0, |d| <= 1
inline std::shared_ptr<HyperbolicSystem> example_distributed_recirculation(double g) {
    auto sys = std::make_shared<HyperbolicSystem>();
    sys->c = 1.0;
    sys->a_fn = CoefficientA{ScalarFn::constant(0.0), {0.0}};
    sys->g_fns = {ScalarFn::constant(g)};
    sys->K_fns = {BoundaryFunctional::weighted_integral(ScalarFn::constant(1.0), true)};
    sys->G_fn = BoundaryFunctional::zero();
    sys->m1 = 1;
    sys->m2 = 0;
    sys->d_bound = 1.0;
    return sys;
}

// the recirculation closure (4.3) as a point-plus-kernel system on (p, v)
inline IdeSystem recirculation_closure(double g) {
    PointPlusKernel desc;
    desc.n = 2;
    desc.points = {{1.0, {0.0, 1.0, 0.0, 0.0}}};
    desc.kernels = {{ScalarFn::constant(g), {1.0, 0.0, 0.0, 0.0}}};
    desc.input_matrix = {0.0, 1.0};
    return make_point_plus_kernel(std::move(desc), 1.0);
}

inline SampledFn random_history(SplitMix64& rng, const Grid& g, int dim, double scale) {
    std::vector<double> vals(static_cast<std::size_t>(g.count()) * dim);
    for (double& v : vals) v = rng.next_in(-scale, scale);
    return SampledFn(g, dim, std::move(vals));
}

inline SampledFn constant_input(const Grid& hist, int dim, std::span<const double> w) {
    const Grid g(hist.step(), hist.first_cell(), hist.count() + 1);
    SampledFn out = SampledFn::constant(g, w);
    (void)dim;
    return out;
}

// sup of |x - y| over the cells intersecting [t_end - b, t_end - a)
inline double window_sup_diff(const SampledFn& x, const SampledFn& y, double a, double b) {
    const Grid& g = x.grid();
    const double t_end = g.t_end();
    double best = 0.0;
    for (std::int64_t k = g.first_cell(); k < g.first_cell() + g.count(); ++k) {
        const double lo = g.cell_lo(k) - t_end;
        const double hi = g.cell_hi(k) - t_end;
        if (hi <= -b || lo >= -a) continue;
        double d2 = 0.0;
        for (int j = 0; j < x.dim(); ++j) {
            const double d = x.cell(k)[j] - y.cell(k)[j];
            d2 += d * d;
        }
        best = std::max(best, std::sqrt(d2));
    }
    return best;
}

inline double vec_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace idel::testing
