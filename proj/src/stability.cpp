#include "idel/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "idel/rng.hpp"

namespace idel {

namespace {

double sup_W(const IssCertificate& cert, const SampledFn& history) {
    double best = 0.0;
    for (std::int64_t k = 0; k < history.grid().count(); ++k) {
        best = std::max(best, cert.W(history.cell_local(k)));
    }
    return best;
}

// Random or adversarial history with a given norm scale. Shapes stress the
// sup structure of the Razumikhin inequality: per-cell noise, constants
// (including single-channel constants, the sharpness witnesses), a single
// interior spike, a last-cell spike.
SampledFn draw_history(SplitMix64& rng, const Grid& g, int dim, double scale, int shape) {
    std::vector<double> vals(static_cast<std::size_t>(g.count()) * dim, 0.0);
    switch (shape) {
        case 1: { // constant vector
            std::vector<double> c(dim);
            for (int j = 0; j < dim; ++j) c[j] = scale * (rng.next_unit() < 0.5 ? -1.0 : 1.0);
            for (std::int64_t k = 0; k < g.count(); ++k) {
                for (int j = 0; j < dim; ++j) vals[k * dim + j] = c[j];
            }
            break;
        }
        case 2: { // single interior spike
            const std::int64_t at = static_cast<std::int64_t>(rng.next_unit() * g.count());
            for (int j = 0; j < dim; ++j) vals[at * dim + j] = rng.next_in(-scale, scale);
            break;
        }
        case 3: { // last-cell spike
            for (int j = 0; j < dim; ++j) {
                vals[(g.count() - 1) * dim + j] = rng.next_in(-scale, scale);
            }
            break;
        }
        case 4: { // constant in one channel, zero elsewhere
            const int ch = static_cast<int>(rng.next_unit() * dim);
            const double c = scale * (rng.next_unit() < 0.5 ? -1.0 : 1.0);
            for (std::int64_t k = 0; k < g.count(); ++k) vals[k * dim + ch] = c;
            break;
        }
        default: { // per-cell uniform noise
            for (double& v : vals) v = rng.next_in(-scale, scale);
            break;
        }
    }
    return SampledFn(g, dim, std::move(vals));
}

SampledFn constant_input(const Grid& hist_grid, int dim, std::span<const double> w) {
    const Grid g(hist_grid.step(), hist_grid.first_cell(), hist_grid.count() + 1);
    std::vector<double> vals(static_cast<std::size_t>(g.count()) * dim, 0.0);
    for (std::int64_t k = 0; k < g.count(); ++k) {
        std::copy(w.begin(), w.end(), vals.begin() + k * dim);
    }
    return SampledFn(g, dim, std::move(vals));
}

} // namespace

double IssCertificate::W(std::span<const double> x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += weights[j] * std::abs(x[j]);
    return acc;
}

IssCertificate make_certificate(std::vector<double> weights, double lambda, GainFn gamma,
                                double r, std::optional<double> sigma) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw certificate_error("certificate: lambda must lie in (0, 1)");
    }
    for (double w : weights) {
        if (!(w > 0.0)) throw certificate_error("certificate: weights must be positive");
    }
    const double sigma_max = std::log(1.0 / lambda) / r;
    IssCertificate cert;
    cert.weights = std::move(weights);
    cert.lambda = lambda;
    cert.gamma = gamma;
    cert.sigma_rate = sigma.value_or(0.5 * sigma_max);
    if (!(cert.sigma_rate > 0.0 && cert.sigma_rate < sigma_max)) {
        throw certificate_error("certificate: sigma must lie in (0, ln(1/lambda)/r)");
    }
    return cert;
}

RazumikhinReport check_razumikhin(const IdeSystem& sys, const IssCertificate& cert,
                                  int samples, std::uint64_t seed, int history_cells) {
    if (static_cast<int>(cert.weights.size()) != sys.n) {
        throw certificate_error("check_razumikhin: weight count must match the state dimension");
    }
    const double h = sys.r / history_cells;
    const Grid hg(h, -history_cells, history_cells);
    const int m = std::max(1, sys.input_dim());
    RazumikhinReport rep;
    rep.samples = samples;
    rep.worst_margin = std::numeric_limits<double>::infinity();

    for (int i = 0; i < samples; ++i) {
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        const double scale = std::pow(10.0, rng.next_in(-2.0, 1.0));
        const int shape = static_cast<int>(rng.next_unit() * 5.0);
        const SampledFn hist = draw_history(rng, hg, sys.n, scale, shape);

        std::vector<double> w(m, 0.0);
        for (int j = 0; j < sys.m1; ++j) {
            // disturbance ladder over the compact box, endpoints included
            const int pick = static_cast<int>(rng.next_unit() * 5.0);
            w[j] = sys.d_comp_bound * (-1.0 + 0.5 * pick);
        }
        double u_norm = 0.0;
        if (sys.m2 > 0) {
            const int pick = static_cast<int>(rng.next_unit() * 4.0);
            const double mag = (pick == 0) ? 0.0 : std::pow(10.0, pick - 2.0) * scale;
            for (int j = 0; j < sys.m2; ++j) {
                w[sys.m1 + j] = mag * (rng.next_unit() < 0.5 ? -1.0 : 1.0);
            }
            for (int j = 0; j < sys.m2; ++j) u_norm += w[sys.m1 + j] * w[sys.m1 + j];
            u_norm = std::sqrt(u_norm);
        }

        const SampledFn input = constant_input(hg, m, w);
        const std::vector<double> f = eval_rhs(sys, hist, input);
        const double lhs = cert.W(f);
        const double supw = sup_W(cert, hist);
        const double rhs = cert.lambda * supw + cert.gamma(u_norm);
        const double margin = rhs - lhs;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            char buf[128];
            std::snprintf(buf, sizeof buf, "sample %d: shape=%d scale=%.3g supW=%.6g W(f)=%.6g",
                          i, shape, scale, supw, lhs);
            rep.witness = buf;
        }
        if (supw > 0.0) {
            rep.effective_lambda =
                std::max(rep.effective_lambda, (lhs - cert.gamma(u_norm)) / supw);
        }
        if (lhs > rhs + 1e-9 * std::max(1.0, supw)) ++rep.violations;
    }
    return rep;
}

double lyapunov_V(const IssCertificate& cert, const SampledFn& history) {
    const Grid& g = history.grid();
    const double t_end = g.t_end();
    double best = 0.0;
    for (std::int64_t k = 0; k < g.count(); ++k) {
        const double s_mid = g.cell_mid(g.first_cell() + k) - t_end;
        best = std::max(best,
                        std::exp(cert.sigma_rate * s_mid) * cert.W(history.cell_local(k)));
    }
    return best;
}

DecayReport decay_audit(const IdeSystem& sys, const IssCertificate& cert, int trials,
                        double horizon, std::uint64_t seed, int history_cells, double slack) {
    const double h = sys.r / history_cells;
    const Grid hg(h, -history_cells, history_cells);
    const int m = std::max(1, sys.input_dim());

    DecayReport rep;
    rep.trials = trials;
    const double lam_esr = cert.lambda * std::exp(cert.sigma_rate * sys.r);
    rep.gain_factor = (1.0 / (1.0 - cert.lambda)) * (2.0 - lam_esr) / (1.0 - lam_esr);

    const double hstar_raw = std::log(1.0 / cert.lambda) / cert.sigma_rate - sys.r;
    const std::int64_t hstar_cells = std::max<std::int64_t>(1, std::llround(std::floor(hstar_raw / h)));
    const double hstar = static_cast<double>(hstar_cells) * h;

    SolveConfig cfg;
    cfg.horizon = horizon;

    for (int i = 0; i < trials; ++i) {
        SplitMix64 rng = SplitMix64::stream(seed, 0x5DECA500u + static_cast<std::uint64_t>(i));
        const double scale = std::pow(10.0, rng.next_in(-1.0, 0.5));
        const SampledFn x0 = draw_history(rng, hg, sys.n, scale, i % 5);

        const Grid ig(h, -history_cells, history_cells + std::llround(horizon / h));
        std::vector<double> wvals(static_cast<std::size_t>(ig.count()) * m, 0.0);
        double u_sup = 0.0;
        for (std::int64_t k = 0; k < ig.count(); ++k) {
            for (int j = 0; j < sys.m1; ++j) {
                wvals[k * m + j] = rng.next_in(-sys.d_comp_bound, sys.d_comp_bound);
            }
            double un = 0.0;
            for (int j = 0; j < sys.m2; ++j) {
                const double v = 0.3 * scale * rng.next_in(-1.0, 1.0);
                wvals[k * m + sys.m1 + j] = v;
                un += v * v;
            }
            u_sup = std::max(u_sup, std::sqrt(un));
        }
        const SampledFn input(ig, m, std::move(wvals));

        const Trajectory traj = solve(sys, x0, input, cfg);
        if (traj.escaped) {
            ++rep.envelope_violations;
            continue;
        }
        const double gain_term = cert.gamma(u_sup) / (1.0 - cert.lambda);
        const double V0 = lyapunov_V(cert, x0);

        double prev_V = V0;
        double prev_t = 0.0;
        for (double t = hstar; t <= horizon + 0.5 * h; t += hstar) {
            const SampledFn xt = traj.solution.window(t - sys.r, t);
            const double Vt = lyapunov_V(cert, xt);
            const double bound =
                std::exp(-cert.sigma_rate * (t - prev_t)) * prev_V + gain_term + slack;
            if (Vt > bound) {
                ++rep.step_violations;
                rep.worst_excess = std::max(rep.worst_excess, Vt - bound);
            }
            const double envelope =
                std::exp(-cert.sigma_rate * t) * V0 + rep.gain_factor * cert.gamma(u_sup) + slack;
            if (Vt > envelope) {
                ++rep.envelope_violations;
                rep.worst_excess = std::max(rep.worst_excess, Vt - envelope);
            }
            prev_V = Vt;
            prev_t = t;
        }
    }
    return rep;
}

double robust_equilibrium_delta(const IdeSystem& sys, double eps, double T) {
    if (!sys.moduli.has_b) {
        throw certificate_error("robust_equilibrium_delta: system lacks the b modulus");
    }
    const auto& b = sys.moduli.b;
    const double Q = sys.d_sup();
    const double rho = sys.r / (1.0 + 2.0 * sys.r * sys.moduli.N(5.0 * b(Q + eps)));
    const std::int64_t l = static_cast<std::int64_t>(std::floor(T / rho)) + 1;

    auto kappa = [&](double s) {
        double v = s;
        for (std::int64_t i = 0; i < l; ++i) v = 5.0 * b(v);
        return v;
    };

    const double target = 0.5 * eps;
    double lo = 0.0;
    double hi = target; // kappa(s) >= 5^l s >= s, so kappa^{-1}(target) <= target
    if (!(kappa(hi) >= target)) {
        throw certificate_error("robust_equilibrium_delta: b is not increasing enough to invert");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kappa(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    return lo;
}

} // namespace idel
