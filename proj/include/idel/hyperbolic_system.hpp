#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "idel/grid.hpp"
#include "idel/scalar_fn.hpp"

namespace idel {

/// Reaction coefficient a(p, z) = base(z) + <p_coeffs, p>, locally Lipschitz
/// in p with constant |p_coeffs| and continuous in z.
struct CoefficientA {
    ScalarFn base;                 // z-dependence
    std::vector<double> p_coeffs;  // one per p-channel; empty or zeros = p-independent

    double operator()(std::span<const double> p, double z) const {
        double v = base(z);
        for (std::size_t i = 0; i < p_coeffs.size() && i < p.size(); ++i) v += p_coeffs[i] * p[i];
        return v;
    }
    bool is_zero() const {
        if (!base.is_zero()) return false;
        for (double c : p_coeffs)
            if (c != 0.0) return false;
        return true;
    }
    double lip_in_p() const {
        double s = 0.0;
        for (double c : p_coeffs) s += c * c;
        return std::sqrt(s);
    }
    /// Upper bound of |a(p,z)| over z in [0,1], |p| <= R.
    double abs_bound(double R) const { return base.abs_bound(0.0, 1.0) + lip_in_p() * R; }
};

/// Boundary/coupling functional K_i(w, x) or G(w, x) acting on a profile
/// x in L^inf((0,1]) and the current input w = (d, u).
struct BoundaryFunctional {
    enum class Kind {
        Zero,
        PointEvalEnd,      // scale * x(1)
        WeightedIntegral,  // scale * int_0^1 weight(z) x(z) dz
        InputU,            // scale * u[u_index]
    };

    Kind kind = Kind::Zero;
    double scale = 1.0;
    ScalarFn weight;     // WeightedIntegral only
    bool times_d = false; // multiply by d[d_index] (disturbance-modulated functional)
    int d_index = 0;
    int u_index = 0;

    static BoundaryFunctional zero() { return {}; }
    static BoundaryFunctional point_eval_end(double scale = 1.0) {
        BoundaryFunctional f;
        f.kind = Kind::PointEvalEnd;
        f.scale = scale;
        return f;
    }
    static BoundaryFunctional weighted_integral(ScalarFn w, bool times_d = false,
                                                double scale = 1.0) {
        BoundaryFunctional f;
        f.kind = Kind::WeightedIntegral;
        f.weight = std::move(w);
        f.times_d = times_d;
        f.scale = scale;
        return f;
    }
    static BoundaryFunctional input_u(int u_index = 0, double scale = 1.0) {
        BoundaryFunctional f;
        f.kind = Kind::InputU;
        f.u_index = u_index;
        f.scale = scale;
        return f;
    }
};

/// The single first-order hyperbolic system
///   x_t + c x_z = a(p(t), z) x + <g(z), p(t)>,  p_i(t) = K_i(w(t), x_t),
///   x(t, 0) = G(w(t), x_t)
/// with w = (d, u), d in a box of radius d_bound (dim m1), u free (dim m2).
struct HyperbolicSystem {
    double c = 1.0;
    CoefficientA a_fn;
    std::vector<ScalarFn> g_fns;            // size N
    std::vector<BoundaryFunctional> K_fns;  // size N
    BoundaryFunctional G_fn;
    int m1 = 0;
    int m2 = 0;
    double d_bound = 1.0;

    int n_channels() const { return static_cast<int>(K_fns.size()); }
    double delay() const { return 1.0 / c; }

    // Moduli of the functional pack: split-Lipschitz constant and the bound
    // modulus sigma(R) = sigma_coef * R (linear built-in functionals).
    double functional_lip() const;
    double sigma_coef() const;
    // |G| + sum|K_i| <= b_coef * max(|u|, sup|x|); holds for every built-in
    // form (all vanish at (x, u) = 0 uniformly in d).
    double b_coef() const;

    double g_sup_norm() const; // C = max_z |g(z)| (Euclidean across channels)
};

/// Profile reconstruction from a (p, v) closure history: fills one value per
/// z-cell (z sampled at cell midpoints, unit-CFL grid: dz = c * h).
/// `state` must hold the (p_1..p_N, v) trajectory; the profile at time
/// t = cell_lo(eval_cell) reads state cells strictly before eval_cell.
class StateView;
void reconstruct_profile(const HyperbolicSystem& sys, const StateView& state,
                         std::int64_t eval_cell, std::span<double> profile_out);

/// Apply one boundary functional to a reconstructed profile (cells of width
/// dz = c * h over (0,1], weights sampled at cell midpoints).
double apply_functional(const BoundaryFunctional& f, const HyperbolicSystem& sys,
                        std::span<const double> profile, double dz,
                        std::span<const double> w_now);

} // namespace idel
