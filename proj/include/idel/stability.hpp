#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idel/functionals.hpp"
#include "idel/ide_solver.hpp"

namespace idel {

/// Input gain, continuous and nondecreasing with gamma(0) = 0.
struct GainFn {
    enum class Kind { Zero, Linear };
    Kind kind = Kind::Zero;
    double gain = 0.0;

    static GainFn zero() { return {}; }
    static GainFn linear(double gain) { return {Kind::Linear, gain}; }
    double operator()(double s) const { return kind == Kind::Zero ? 0.0 : gain * s; }
};

/// Witness for the Razumikhin inequality
///   W(f(x, d, u)) <= lambda sup_{-r<=s<0} W(x(s)) + gamma(|u|)
/// with W(x) = sum_j k_j |x_j| and the exponentially weighted functional
///   V(x) = sup_{-r<=s<0} exp(sigma s) W(x(s)),  sigma in (0, ln(1/lambda)/r).
struct IssCertificate {
    std::vector<double> weights;
    double lambda = 0.5;
    GainFn gamma;
    double sigma_rate = 0.0;

    double W(std::span<const double> x) const;
};

/// Build a certificate; sigma defaults to the midpoint of its admissible
/// interval, 0.5 * ln(1/lambda) / r.
IssCertificate make_certificate(std::vector<double> weights, double lambda, GainFn gamma,
                                double r, std::optional<double> sigma = std::nullopt);

struct RazumikhinReport {
    int samples = 0;
    int violations = 0;
    double worst_margin = 0.0;      // min over samples of rhs - lhs
    double effective_lambda = 0.0;  // max over samples of (lhs - gamma)/sup W
    std::string witness;            // description of the worst sample
    bool passed() const { return violations == 0; }
};

/// Monte Carlo falsification of the Razumikhin inequality: random histories
/// (plus adversarial spike/constant shapes), disturbances over the D box,
/// inputs over a magnitude ladder. A pass is evidence, not proof.
RazumikhinReport check_razumikhin(const IdeSystem& sys, const IssCertificate& cert,
                                  int samples, std::uint64_t seed, int history_cells = 64);

/// V(x) = max over cells of exp(sigma s_mid) W(cell value), s_mid relative to
/// the history's right end.
double lyapunov_V(const IssCertificate& cert, const SampledFn& history);

struct DecayReport {
    int trials = 0;
    int step_violations = 0;     // against V(x_{t+h*}) <= exp(-sigma h*) V(x_t) + gain
    int envelope_violations = 0; // against the global decay envelope
    double worst_excess = 0.0;
    double gain_factor = 0.0;    // (1-lambda)^{-1} (2 - lambda e^{sigma r})/(1 - lambda e^{sigma r})
    bool passed() const { return step_violations == 0 && envelope_violations == 0; }
};

/// Along simulated trajectories from random data, verify the one-step decay
/// V(x_{t+h*}) <= exp(-sigma h*) V(x_t) + (1-lambda)^{-1} gamma(sup|u|) at the
/// window h* = ln(1/lambda)/sigma - r, and the global envelope with its
/// inflated gain factor.
DecayReport decay_audit(const IdeSystem& sys, const IssCertificate& cert, int trials,
                        double horizon, std::uint64_t seed, int history_cells = 64,
                        double slack = 1e-8);

/// Robustness radius of the origin: delta(eps, T) = kappa^{-1}(eps/2) with
/// kappa the l-fold composition of 5 b(.), l = floor(T/rho) + 1,
/// rho = r / (1 + 2 r N(5 b(Q + eps))). Requires the b modulus.
double robust_equilibrium_delta(const IdeSystem& sys, double eps, double T);

} // namespace idel
