#pragma once

#include <cmath>
#include <cstdlib>
#include <variant>
#include <vector>

#include "idel/errors.hpp"

namespace idel {

/// Closed-form scalar function of one variable: the kernel/coefficient
/// vocabulary for descriptors (constants, polynomials, alpha*exp(beta*x)+c).
/// Closed under everything the built-in systems need; each form knows an
/// upper bound for sup|f| and the exact integral of |f| matters only through
/// conservative bounds, so a numeric fallback is fine there.
class ScalarFn {
public:
    struct Constant {
        double value;
    };
    struct Poly {
        std::vector<double> coeffs; // c0 + c1 x + c2 x^2 + ...
    };
    struct ExpAffine {
        double alpha;
        double beta;
        double offset; // alpha * exp(beta x) + offset
    };

    ScalarFn() : form_(Constant{0.0}) {}
    explicit ScalarFn(Constant c) : form_(c) {}
    explicit ScalarFn(Poly p) : form_(std::move(p)) {}
    explicit ScalarFn(ExpAffine e) : form_(e) {}

    static ScalarFn constant(double v) { return ScalarFn(Constant{v}); }
    static ScalarFn poly(std::vector<double> coeffs) { return ScalarFn(Poly{std::move(coeffs)}); }
    static ScalarFn exp_affine(double alpha, double beta, double offset = 0.0) {
        return ScalarFn(ExpAffine{alpha, beta, offset});
    }

    double operator()(double x) const {
        if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
        if (const auto* p = std::get_if<Poly>(&form_)) {
            double acc = 0.0;
            for (std::size_t i = p->coeffs.size(); i-- > 0;) acc = acc * x + p->coeffs[i];
            return acc;
        }
        const auto& e = std::get<ExpAffine>(form_);
        return e.alpha * std::exp(e.beta * x) + e.offset;
    }

    /// Upper bound for sup_{x in [lo,hi]} |f(x)| (exact for constant and
    /// exp-affine, coefficient bound for polynomials).
    double abs_bound(double lo, double hi) const {
        if (const auto* c = std::get_if<Constant>(&form_)) return std::abs(c->value);
        if (const auto* p = std::get_if<Poly>(&form_)) {
            const double m = std::max(std::abs(lo), std::abs(hi));
            double acc = 0.0, pw = 1.0;
            for (double c : p->coeffs) {
                acc += std::abs(c) * pw;
                pw *= m;
            }
            return acc;
        }
        // exp-affine is monotone in x: extrema at the interval ends
        return std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
    }

    /// Upper bound for the integral of |f| over [lo, hi] (cell-midpoint sum
    /// with the bound form; used only inside nondecreasing moduli).
    double abs_integral_bound(double lo, double hi, int cells = 512) const {
        if (const auto* c = std::get_if<Constant>(&form_)) return std::abs(c->value) * (hi - lo);
        double acc = 0.0;
        const double w = (hi - lo) / cells;
        for (int i = 0; i < cells; ++i) {
            const double a = lo + i * w;
            acc += abs_bound(a, a + w) * w;
        }
        return acc;
    }

    bool is_constant() const { return std::holds_alternative<Constant>(form_); }
    bool is_zero() const {
        if (const auto* c = std::get_if<Constant>(&form_)) return c->value == 0.0;
        return false;
    }
    double constant_value() const { return std::get<Constant>(form_).value; }

    const std::variant<Constant, Poly, ExpAffine>& form() const { return form_; }

private:
    std::variant<Constant, Poly, ExpAffine> form_;
};

} // namespace idel
