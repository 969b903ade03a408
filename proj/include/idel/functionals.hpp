#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "idel/grid.hpp"
#include "idel/hyperbolic_system.hpp"
#include "idel/scalar_fn.hpp"

namespace idel {

/// Split-Lipschitz and boundedness moduli of an IDE right-hand side, carried
/// as explicit data:
///   |f(x,w) - f(y,w)| <= N(R) h sup_{[-h,0)} |x-y| + M(R) sup_{[-r,-h)} |x-y|
///   |f(x,w)| <= a(R),   and when b is present  |f(x,d,u)| <= b(max(||x||, sup|u|)).
/// a is normalized to a(t) >= t and b to b(s) >= s.
struct Moduli {
    std::function<double(double)> N;
    std::function<double(double)> M;
    std::function<double(double)> a;
    std::function<double(double)> b; // empty unless has_b
    bool has_b = false;
    bool audited = true; // false: caller-supplied, randomized audits are the safety net
};

/// Example 2.7: x(t) = d(t) * int_{-r}^{0} q(s) x(t+s) ds + u(t),
/// d in [-1, 1], u scalar.
struct LinearScalarDistributed {
    ScalarFn q;
};

/// Point delays plus distributed kernels, linear in the state:
///   f(x, u) = sum_i A_i x(t - tau_i) + sum_j int_{-r}^{0} k_j(s) B_j x(t+s) ds
///             + E u(t)
struct PointPlusKernel {
    struct PointTerm {
        double tau;                 // in (0, r], integer multiple of the grid step
        std::vector<double> matrix; // n*n row-major
    };
    struct KernelTerm {
        ScalarFn fn;                // kernel of s in [-r, 0]
        std::vector<double> matrix; // n*n row-major
    };
    int n = 1;
    std::vector<PointTerm> points;
    std::vector<KernelTerm> kernels;
    std::vector<double> input_matrix; // n*m2 row-major; empty = no input term
};

/// The closure functional F of a converted hyperbolic system: state (p, v),
/// F_i = K_i(w, A(p)v + B(p)), F_{N+1} = G(w, A(p)v + B(p)).
struct ConvertedHyperbolic {
    std::shared_ptr<const HyperbolicSystem> pde;
};

/// Non-owning view of a growing cell trajectory: what the evaluation engine
/// reads while the solver is still committing cells.
class StateView {
public:
    StateView(const Grid& grid, int dim, std::span<const double> values)
        : grid_(grid), dim_(dim), values_(values) {}
    StateView(const SampledFn& fn) // NOLINT: implicit by design
        : grid_(fn.grid()), dim_(fn.dim()), values_(fn.values()) {}

    const Grid& grid() const { return grid_; }
    int dim() const { return dim_; }
    std::span<const double> cell(std::int64_t global_index) const {
        return values_.subspan((global_index - grid_.first_cell()) * dim_, dim_);
    }

private:
    Grid grid_;
    int dim_;
    std::span<const double> values_;
};

/// Caller-supplied evaluator. Reads the history through a view; moduli are
/// the caller's and flagged unaudited.
class HistoryView {
public:
    HistoryView(const StateView& state, double t_eval, double r)
        : state_(state), t_eval_(t_eval), r_(r) {}
    /// State value at t_eval + s for s in [-r, 0).
    std::span<const double> value(double s) const;
    double delay() const { return r_; }
    int dim() const { return state_.dim(); }

private:
    StateView state_;
    double t_eval_;
    double r_;
};

struct ExternalRhs {
    int n = 1;
    std::function<void(const HistoryView&, std::span<const double>, std::span<double>)> eval;
};

using RhsDescriptor =
    std::variant<LinearScalarDistributed, PointPlusKernel, ConvertedHyperbolic, ExternalRhs>;

/// Description of x(t) = f(x_t, w_t): dimensions, delay horizon, input split
/// w = (d, u) with dim(d) = m1, dim(u) = m2, the functional and its moduli.
struct IdeSystem {
    int n = 1;
    double r = 1.0;
    int m1 = 0;
    int m2 = 0;
    double d_comp_bound = 0.0; // per-component bound of the compact box D
    RhsDescriptor rhs;
    Moduli moduli;

    int input_dim() const { return m1 + m2; }
    /// Q = max_{d in D} |d| for the box D = [-d_comp_bound, d_comp_bound]^m1.
    double d_sup() const;
};

/// Built-in constructors (moduli computed, not user-asserted).
IdeSystem make_linear_scalar_distributed(ScalarFn q, double r = 1.0);
IdeSystem make_point_plus_kernel(PointPlusKernel desc, double r);
IdeSystem make_external(ExternalRhs rhs, double r, int m1, int m2, Moduli moduli);

/// Moduli for a descriptor (the construction helpers call this; conversion of
/// hyperbolic systems computes the variant-(iii) closed forms).
Moduli compute_moduli(const RhsDescriptor& desc, double r, int m2);

/// The literal f(x_t, w_t): history covers [t-r, t) and input covers
/// [t-r, t] (the trailing input cell is w(t)). Grids must share the step and
/// the history must span exactly r.
std::vector<double> eval_rhs(const IdeSystem& sys, const SampledFn& history,
                             const SampledFn& input);

/// Commit-evaluation for cell k of `state`: the value the solver assigns to
/// [k h, (k+1) h). Distributed/external variants collocate at the cell
/// midpoint (the half-open window then covers the leading half of cell k,
/// read from the current iterate); converted-hyperbolic variants collocate at
/// the left edge so characteristic reads stay exact cell lookups.
void eval_commit(const IdeSystem& sys, const StateView& state, const SampledFn& input,
                 std::int64_t k, std::span<double> out);

/// True when the commit-evaluation for this descriptor reads cell k itself
/// (midpoint collocation); false when it is strictly causal.
bool commit_reads_self(const IdeSystem& sys);

} // namespace idel
