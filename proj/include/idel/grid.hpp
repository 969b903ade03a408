#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "idel/errors.hpp"

namespace idel {

/// Uniform grid of half-open cells [k*step, (k+1)*step).
///
/// Cells are addressed by a global integer index so that every grid sharing
/// the same step interoperates exactly: windowing, appending and delay reads
/// are integer arithmetic, never floating-point comparisons against cell
/// edges. first_cell() may be negative (histories live on [-r, 0)).
class Grid {
public:
    Grid(double step, std::int64_t first_cell, std::int64_t count);

    /// Grid covering [t_start, t_end); both ends must be step-aligned.
    static Grid over(double t_start, double t_end, double step);

    double step() const { return step_; }
    std::int64_t first_cell() const { return first_; }
    std::int64_t count() const { return count_; }

    double t_start() const { return static_cast<double>(first_) * step_; }
    double t_end() const { return static_cast<double>(first_ + count_) * step_; }

    double cell_lo(std::int64_t k) const { return static_cast<double>(k) * step_; }
    double cell_hi(std::int64_t k) const { return static_cast<double>(k + 1) * step_; }
    double cell_mid(std::int64_t k) const { return (static_cast<double>(k) + 0.5) * step_; }

    /// Global index of the cell containing t (half-open convention).
    /// Times that are within alignment tolerance of a cell edge snap to it.
    std::int64_t cell_containing(double t) const;

    /// True when t is an integer multiple of step (within tolerance).
    bool aligned(double t) const;

    /// Global index for an aligned time; throws alignment_error otherwise.
    std::int64_t index_of(double t) const;

    bool contains_cell(std::int64_t k) const { return k >= first_ && k < first_ + count_; }

    bool same_step(const Grid& other) const;

    friend bool operator==(const Grid& a, const Grid& b) = default;

private:
    double step_;
    std::int64_t first_;
    std::int64_t count_;
};

/// Piecewise-constant function on a uniform grid with values in R^n.
///
/// The computational stand-in for an essentially bounded function: each cell
/// holds one vector, representing the a.e.-defined function constant on the
/// cell. Immutable after construction; mutating operations return new values.
class SampledFn {
public:
    SampledFn(Grid grid, int dim);
    SampledFn(Grid grid, int dim, std::vector<double> values);

    static SampledFn constant(const Grid& grid, std::span<const double> value);
    static SampledFn constant(const Grid& grid, double value);

    /// Sample a smooth function at cell midpoints (second-order representation).
    static SampledFn sample(const Grid& grid, int dim,
                            const std::function<void(double, std::span<double>)>& f);
    static SampledFn sample_scalar(const Grid& grid, const std::function<double(double)>& f);

    const Grid& grid() const { return grid_; }
    int dim() const { return dim_; }

    std::span<const double> cell(std::int64_t global_index) const;
    std::span<const double> cell_local(std::int64_t local_index) const;
    double scalar_cell(std::int64_t global_index) const;

    /// Value at time t (reads the containing cell).
    std::span<const double> at(double t) const { return cell(grid_.cell_containing(t)); }

    /// Max over cells of the Euclidean norm of the cell value.
    double sup_norm() const;

    /// Exact integral of the piecewise-constant function over [a, b].
    /// Partial cells contribute value * overlap length.
    std::vector<double> integrate(double a, double b) const;
    double integrate_scalar(double a, double b) const;

    /// Cell-aligned restriction to [a, b) (absolute indexing preserved).
    SampledFn window(double a, double b) const;

    /// Same values, grid shifted by an aligned offset dt.
    SampledFn shifted(double dt) const;

    /// One extra trailing cell valued v.
    SampledFn append(std::span<const double> v) const;
    SampledFn append(double v) const;

    /// The same function on a grid refined by an integer factor (each cell
    /// split into `factor` cells carrying the same value).
    SampledFn refined(int factor) const;

    /// max over cells of |this - other| (grids must coincide).
    double sup_diff(const SampledFn& other) const;

    std::span<const double> values() const { return values_; }

    /// CSV with header t_lo,t_hi,v_1..v_n at full double precision.
    void write_csv(const std::string& path) const;
    std::string to_csv() const;

private:
    Grid grid_;
    int dim_;
    std::vector<double> values_;
};

} // namespace idel
