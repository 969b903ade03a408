#include "idel/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace idel {

namespace {
// Alignment slack relative to the step. Times in one computation are integer
// multiples of the step up to accumulated rounding, which stays far below this.
constexpr double kAlignTol = 1e-6;
} // namespace

Grid::Grid(double step, std::int64_t first_cell, std::int64_t count)
    : step_(step), first_(first_cell), count_(count) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw domain_error("Grid: step must be positive and finite");
    }
    if (count < 0) {
        throw domain_error("Grid: negative cell count");
    }
}

Grid Grid::over(double t_start, double t_end, double step) {
    Grid probe(step, 0, 0);
    if (!probe.aligned(t_start) || !probe.aligned(t_end)) {
        throw alignment_error("Grid::over: interval ends are not step-aligned");
    }
    const std::int64_t first = probe.index_of(t_start);
    const std::int64_t last = probe.index_of(t_end);
    if (last < first) {
        throw domain_error("Grid::over: t_end < t_start");
    }
    return Grid(step, first, last - first);
}

std::int64_t Grid::cell_containing(double t) const {
    const double q = t / step_;
    const double r = std::round(q);
    if (std::abs(q - r) <= kAlignTol * std::max(1.0, std::abs(q))) {
        return static_cast<std::int64_t>(r);
    }
    return static_cast<std::int64_t>(std::floor(q));
}

bool Grid::aligned(double t) const {
    const double q = t / step_;
    return std::abs(q - std::round(q)) <= kAlignTol * std::max(1.0, std::abs(q));
}

std::int64_t Grid::index_of(double t) const {
    if (!aligned(t)) {
        throw alignment_error("time " + std::to_string(t) + " is not aligned to step " +
                              std::to_string(step_));
    }
    return static_cast<std::int64_t>(std::round(t / step_));
}

bool Grid::same_step(const Grid& other) const {
    return std::abs(step_ - other.step_) <= kAlignTol * step_;
}

SampledFn::SampledFn(Grid grid, int dim)
    : grid_(grid), dim_(dim), values_(static_cast<std::size_t>(grid.count()) * dim, 0.0) {
    if (dim < 1) throw domain_error("SampledFn: dimension must be >= 1");
}

SampledFn::SampledFn(Grid grid, int dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
    if (dim < 1) throw domain_error("SampledFn: dimension must be >= 1");
    if (values_.size() != static_cast<std::size_t>(grid_.count()) * dim_) {
        throw domain_error("SampledFn: value array does not match grid.count * dim");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw data_error("SampledFn: non-finite cell value");
    }
}

SampledFn SampledFn::constant(const Grid& grid, std::span<const double> value) {
    std::vector<double> vals(static_cast<std::size_t>(grid.count()) * value.size());
    for (std::int64_t k = 0; k < grid.count(); ++k) {
        std::copy(value.begin(), value.end(), vals.begin() + k * value.size());
    }
    return SampledFn(grid, static_cast<int>(value.size()), std::move(vals));
}

SampledFn SampledFn::constant(const Grid& grid, double value) {
    return constant(grid, std::span<const double>(&value, 1));
}

SampledFn SampledFn::sample(const Grid& grid, int dim,
                            const std::function<void(double, std::span<double>)>& f) {
    std::vector<double> vals(static_cast<std::size_t>(grid.count()) * dim, 0.0);
    for (std::int64_t k = 0; k < grid.count(); ++k) {
        std::span<double> out(vals.data() + k * dim, dim);
        f(grid.cell_mid(grid.first_cell() + k), out);
    }
    return SampledFn(grid, dim, std::move(vals));
}

SampledFn SampledFn::sample_scalar(const Grid& grid, const std::function<double(double)>& f) {
    return sample(grid, 1, [&](double t, std::span<double> out) { out[0] = f(t); });
}

std::span<const double> SampledFn::cell(std::int64_t global_index) const {
    if (!grid_.contains_cell(global_index)) {
        throw domain_error("SampledFn::cell: index outside domain");
    }
    return cell_local(global_index - grid_.first_cell());
}

std::span<const double> SampledFn::cell_local(std::int64_t local_index) const {
    return std::span<const double>(values_.data() + local_index * dim_, dim_);
}

double SampledFn::scalar_cell(std::int64_t global_index) const {
    if (dim_ != 1) throw domain_error("SampledFn::scalar_cell on non-scalar function");
    return cell(global_index)[0];
}

double SampledFn::sup_norm() const {
    double best = 0.0;
    for (std::int64_t k = 0; k < grid_.count(); ++k) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) {
            const double v = values_[k * dim_ + j];
            s += v * v;
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

std::vector<double> SampledFn::integrate(double a, double b) const {
    if (b < a) throw domain_error("integrate: b < a");
    if (a < grid_.t_start() - kAlignTol * grid_.step() ||
        b > grid_.t_end() + kAlignTol * grid_.step()) {
        throw domain_error("integrate: limits outside the function domain");
    }
    std::vector<double> acc(dim_, 0.0);
    if (b <= a) return acc;
    // iterate every cell touching [a, b]; zero-length overlaps drop out below
    const std::int64_t ka = std::max(grid_.cell_containing(a), grid_.first_cell());
    const std::int64_t kb = std::min(grid_.cell_containing(b),
                                     grid_.first_cell() + grid_.count() - 1);
    for (std::int64_t k = ka; k <= kb; ++k) {
        const double lo = std::max(a, grid_.cell_lo(k));
        const double hi = std::min(b, grid_.cell_hi(k));
        const double len = hi - lo;
        if (len <= 0) continue;
        const std::span<const double> v = cell(k);
        for (int j = 0; j < dim_; ++j) acc[j] += v[j] * len;
    }
    return acc;
}

double SampledFn::integrate_scalar(double a, double b) const {
    if (dim_ != 1) throw domain_error("integrate_scalar on non-scalar function");
    return integrate(a, b)[0];
}

SampledFn SampledFn::window(double a, double b) const {
    if (!grid_.aligned(a) || !grid_.aligned(b)) {
        throw alignment_error("window: bounds must be cell-aligned");
    }
    const std::int64_t ka = grid_.index_of(a);
    const std::int64_t kb = grid_.index_of(b);
    if (ka < grid_.first_cell() || kb > grid_.first_cell() + grid_.count() || kb < ka) {
        throw domain_error("window: range outside the function domain");
    }
    std::vector<double> vals(values_.begin() + (ka - grid_.first_cell()) * dim_,
                             values_.begin() + (kb - grid_.first_cell()) * dim_);
    return SampledFn(Grid(grid_.step(), ka, kb - ka), dim_, std::move(vals));
}

SampledFn SampledFn::shifted(double dt) const {
    if (!grid_.aligned(dt)) throw alignment_error("shifted: offset must be cell-aligned");
    const std::int64_t dk = grid_.index_of(dt);
    return SampledFn(Grid(grid_.step(), grid_.first_cell() + dk, grid_.count()), dim_, values_);
}

SampledFn SampledFn::append(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != dim_) throw domain_error("append: dimension mismatch");
    for (double x : v) {
        if (!std::isfinite(x)) throw data_error("append: non-finite value");
    }
    std::vector<double> vals(values_);
    vals.insert(vals.end(), v.begin(), v.end());
    return SampledFn(Grid(grid_.step(), grid_.first_cell(), grid_.count() + 1), dim_,
                     std::move(vals));
}

SampledFn SampledFn::append(double v) const { return append(std::span<const double>(&v, 1)); }

SampledFn SampledFn::refined(int factor) const {
    if (factor < 1) throw domain_error("refined: factor must be >= 1");
    std::vector<double> vals(values_.size() * factor);
    for (std::int64_t k = 0; k < grid_.count(); ++k) {
        for (int s = 0; s < factor; ++s) {
            std::copy(values_.begin() + k * dim_, values_.begin() + (k + 1) * dim_,
                      vals.begin() + (k * factor + s) * dim_);
        }
    }
    return SampledFn(Grid(grid_.step() / factor, grid_.first_cell() * factor,
                          grid_.count() * factor),
                     dim_, std::move(vals));
}

double SampledFn::sup_diff(const SampledFn& other) const {
    if (!(grid_ == other.grid_) || dim_ != other.dim_) {
        throw domain_error("sup_diff: functions live on different grids");
    }
    double best = 0.0;
    for (std::int64_t k = 0; k < grid_.count(); ++k) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) {
            const double d = values_[k * dim_ + j] - other.values_[k * dim_ + j];
            s += d * d;
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

std::string SampledFn::to_csv() const {
    std::string out = "t_lo,t_hi";
    for (int j = 1; j <= dim_; ++j) out += ",v_" + std::to_string(j);
    out += "\n";
    char buf[64];
    for (std::int64_t k = 0; k < grid_.count(); ++k) {
        const std::int64_t g = grid_.first_cell() + k;
        std::snprintf(buf, sizeof buf, "%.17g", grid_.cell_lo(g));
        out += buf;
        std::snprintf(buf, sizeof buf, ",%.17g", grid_.cell_hi(g));
        out += buf;
        for (int j = 0; j < dim_; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", values_[k * dim_ + j]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

void SampledFn::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw domain_error("cannot open " + path + " for writing");
    f << to_csv();
}

} // namespace idel
