#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fsdl/errors.hpp"
#include "fsdl/grid.hpp"

namespace fsdl {

/// Samples at cell centers of a grid. Vector fields store components
/// contiguously: component k occupies [k*cells, (k+1)*cells).
template <class Grid>
class Field {
public:
    explicit Field(const Grid& grid, int components = 1, double fill = 0.0)
        : grid_(grid), components_(components),
          values_(grid.cell_count() * static_cast<std::size_t>(components), fill) {
        if (components != 1 && components != 2) throw StructuralError("Field has 1 or 2 components");
    }

    Field(const Grid& grid, std::vector<double> values, int components = 1)
        : grid_(grid), components_(components), values_(std::move(values)) {
        if (components != 1 && components != 2) throw StructuralError("Field has 1 or 2 components");
        if (values_.size() != grid.cell_count() * static_cast<std::size_t>(components))
            throw StructuralError("Field length does not match grid");
    }

    template <class Fn>
    static Field sample(const Grid& grid, Fn&& fn) {
        Field f(grid);
        if constexpr (Grid::dim == 1) {
            for (std::size_t i = 0; i < grid.n_cells(); ++i) f[i] = fn(grid.center(i));
        } else {
            for (std::size_t j = 0; j < grid.ny(); ++j)
                for (std::size_t i = 0; i < grid.nx(); ++i)
                    f[grid.index(i, j)] = fn(grid.center_x(i), grid.center_y(j));
        }
        return f;
    }

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return components_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t cells() const noexcept { return grid_.cell_count(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> component(int k) { return std::span<double>(values_).subspan(k * cells(), cells()); }
    std::span<const double> component(int k) const {
        return std::span<const double>(values_).subspan(k * cells(), cells());
    }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }
    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }
    /// h^d * sum of samples (scalar fields).
    double integral() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s * grid_.cell_volume();
    }

    Field& operator+=(const Field& o) {
        check_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        check_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

    void check_same(const Field& o) const {
        if (!(grid_ == o.grid_) || components_ != o.components_)
            throw StructuralError("field shapes differ");
    }

    friend bool operator==(const Field& a, const Field& b) {
        return a.grid_ == b.grid_ && a.components_ == b.components_ && a.values_ == b.values_;
    }

private:
    Grid grid_;
    int components_;
    std::vector<double> values_;
};

using Field1D = Field<Grid1D>;
using Field2D = Field<Grid2D>;

/// (1-w)*a + w*b
template <class Grid>
Field<Grid> lerp(const Field<Grid>& a, const Field<Grid>& b, double w) {
    a.check_same(b);
    Field<Grid> out = a;
    auto o = out.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = (1.0 - w) * o[i] + w * bv[i];
    return out;
}

}  // namespace fsdl
