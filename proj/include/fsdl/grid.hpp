#pragma once

#include <cstddef>

#include "fsdl/errors.hpp"

namespace fsdl {

/// Uniform cell-centered mesh of (0,1).
class Grid1D {
public:
    static constexpr int dim = 1;

    explicit Grid1D(std::size_t n_cells) : n_(n_cells), h_(1.0 / static_cast<double>(n_cells)) {
        if (n_cells < 4) throw StructuralError("Grid1D needs at least 4 cells");
    }

    std::size_t n_cells() const noexcept { return n_; }
    std::size_t cell_count() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    double cell_volume() const noexcept { return h_; }
    double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h_; }

    friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept { return a.n_ == b.n_; }

private:
    std::size_t n_;
    double h_;
};

/// Uniform cell-centered mesh of the unit square; cell (i,j) is stored at j*nx + i.
class Grid2D {
public:
    static constexpr int dim = 2;

    Grid2D(std::size_t nx, std::size_t ny)
        : nx_(nx), ny_(ny), hx_(1.0 / static_cast<double>(nx)), hy_(1.0 / static_cast<double>(ny)) {
        if (nx < 8 || ny < 8) throw StructuralError("Grid2D needs at least 8 cells per axis");
    }

    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t cell_count() const noexcept { return nx_ * ny_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    double cell_volume() const noexcept { return hx_ * hy_; }
    double center_x(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * hx_; }
    double center_y(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * hy_; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }

    friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_;
    }

private:
    std::size_t nx_, ny_;
    double hx_, hy_;
};

}  // namespace fsdl
