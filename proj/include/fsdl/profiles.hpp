#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fsdl/core_num.hpp"

namespace fsdl {

/// Named initial profiles. In 2D, cosine uses cos(k pi x) cos(k pi y) and
/// bump is radial around (center, center).
struct ProfileSpec {
    enum class Kind { Constant, Cosine, Bump, Helmholtz };

    Kind kind = Kind::Constant;
    double a = 0.0;  // constant value | mean | center
    double b = 0.0;  // amplitude | width
    double c = 0.0;  // modes | mass

    static ProfileSpec constant(double v) { return {Kind::Constant, v, 0.0, 0.0}; }
    static ProfileSpec cosine(double mean, double amp, double modes) { return {Kind::Cosine, mean, amp, modes}; }
    static ProfileSpec bump(double center, double width, double mass) { return {Kind::Bump, center, width, mass}; }
    /// Signal profile solving (I - Lap_h) c0 = n0, i.e. well-prepared data.
    static ProfileSpec helmholtz() { return {Kind::Helmholtz, 0.0, 0.0, 0.0}; }

    friend bool operator==(const ProfileSpec&, const ProfileSpec&) = default;
};

inline std::string to_string(const ProfileSpec& p) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    switch (p.kind) {
    case ProfileSpec::Kind::Constant: return "constant(" + num(p.a) + ")";
    case ProfileSpec::Kind::Cosine: return "cosine(" + num(p.a) + ", " + num(p.b) + ", " + num(p.c) + ")";
    case ProfileSpec::Kind::Bump: return "bump(" + num(p.a) + ", " + num(p.b) + ", " + num(p.c) + ")";
    case ProfileSpec::Kind::Helmholtz: return "helmholtz";
    }
    return "?";
}

namespace detail {
inline double raised_cosine(double r, double width) {
    return r < width ? 0.5 * (1.0 + std::cos(std::numbers::pi * r / width)) : 0.0;
}
}  // namespace detail

/// Samples a profile at cell centers. Bumps are normalized so that the
/// discrete mass h^d * sum equals the requested mass. `source` is needed
/// only for the Helmholtz profile.
template <class Grid>
Field<Grid> sample_profile(const ProfileSpec& spec, const Grid& grid, const Field<Grid>* source = nullptr) {
    using std::numbers::pi;
    switch (spec.kind) {
    case ProfileSpec::Kind::Constant: return Field<Grid>(grid, 1, spec.a);
    case ProfileSpec::Kind::Cosine:
        if constexpr (Grid::dim == 1) {
            return Field<Grid>::sample(grid, [&](double x) { return spec.a + spec.b * std::cos(spec.c * pi * x); });
        } else {
            return Field<Grid>::sample(grid, [&](double x, double y) {
                return spec.a + spec.b * std::cos(spec.c * pi * x) * std::cos(spec.c * pi * y);
            });
        }
    case ProfileSpec::Kind::Bump: {
        if (!(spec.b > 0.0)) throw ValidationError(Hypothesis::InitialData, "bump width must be positive");
        Field<Grid> f = [&] {
            if constexpr (Grid::dim == 1) {
                return Field<Grid>::sample(grid, [&](double x) { return detail::raised_cosine(std::abs(x - spec.a), spec.b); });
            } else {
                return Field<Grid>::sample(grid, [&](double x, double y) {
                    return detail::raised_cosine(std::hypot(x - spec.a, y - spec.a), spec.b);
                });
            }
        }();
        const double m = f.integral();
        if (!(m > 0.0)) throw ValidationError(Hypothesis::InitialData, "bump is narrower than one cell");
        f *= spec.c / m;
        return f;
    }
    case ProfileSpec::Kind::Helmholtz:
        if (!source) throw ValidationError(Hypothesis::InitialData, "helmholtz profile needs a density");
        return helmholtz_solve(*source);
    }
    throw ValidationError(Hypothesis::InitialData, "unknown profile");
}

}  // namespace fsdl
