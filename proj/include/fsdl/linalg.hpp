#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fsdl/errors.hpp"

namespace fsdl {

/// Tridiagonal system. Row i reads sub[i]*y[i-1] + diag[i]*y[i] + sup[i]*y[i+1];
/// sub[0] and sup[n-1] are ignored.
struct Tridiag {
    std::vector<double> sub, diag, sup;

    explicit Tridiag(std::size_t n = 0) : sub(n, 0.0), diag(n, 0.0), sup(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    bool diagonally_dominant(bool strict = true) const {
        for (std::size_t i = 0; i < size(); ++i) {
            double off = (i > 0 ? std::abs(sub[i]) : 0.0) + (i + 1 < size() ? std::abs(sup[i]) : 0.0);
            double d = std::abs(diag[i]);
            if (strict ? !(d > off) : !(d >= off)) return false;
        }
        return true;
    }

    std::vector<double> multiply(std::span<const double> y) const {
        if (y.size() != size()) throw StructuralError("tridiagonal multiply: size mismatch");
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) {
            double s = diag[i] * y[i];
            if (i > 0) s += sub[i] * y[i - 1];
            if (i + 1 < size()) s += sup[i] * y[i + 1];
            out[i] = s;
        }
        return out;
    }
};

/// Thomas elimination.
inline std::vector<double> tridiag_solve(const Tridiag& sys, std::span<const double> rhs) {
    const std::size_t n = sys.size();
    if (rhs.size() != n || sys.sub.size() != n || sys.sup.size() != n)
        throw StructuralError("tridiagonal solve: dimension mismatch");
    if (n == 0) return {};
    std::vector<double> gamma(n), y(n);
    double beta = sys.diag[0];
    auto tiny = [](double pivot, double scale) { return std::abs(pivot) <= 1e-14 * scale; };
    if (tiny(beta, std::abs(sys.diag[0]) + std::abs(sys.sup[0])))
        throw SolverError("tridiagonal solve: singular pivot at row 0");
    y[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        gamma[i] = sys.sup[i - 1] / beta;
        beta = sys.diag[i] - sys.sub[i] * gamma[i];
        double scale = std::abs(sys.diag[i]) + std::abs(sys.sub[i]) + (i + 1 < n ? std::abs(sys.sup[i]) : 0.0);
        if (tiny(beta, scale))
            throw SolverError("tridiagonal solve: singular pivot at row " + std::to_string(i));
        y[i] = (rhs[i] - sys.sub[i] * y[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) y[i] -= gamma[i + 1] * y[i + 1];
    return y;
}

struct SolveStats {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

namespace detail {
inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }
}  // namespace detail

/// Conjugate gradients for a symmetric positive (semi)definite operator,
/// apply(x, y) writes y = A x. x holds the initial guess on entry.
/// Converged when ||b - A x|| <= rel_tol * ||b||.
template <class Apply>
SolveStats conjugate_gradient(Apply&& apply, std::span<const double> b, std::span<double> x,
                              double rel_tol, std::size_t max_iter) {
    const std::size_t n = b.size();
    SolveStats stats;
    const double bnorm = detail::norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }
    std::vector<double> r(n), p(n), ap(n);
    apply(std::span<const double>(x.data(), n), std::span<double>(ap));
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    double rr = detail::dot(r, r);
    const double target = rel_tol * bnorm;
    p = r;
    while (std::sqrt(rr) > target) {
        if (stats.iterations >= max_iter)
            throw SolverError("conjugate gradient did not converge, relative residual " +
                                  std::to_string(std::sqrt(rr) / bnorm),
                              std::sqrt(rr) / bnorm);
        apply(std::span<const double>(p), std::span<double>(ap));
        const double pap = detail::dot(p, ap);
        if (!(pap > 0.0))
            throw SolverError("conjugate gradient breakdown", std::sqrt(rr) / bnorm);
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = detail::dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++stats.iterations;
    }
    stats.relative_residual = std::sqrt(rr) / bnorm;
    return stats;
}

/// BiCGSTAB for nonsymmetric operators; same conventions as conjugate_gradient.
template <class Apply>
SolveStats bicgstab(Apply&& apply, std::span<const double> b, std::span<double> x, double rel_tol,
                    std::size_t max_iter) {
    const std::size_t n = b.size();
    SolveStats stats;
    const double bnorm = detail::norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }
    std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n);
    apply(std::span<const double>(x.data(), n), std::span<double>(v));
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - v[i];
    r0 = r;
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    const double target = rel_tol * bnorm;
    double rnorm = detail::norm2(r);
    while (rnorm > target) {
        if (stats.iterations >= max_iter)
            throw SolverError("BiCGSTAB did not converge, relative residual " +
                                  std::to_string(rnorm / bnorm),
                              rnorm / bnorm);
        const double rho_new = detail::dot(r0, r);
        if (rho_new == 0.0 || omega == 0.0) throw SolverError("BiCGSTAB breakdown", rnorm / bnorm);
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        apply(std::span<const double>(p), std::span<double>(v));
        alpha = rho / detail::dot(r0, v);
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (detail::norm2(s) <= target) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
            r = s;
            rnorm = detail::norm2(r);
            ++stats.iterations;
            break;
        }
        apply(std::span<const double>(s), std::span<double>(t));
        const double tt = detail::dot(t, t);
        omega = tt > 0.0 ? detail::dot(t, s) / tt : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rnorm = detail::norm2(r);
        ++stats.iterations;
    }
    stats.relative_residual = rnorm / bnorm;
    return stats;
}

}  // namespace fsdl
