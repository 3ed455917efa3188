#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fsdl/core_num.hpp"

using namespace fsdl;
using std::numbers::pi;

namespace {

Field1D cosine1d(const Grid1D& g, double mean, double amp) {
    return Field1D::sample(g, [&](double x) { return mean + amp * std::cos(pi * x); });
}

double max_abs(const Field1D& f) { return lp_norm(f, kInf); }

}  // namespace

TEST(Grid, CellCentersAndWidths) {
    const Grid1D g(8);
    EXPECT_DOUBLE_EQ(g.h(), 0.125);
    EXPECT_DOUBLE_EQ(g.center(0), 0.0625);
    EXPECT_DOUBLE_EQ(g.center(7), 0.9375);
    EXPECT_NEAR(g.h() * static_cast<double>(g.n_cells()), 1.0, 1e-15);
    EXPECT_THROW(Grid1D(3), StructuralError);
    EXPECT_THROW(Grid2D(7, 8), StructuralError);
    const Grid2D g2(8, 16);
    EXPECT_DOUBLE_EQ(g2.hy(), 1.0 / 16.0);
    EXPECT_EQ(g2.index(3, 2), 2u * 8u + 3u);
}

TEST(Field, LengthMismatchIsStructural) {
    const Grid1D g(8);
    EXPECT_THROW(Field1D(g, std::vector<double>(7)), StructuralError);
    Field1D a(g), b(Grid1D(16));
    EXPECT_THROW(a += b, StructuralError);
}

TEST(Laplacian, AnnihilatesConstants) {
    for (std::size_t n : {4u, 9u, 64u}) {
        const Grid1D g(n);
        EXPECT_EQ(max_abs(laplacian_neumann(Field1D(g, 1, 3.0))), 0.0);
    }
    const Grid2D g2(8, 12);
    EXPECT_EQ(lp_norm(laplacian_neumann(Field2D(g2, 1, 3.0)), kInf), 0.0);
}

TEST(Laplacian, ImpulseStencil) {
    const Grid1D g(16);
    Field1D f(g);
    f[5] = 1.0;
    const Field1D L = laplacian_neumann(f);
    const double ih2 = 1.0 / (g.h() * g.h());
    for (std::size_t i = 0; i < 16; ++i) {
        const double expect = i == 5 ? -2.0 * ih2 : (i == 4 || i == 6) ? ih2 : 0.0;
        EXPECT_DOUBLE_EQ(L[i], expect) << i;
    }
}

TEST(Laplacian, MirroredGhostAtBoundary) {
    const Grid1D g(8);
    Field1D f(g);
    f[0] = 1.0;
    const Field1D L = laplacian_neumann(f);
    const double ih2 = 1.0 / (g.h() * g.h());
    EXPECT_DOUBLE_EQ(L[0], -ih2);  // ghost mirrors f_0
    EXPECT_DOUBLE_EQ(L[1], ih2);
}

TEST(Laplacian, CosineSecondOrder) {
    double prev = 0.0;
    for (std::size_t n : {64u, 128u, 256u, 512u}) {
        const Grid1D g(n);
        const Field1D L = laplacian_neumann(cosine1d(g, 0.0, 1.0));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(L[i] + pi * pi * std::cos(pi * g.center(i))));
        if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.2) << n;
        prev = err;
    }
}

TEST(Laplacian, GridMismatchAndVectorRejected) {
    const Grid1D g(8);
    EXPECT_THROW(laplacian_neumann(Field1D(g), Grid1D(16)), StructuralError);
    const Grid2D g2(8, 8);
    EXPECT_THROW(laplacian_neumann(Field2D(g2, 2)), StructuralError);
}

TEST(Tridiag, IdentityReturnsRhs) {
    Tridiag t(5);
    for (auto& d : t.diag) d = 1.0;
    const std::vector<double> r{1, -2, 3, 4.5, 0};
    EXPECT_EQ(tridiag_solve(t, r), r);
}

TEST(Tridiag, RecoversKnownVectorDirichletLaplacian) {
    const std::size_t n = 50;
    Tridiag t(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        t.sub[i] = -1.0;
        t.diag[i] = 2.0;
        t.sup[i] = -1.0;
        v[i] = std::sin(0.3 * static_cast<double>(i)) + 0.1 * static_cast<double>(i);
    }
    const auto rhs = t.multiply(v);
    const auto y = tridiag_solve(t, rhs);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], v[i], 1e-10);
}

TEST(Tridiag, RandomDominantResidual) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 200;
        Tridiag t(n);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            t.sub[i] = u(rng);
            t.sup[i] = u(rng);
            t.diag[i] = (std::abs(t.sub[i]) + std::abs(t.sup[i]) + 0.1 + std::abs(u(rng))) * (u(rng) < 0 ? -1 : 1);
            rhs[i] = 10.0 * u(rng);
        }
        ASSERT_TRUE(t.diagonally_dominant());
        const auto y = tridiag_solve(t, rhs);
        const auto back = t.multiply(y);
        double res = 0.0, rn = 0.0, yn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::abs(back[i] - rhs[i]));
            rn = std::max(rn, std::abs(rhs[i]));
            yn = std::max(yn, std::abs(y[i]));
        }
        EXPECT_LE(res, 1e-12 * (rn + yn));
    }
}

TEST(Tridiag, ZeroPivotIsSolverError) {
    Tridiag t(3);
    t.diag = {0.0, 1.0, 1.0};
    const std::vector<double> r{1, 1, 1};
    EXPECT_THROW(tridiag_solve(t, r), SolverError);
    EXPECT_THROW(tridiag_solve(t, std::vector<double>{1, 1}), StructuralError);
}

TEST(Tridiag, NeumannSystemsAreStrictlyDominant) {
    const Grid1D g(64);
    std::vector<double> extra(64, 0.5);
    EXPECT_TRUE(neumann_system(g, 1.0, 1.0).diagonally_dominant());
    EXPECT_TRUE(neumann_system(g, 1e3, 0.01, extra).diagonally_dominant());
}

TEST(Helmholtz, ConstantSourceGivesConstant) {
    const Grid1D g(32);
    const Field1D c = helmholtz_solve(Field1D(g, 1, 1.0));
    for (double v : c.values()) EXPECT_NEAR(v, 1.0, 1e-14);
    const Grid2D g2(16, 16);
    const Field2D c2 = helmholtz_solve(Field2D(g2, 1, 5.0));
    for (double v : c2.values()) EXPECT_NEAR(v, 5.0, 1e-12);
}

TEST(Helmholtz, CosineEigenfunctionSecondOrder) {
    // Oracle: (1 - d^2/dx^2)(1 + cos(pi x)/(1+pi^2)) = 1 + cos(pi x).
    double prev = 0.0;
    for (std::size_t n : {64u, 128u, 256u, 512u}) {
        const Grid1D g(n);
        const Field1D c = helmholtz_solve(cosine1d(g, 1.0, 1.0));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            err = std::max(err, std::abs(c[i] - (1.0 + std::cos(pi * g.center(i)) / (1.0 + pi * pi))));
        if (prev > 0.0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.2);
        prev = err;
    }
}

TEST(Helmholtz, TwoDimensionalEigenfunction) {
    const Grid2D g(64, 64);
    const Field2D src = Field2D::sample(g, [](double x, double y) { return 1.0 + std::cos(pi * x) * std::cos(pi * y); });
    const Field2D c = helmholtz_solve(src);
    double err = 0.0;
    for (std::size_t j = 0; j < 64; ++j)
        for (std::size_t i = 0; i < 64; ++i) {
            const double exact = 1.0 + std::cos(pi * g.center_x(i)) * std::cos(pi * g.center_y(j)) / (1.0 + 2.0 * pi * pi);
            err = std::max(err, std::abs(c[g.index(i, j)] - exact));
        }
    EXPECT_LT(err, 1e-4);
}

TEST(Helmholtz, IterationCapRaisesSolverErrorWithResidual) {
    const Grid2D g(32, 32);
    const Field2D src = Field2D::sample(g, [](double x, double y) { return std::exp(x * y) + std::cos(7 * x); });
    SolverControl ctl;
    ctl.max_iter = 2;
    try {
        helmholtz_solve(src, ctl);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_GT(e.residual(), 1e-10);
    }
}

TEST(Helmholtz, DiscreteMaximumPrinciple) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    const Grid1D g(100);
    for (int trial = 0; trial < 10; ++trial) {
        Field1D s(g);
        for (double& v : s.values()) v = u(rng);
        const Field1D c = helmholtz_solve(s);
        EXPECT_GE(c.min(), s.min() - 1e-13);
        EXPECT_LE(c.max(), s.max() + 1e-13);
    }
    const Grid2D g2(16, 16);
    Field2D s2(g2);
    for (double& v : s2.values()) v = u(rng);
    const Field2D c2 = helmholtz_solve(s2);
    EXPECT_GE(c2.min(), s2.min() - 1e-9);
    EXPECT_LE(c2.max(), s2.max() + 1e-9);
}

TEST(Helmholtz, ReflectionSymmetry) {
    const Grid1D g(64);
    const Field1D s = Field1D::sample(g, [](double x) { return std::exp(-40 * (x - 0.5) * (x - 0.5)) + x * (1 - x); });
    const Field1D c = helmholtz_solve(s);
    const Field1D L = laplacian_neumann(s);
    for (std::size_t i = 0; i < 32; ++i) {
        EXPECT_NEAR(c[i], c[63 - i], 1e-13);
        EXPECT_NEAR(L[i], L[63 - i], 1e-9);
    }
}

TEST(Norms, ZeroAndConstant) {
    const Grid1D g(100);
    const Norms z = norms(Field1D(g));
    EXPECT_EQ(z.l1, 0.0);
    EXPECT_EQ(z.l2, 0.0);
    EXPECT_EQ(z.linf, 0.0);
    EXPECT_EQ(z.h1_seminorm, 0.0);
    const Norms c = norms(Field1D(g, 1, 2.0));
    EXPECT_NEAR(c.l1, 2.0, 1e-13);
    EXPECT_NEAR(c.l2, 2.0, 1e-13);
    EXPECT_EQ(c.linf, 2.0);
    EXPECT_EQ(c.h1_seminorm, 0.0);
}

TEST(Norms, CosineL2AndSeminorm) {
    const Grid1D g(512);
    const Norms n = norms(cosine1d(g, 0.0, 1.0));
    EXPECT_NEAR(n.l2, std::sqrt(0.5), 1e-3);
    EXPECT_NEAR(n.h1_seminorm, pi * std::sqrt(0.5), 1e-2);
}

TEST(Norms, VectorFieldsUseMagnitude) {
    const Grid2D g(8, 8);
    Field2D v(g, 2);
    for (double& x : v.component(0)) x = 3.0;
    for (double& x : v.component(1)) x = 4.0;
    const Norms n = norms(v);
    EXPECT_NEAR(n.linf, 5.0, 1e-15);
    EXPECT_NEAR(n.l1, 5.0, 1e-13);
    EXPECT_NEAR(lp_norm(v, 3.0), 5.0, 1e-12);
}

TEST(Upwind, ZeroVelocityGivesZero) {
    const Grid1D g(8);
    const Field1D f = upwind_advective_divergence(cosine1d(g, 1.0, 0.5), Field1D(g), g);
    EXPECT_EQ(max_abs(f), 0.0);
}

TEST(Upwind, StepFunctionHandStencil) {
    // carrier = 1 on cells 0..3, 0 on 4..7; velocity +1 everywhere.
    const Grid1D g(8);
    Field1D q(g), v(g, 1, 1.0);
    for (std::size_t i = 0; i < 4; ++i) q[i] = 1.0;
    const Field1D d = upwind_advective_divergence(q, v, g);
    // Face flux F_k = q_{k-1} for interior faces (positive velocity), 0 at walls.
    std::vector<double> F(9, 0.0);
    for (std::size_t k = 1; k < 8; ++k) F[k] = q[k - 1];
    for (std::size_t i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(d[i], (F[i + 1] - F[i]) / g.h()) << i;
    EXPECT_DOUBLE_EQ(d[3], 0.0);
    EXPECT_DOUBLE_EQ(d[4], -8.0);
    EXPECT_DOUBLE_EQ(d[7], 0.0);
}

TEST(Upwind, ConservativeForRandomData) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Grid1D g(64);
    const Grid2D g2(16, 12);
    for (int trial = 0; trial < 10; ++trial) {
        Field1D q(g), v(g);
        for (std::size_t i = 0; i < 64; ++i) {
            q[i] = std::abs(u(rng));
            v[i] = u(rng);
        }
        EXPECT_NEAR(upwind_advective_divergence(q, v, g).integral(), 0.0, 1e-12);
        Field2D q2(g2), v2(g2, 2);
        for (double& x : q2.values()) x = std::abs(u(rng));
        for (double& x : v2.values()) x = u(rng);
        EXPECT_NEAR(upwind_advective_divergence(q2, v2, g2).integral(), 0.0, 1e-12);
    }
}

TEST(Upwind, DivergenceFreeVelocityConstantCarrier) {
    const Grid2D g(16, 16);
    FaceField2D w(g);
    // discrete curl of a corner streamfunction is exactly solenoidal
    auto psi = [&](std::size_t i, std::size_t j) {
        const double x = static_cast<double>(i) * g.hx(), y = static_cast<double>(j) * g.hy();
        return std::sin(pi * x) * std::sin(pi * y) * x;
    };
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t i = 1; i < 16; ++i) w.x[w.xi(i, j)] = (psi(i, j + 1) - psi(i, j)) / g.hy();
    for (std::size_t j = 1; j < 16; ++j)
        for (std::size_t i = 0; i < 16; ++i) w.y[w.yi(i, j)] = -(psi(i + 1, j) - psi(i, j)) / g.hx();
    const Field2D d = upwind_divergence(Field2D(g, 1, 1.0), w);
    EXPECT_LT(lp_norm(d, kInf), 1e-12);
}

TEST(Upwind, DimensionMismatch) {
    const Grid1D g(8);
    EXPECT_THROW(upwind_advective_divergence(Field1D(g), Field1D(Grid1D(16)), g), StructuralError);
    const Grid2D g2(8, 8);
    EXPECT_THROW(upwind_advective_divergence(Field2D(g2), Field2D(g2, 1), g2), StructuralError);
}

TEST(Krylov, ConjugateGradientMatchesTridiag) {
    const Grid1D g(40);
    const Tridiag t = neumann_system(g, 2.0, 0.5);
    std::vector<double> b(40);
    for (std::size_t i = 0; i < 40; ++i) b[i] = std::cos(static_cast<double>(i));
    const auto direct = tridiag_solve(t, b);
    std::vector<double> x(40, 0.0);
    conjugate_gradient([&](std::span<const double> in, std::span<double> out) {
        const auto y = t.multiply(in);
        std::copy(y.begin(), y.end(), out.begin());
    }, b, x, 1e-12, 400);
    for (std::size_t i = 0; i < 40; ++i) EXPECT_NEAR(x[i], direct[i], 1e-9);
    std::vector<double> y(40, 0.0);
    bicgstab([&](std::span<const double> in, std::span<double> out) {
        const auto z = t.multiply(in);
        std::copy(z.begin(), z.end(), out.begin());
    }, b, y, 1e-12, 400);
    for (std::size_t i = 0; i < 40; ++i) EXPECT_NEAR(y[i], direct[i], 1e-9);
}

TEST(FieldIsValueType, CopiesAreIndependent) {
    const Grid1D g(8);
    Field1D a(g, 1, 1.0);
    Field1D b = a;
    b[0] = 5.0;
    EXPECT_EQ(a[0], 1.0);
    EXPECT_TRUE(a.all_finite());
    b[1] = std::nan("");
    EXPECT_FALSE(b.all_finite());
}
