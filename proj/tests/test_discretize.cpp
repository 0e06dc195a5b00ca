#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "floqrate/discretize.hpp"

using namespace floqrate;

namespace {
CoefficientField constant_field(double a, double b, double c) {
    FieldSpec spec;
    spec.kind = FieldKind::constant;
    spec.a = SpatialProfile::constant(a);
    spec.b = SpatialProfile::constant(b);
    spec.c = SpatialProfile::constant(c);
    return make_field(spec);
}
}  // namespace

TEST_CASE("build_mesh geometry") {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    CHECK(m.dx == Catch::Approx(0.01).epsilon(1e-14));
    CHECK(m.nodes.front() == Catch::Approx(0.01));
    CHECK(m.nodes.back() == Catch::Approx(0.99));
    CHECK(m.dx * (m.n_interior + 1) == Catch::Approx(m.domain.length()).epsilon(1e-12));

    CHECK(build_mesh(Domain1D(0.0, 1.0), 3).dx == Catch::Approx(0.25));
    CHECK(build_mesh(Domain1D(-1.0, 1.0), 199).dx == Catch::Approx(0.01));
    CHECK_THROWS_AS(build_mesh(Domain1D(0.0, 1.0), 2), std::invalid_argument);
}

TEST_CASE("assembly: standard Laplacian row") {
    auto f = constant_field(1.0, 0.0, 0.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    auto op = assemble(f, m, 0.0);
    CHECK(op.lower[50] == Catch::Approx(-10000.0));
    CHECK(op.diag[50] == Catch::Approx(20000.0));
    CHECK(op.upper[50] == Catch::Approx(-10000.0));
}

TEST_CASE("assembly: upwind advection row, hand-assembled") {
    auto f = constant_field(1.0, 2.0, 0.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 9);  // dx = 0.1
    auto op = assemble(f, m, 0.0);
    CHECK(op.lower[4] == Catch::Approx(-100.0));
    CHECK(op.upper[4] == Catch::Approx(-120.0));
    CHECK(op.diag[4] == Catch::Approx(220.0));
}

TEST_CASE("assembly: zero-order shift moves the diagonal only") {
    auto m = build_mesh(Domain1D(0.0, 1.0), 19);
    auto op0 = assemble(constant_field(1.0, 0.3, 0.0), m, 0.0);
    auto op5 = assemble(constant_field(1.0, 0.3, 5.0), m, 0.0);
    for (int i = 0; i < m.n_interior; ++i) {
        CHECK(op5.diag[i] == Catch::Approx(op0.diag[i] - 5.0));
        CHECK(op5.lower[i] == op0.lower[i]);
        CHECK(op5.upper[i] == op0.upper[i]);
    }
}

TEST_CASE("off-diagonals stay nonpositive for any advection strength") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ub(-500.0, 500.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 9);
    for (int k = 0; k < 50; ++k) {
        auto op = assemble(constant_field(0.01, ub(rng), 1.0), m, 0.0);
        for (int i = 0; i < m.n_interior; ++i) {
            CHECK(op.lower[i] <= 0.0);
            CHECK(op.upper[i] <= 0.0);
            CHECK(op.diag[i] >= -1.0 + std::abs(op.lower[i]) + std::abs(op.upper[i]) - 1e-9);
        }
    }
}

TEST_CASE("apply: constant profile and unit impulses") {
    auto f = constant_field(1.0, 0.0, 0.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    auto op = assemble(f, m, 0.0);
    std::vector<double> ones(m.n_interior, 1.0);
    auto out = floqrate::apply(op, ones);
    CHECK(out.front() == Catch::Approx(10000.0));
    CHECK(out.back() == Catch::Approx(10000.0));
    for (int i = 1; i < m.n_interior - 1; ++i) CHECK(out[i] == Catch::Approx(0.0).margin(1e-9));

    // column reconstruction from unit impulses
    std::vector<double> e(m.n_interior, 0.0);
    e[7] = 1.0;
    auto col = floqrate::apply(op, e);
    CHECK(col[6] == Catch::Approx(op.upper[6]));
    CHECK(col[7] == Catch::Approx(op.diag[7]));
    CHECK(col[8] == Catch::Approx(op.lower[8]));

    // zero operator
    TridiagonalOperator z;
    z.lower.assign(5, 0.0);
    z.diag.assign(5, 0.0);
    z.upper.assign(5, 0.0);
    std::vector<double> u{1, 2, 3, 4, 5};
    for (double v : floqrate::apply(z, u)) CHECK(v == 0.0);

    CHECK_THROWS_AS(floqrate::apply(op, std::span<const double>(u)), std::invalid_argument);
}

TEST_CASE("implicit update is monotone: nonnegative rhs gives nonnegative solution") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uf(0.0, 1.0);
    auto f = constant_field(1.0, 1.5, 3.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 49);
    auto op = assemble(f, m, 0.0);
    double dt = 0.1;  // dt * max c+ = 0.3 < 1
    std::vector<double> lo(m.n_interior), di(m.n_interior), up(m.n_interior);
    for (int i = 0; i < m.n_interior; ++i) {
        lo[i] = dt * op.lower[i];
        di[i] = 1.0 + dt * op.diag[i];
        up[i] = dt * op.upper[i];
    }
    std::vector<double> scratch(m.n_interior);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> rhs(m.n_interior);
        for (double& v : rhs) v = uf(rng);
        thomas_solve(lo, di, up, rhs, scratch);
        for (double v : rhs) CHECK(v >= -1e-14);
    }
}

TEST_CASE("consistency order of the stencil") {
    auto err = [](double a, double b, double c, int n) {
        FieldSpec spec;
        spec.kind = FieldKind::constant;
        spec.a = SpatialProfile::constant(a);
        spec.b = SpatialProfile::constant(b);
        spec.c = SpatialProfile::constant(c);
        auto f = make_field(spec);
        auto m = build_mesh(Domain1D(0.0, 1.0), n);
        auto op = assemble(f, m, 0.0);
        std::vector<double> u(m.n_interior);
        for (int i = 0; i < m.n_interior; ++i) u[i] = std::sin(kPi * m.nodes[i]);
        auto Lu = floqrate::apply(op, u);
        double e = 0.0;
        for (int i = 0; i < m.n_interior; ++i) {
            double x = m.nodes[i];
            double exact = a * kPi * kPi * std::sin(kPi * x) - b * kPi * std::cos(kPi * x) -
                           c * std::sin(kPi * x);
            e = std::max(e, std::abs(Lu[i] - exact));
        }
        return e;
    };
    SECTION("pure diffusion is second order") {
        double e1 = err(1.0, 0.0, 0.5, 49), e2 = err(1.0, 0.0, 0.5, 99);
        double rate = std::log2(e1 / e2);
        CHECK(rate >= 1.9);
    }
    SECTION("upwind advection is first order") {
        double e1 = err(1.0, 2.0, 0.0, 199), e2 = err(1.0, 2.0, 0.0, 399);
        double rate = std::log2(e1 / e2);
        CHECK(rate >= 0.9);
        CHECK(rate <= 1.35);
    }
}
