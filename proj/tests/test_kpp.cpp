#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "floqrate/kpp.hpp"

using namespace floqrate;

namespace {

CoefficientField const_c_field(double c) {
    FieldSpec spec;
    spec.kind = FieldKind::constant;
    spec.c = SpatialProfile::constant(c);
    return make_field(spec);
}

std::vector<double> sine_datum(const Mesh& m, double amp = 1.0) {
    std::vector<double> u(m.n_interior);
    for (int i = 0; i < m.n_interior; ++i)
        u[i] = amp * std::sin(kPi * (m.nodes[i] - m.domain.x_lo) / m.domain.length());
    return u;
}

// test-side oracle: Newton iteration for the discrete steady state
// L_h u + n u^2 = 0 (quadratic absorption)
std::vector<double> newton_steady(const CoefficientField& f, const Mesh& m,
                                  std::vector<double> u, double n_coef, double* residual) {
    auto op = assemble(f, m, 0.0);
    int n = m.n_interior;
    std::vector<double> lo(n), di(n), up(n), rhs(n), scratch(n);
    for (int it = 0; it < 50; ++it) {
        auto Lu = floqrate::apply(op, u);
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            rhs[i] = -(Lu[i] + n_coef * u[i] * u[i]);
            res = std::max(res, std::abs(rhs[i]));
        }
        *residual = res;
        if (res < 1e-9) break;
        for (int i = 0; i < n; ++i) {
            lo[i] = op.lower[i];
            di[i] = op.diag[i] + 2.0 * n_coef * u[i];
            up[i] = op.upper[i];
        }
        thomas_solve(lo, di, up, rhs, scratch);
        for (int i = 0; i < n; ++i) u[i] += rhs[i];
    }
    return u;
}

}  // namespace

TEST_CASE("evolve_kpp: zero stays zero") {
    auto f = const_c_field(5.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 49);
    auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic, SpatialProfile::constant(1.0));
    StepScheme sch{1.0, 1e-3, true};
    std::vector<double> zero(m.n_interior, 0.0);
    auto traj = evolve_kpp(f, fs, zero, 0.0, 2.0, m, sch, 200);
    for (double s : traj.sup_u) CHECK(s == 0.0);
}

TEST_CASE("evolve_kpp: convergence to the positive steady state") {
    double c = kPi * kPi + 0.5;
    auto f = const_c_field(c);
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic, SpatialProfile::constant(1.0));
    StepScheme sch{1.0, 1e-3, true};
    auto traj = evolve_kpp(f, fs, sine_datum(m, 0.1), 0.0, 80.0, m, sch, 1000);

    double sup_end = traj.sup_u.back();
    CHECK(sup_end > 0.0);
    CHECK(sup_end < c);
    // the scheme has reached its own fixed point
    auto again = evolve_kpp(f, fs, traj.final_profile, 0.0, 1.0, m, sch, 1000);
    double drift = 0.0;
    for (int i = 0; i < m.n_interior; ++i)
        drift = std::max(drift, std::abs(again.final_profile[i] - traj.final_profile[i]));
    CHECK(drift < 1e-10);
    // Newton oracle for the true discrete steady state: residual below 1e-8,
    // simulation fixed point within the O(dt) splitting bias
    double res = 1.0;
    auto steady = newton_steady(f, m, traj.final_profile, 1.0, &res);
    CHECK(res < 1e-8);
    double gap = 0.0;
    for (int i = 0; i < m.n_interior; ++i)
        gap = std::max(gap, std::abs(steady[i] - traj.final_profile[i]));
    CHECK(gap < 50.0 * sch.dt);
}

TEST_CASE("evolve_kpp: saturation bound pulls large data down") {
    double c = kPi * kPi + 0.5;
    auto f = const_c_field(c);
    auto m = build_mesh(Domain1D(0.0, 1.0), 49);
    auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic, SpatialProfile::constant(1.0));
    StepScheme sch{1.0, 1e-3, true};
    std::vector<double> u0(m.n_interior, 2.0 * fs.M);
    auto traj = evolve_kpp(f, fs, u0, 0.0, 3.0, m, sch, 100);
    for (std::size_t k = 1; k < traj.sup_u.size(); ++k) {
        CHECK(traj.sup_u[k] <= traj.sup_u[k - 1] + 1e-12);
        CHECK(traj.sup_u[k] <= 2.0 * fs.M + 1e-12);
    }
    CHECK(traj.sup_u.back() <= fs.M + 0.05);
}

TEST_CASE("evolve_kpp: positivity, comparison and linear domination") {
    auto f = const_c_field(kPi * kPi + 0.5);
    auto m = build_mesh(Domain1D(0.0, 1.0), 39);
    auto fs = NonlinearitySpec::make(f, LogisticForm::cubic, SpatialProfile::constant(1.0));
    StepScheme sch{1.0, 2e-3, true};
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> u0(m.n_interior), v0(m.n_interior);
        for (int i = 0; i < m.n_interior; ++i) {
            u0[i] = u01(rng);
            v0[i] = u0[i] + u01(rng) * 0.5;
        }
        auto tu = evolve_kpp(f, fs, u0, 0.0, 1.0, m, sch, 50, 1);
        auto tv = evolve_kpp(f, fs, v0, 0.0, 1.0, m, sch, 50, 1);
        for (auto& [k, pu] : tu.profiles) {
            auto& pv = tv.profiles.at(k);
            for (std::size_t i = 0; i < pu.size(); ++i) {
                CHECK(pu[i] >= 0.0);
                CHECK(pu[i] <= pv[i] + 1e-10);
            }
        }
        // one linear implicit step dominates one semilinear step
        auto lin = step(f, m, sch, NormalizedState{u0, 0.0, 0.0});
        detail::KppStepper ks(f, fs, m, sch);
        auto u1 = u0;
        double t = 0.0;
        ks.step(u1, t);
        for (int i = 0; i < m.n_interior; ++i) {
            double w = lin.profile[i] * std::exp(lin.log_mass);
            CHECK(u1[i] <= w * (1.0 + 1e-12) + 1e-300);
        }
    }
}

TEST_CASE("persistence_verdict: supercritical, subcritical, and oscillatory cases") {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    StepScheme sch{1.0, 1e-3, true};
    PersistenceOptions opt;

    SECTION("c = pi^2 + 0.5 persists with floor above 0.01") {
        auto f = const_c_field(kPi * kPi + 0.5);
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        auto v = persistence_verdict(f, fs, sine_datum(m, 0.05), m, sch, opt);
        CHECK(v.verdict == Verdict::persistent);
        CHECK(v.floor > 0.01);
        CHECK(v.mu_bp_plus == Catch::Approx(-0.5).margin(0.02));
        CHECK(v.consistent);
    }
    SECTION("c = pi^2 - 0.5 dies at the linear rate") {
        auto f = const_c_field(kPi * kPi - 0.5);
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        auto v = persistence_verdict(f, fs, sine_datum(m, 0.5), m, sch, opt);
        CHECK(v.verdict == Verdict::extinct);
        CHECK(v.decay_rate == Catch::Approx(-0.5).epsilon(0.10));
        CHECK(v.mu_bp_plus == Catch::Approx(0.5).margin(0.02));
        CHECK(v.consistent);
    }
    SECTION("oscillatory c: extinct although milder averages would not predict it") {
        FieldSpec spec;
        spec.kind = FieldKind::log_oscillatory;
        spec.c = SpatialProfile::constant(kPi * kPi);
        spec.sigma = SigmaSignal::log_oscillatory(1.0);
        auto f = make_field(spec);
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        // horizon inside the first completed decay episode of cos(ln(1+t))
        PersistenceOptions lopt;
        lopt.horizon = 120.0;
        auto v = persistence_verdict(f, fs, sine_datum(m, 0.5), m, sch, lopt);
        CHECK(v.verdict == Verdict::extinct);
        CHECK(v.mu_bp_plus > 0.5);
        CHECK(v.consistent);
        // the same operator's tail rate sits on the other side of zero
        auto tr = compute_bundle(f, m, sch, IntervalTag::Rplus, 0.0, 150.0, 2.0, 100);
        auto ces = cesaro_rates(tr, Direction::plus, 0.05);
        double lambda_b = -ces.upper.value;
        CHECK(lambda_b < 0.0);
        CHECK(lambda_b < v.mu_bp_plus - 0.5);
    }
    SECTION("critical c = pi^2 lands in the margin band") {
        auto f = const_c_field(kPi * kPi);
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        auto v = persistence_verdict(f, fs, sine_datum(m, 0.1), m, sch, opt);
        CHECK(v.verdict == Verdict::inconclusive);
        CHECK(std::abs(v.mu_bp_plus) <= opt.margin);
        CHECK(v.consistent);
    }
}

TEST_CASE("entire_solution_pullback") {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    StepScheme sch{1.0, 1e-3, true};
    double lam = laplacian_principal_eigenvalue(m);
    std::vector<double> n_list{4, 8, 16, 24, 32, 44};

    SECTION("negative eigenvalue: geometric gap decay and a positive floor") {
        FieldSpec spec;
        spec.kind = FieldKind::periodic;
        spec.period = 1.0;
        spec.sigma = SigmaSignal::cosine(lam + 0.5, 1.0, 1.0);  // mu_bp(R) = -0.5
        auto f = make_field(spec);
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        auto pb = entire_solution_pullback(f, fs, n_list, 0.0, m, sch);
        CHECK(pb.monotone);
        CHECK(pb.gaps.back() < 1e-6);
        for (std::size_t k = 1; k < pb.gaps.size(); ++k)
            CHECK(pb.gaps[k] < pb.gaps[k - 1] + 1e-12);
        CHECK(pb.interior_floor > 0.01);
    }
    SECTION("positive eigenvalue: no bounded entire solution survives") {
        FieldSpec spec;
        spec.kind = FieldKind::periodic;
        spec.period = 1.0;
        spec.sigma = SigmaSignal::cosine(lam - 0.5, 1.0, 1.0);  // mu_bp(R) = +0.5
        auto f = make_field(spec);
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        auto pb = entire_solution_pullback(f, fs, n_list, 0.0, m, sch);
        double sup = 0.0;
        for (double v : pb.window_final.back()) sup = std::max(sup, v);
        CHECK(sup < 1e-6);
    }
    SECTION("time-independent persistent case matches the forward steady state") {
        auto f = const_c_field(kPi * kPi + 0.5);
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        auto pb = entire_solution_pullback(f, fs, std::vector<double>{20, 44}, 0.0, m, sch);
        auto traj = evolve_kpp(f, fs, sine_datum(m, 0.1), 0.0, 80.0, m, sch, 1u << 30);
        double gap = 0.0;
        for (int i = 0; i < m.n_interior; ++i)
            gap = std::max(gap, std::abs(pb.window_final.back()[i] - traj.final_profile[i]));
        CHECK(gap < 1e-6);
    }
}

TEST_CASE("ancient_uniqueness_gap") {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    StepScheme sch{1.0, 1e-3, true};
    double lam = laplacian_principal_eigenvalue(m);
    FieldSpec spec;
    spec.kind = FieldKind::periodic;
    spec.period = 1.0;
    spec.sigma = SigmaSignal::cosine(lam + 0.5, 1.0, 1.0);
    auto f = make_field(spec);
    auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic, SpatialProfile::constant(1.0));

    SECTION("flat half-saturation datum converges to the same ancient solution") {
        std::vector<double> half(m.n_interior, fs.M / 2.0);
        auto gaps = ancient_uniqueness_gap(f, fs, std::vector<double>{10, 20, 40}, half, 0.0, m,
                                           sch);
        CHECK(gaps.back() < 1e-6);
        CHECK(gaps.front() > gaps.back());
    }
    SECTION("the pullback limit itself is a fixed point of the family") {
        auto pb = entire_solution_pullback(f, fs, std::vector<double>{40, 60}, 0.0, m, sch);
        auto gaps = ancient_uniqueness_gap(f, fs, std::vector<double>{60}, pb.window_final.back(),
                                           0.0, m, sch);
        CHECK(gaps.back() < 1e-11);
    }
    SECTION("without absorption the gaps do not converge") {
        // pure linear flow with c above the principal eigenvalue: data M and
        // M/2 keep their exact factor-2 separation while both grow
        auto flin = const_c_field(lam + 0.5);
        std::vector<double> uM(m.n_interior, 1.0);
        auto t1 = evolve_normalized(flin, m, sch, uM, -10.0, 0.0, 10000);
        auto t2 = evolve_normalized(flin, m, sch, uM, -20.0, 0.0, 20000);
        // gap(n) = 0.5 sup u_M(0) grows with the pullback depth
        double g1 = 0.5 * std::exp(t1.beta.back());
        double g2 = 0.5 * std::exp(t2.beta.back());
        CHECK(g2 > g1 * 50.0);
    }
}

TEST_CASE("mp_decay_test: the backward-interval eigenvalue sign decides decay") {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    StepScheme sch{1.0, 1e-3, true};
    std::vector<double> T_list{5, 10, 20, 30, 40};
    std::vector<double> u0(m.n_interior, 1.0);

    SECTION("mu_b > 0: decay at the eigen-rate") {
        auto f = const_c_field(kPi * kPi - 0.5);
        auto r = mp_decay_test(f, m, sch, u0, T_list);
        CHECK_FALSE(r.inconclusive);
        CHECK(r.fitted_rate == Catch::Approx(-0.5).epsilon(0.10));
    }
    SECTION("mu_b < 0: growth at the eigen-rate") {
        auto f = const_c_field(kPi * kPi + 0.5);
        auto r = mp_decay_test(f, m, sch, u0, T_list);
        CHECK_FALSE(r.inconclusive);
        CHECK(r.fitted_rate == Catch::Approx(0.5).epsilon(0.10));
    }
    SECTION("mu_b = 0: flagged inconclusive") {
        auto f = const_c_field(kPi * kPi);
        auto r = mp_decay_test(f, m, sch, u0, T_list);
        CHECK(r.inconclusive);
    }
}
