#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "floqrate/eigensolve.hpp"
#include "floqrate/growthrate.hpp"

using namespace floqrate;

namespace {

constexpr double kLam = 9.86879;  // frozen-heat rate used by the synthetic traces

const BetaTrace& logosc_trace() {  // beta = -lam t + F(t), span 1e6
    static BetaTrace tr = make_synthetic_trace(kLam, SigmaSignal::log_oscillatory(1.0), 0.0, 1e6,
                                               0.25, IntervalTag::Rplus);
    return tr;
}

// independent scan oracle straight from the closed-form antiderivative
double oracle_window_rate(double T, Extremum which) {
    SigmaSignal s = SigmaSignal::log_oscillatory(1.0);
    double best = which == Extremum::inf ? 1e300 : -1e300;
    for (double t0 = 0.0; t0 + T <= 1e6; t0 += T / 4096.0) {
        double q = -kLam + (s.antiderivative(t0 + T) - s.antiderivative(t0)) / T;
        best = which == Extremum::inf ? std::min(best, q) : std::max(best, q);
    }
    return best;
}

}  // namespace

TEST_CASE("window_extremal_rate: constant slope") {
    auto tr = make_synthetic_trace(3.0, SigmaSignal::constant(0.0), 0.0, 100.0, 0.1,
                                   IntervalTag::Rplus);
    for (double T : {1.0, 10.0, 40.0}) {
        CHECK(window_extremal_rate(tr, T, Extremum::inf) == Catch::Approx(-3.0).margin(1e-12));
        CHECK(window_extremal_rate(tr, T, Extremum::sup) == Catch::Approx(-3.0).margin(1e-12));
    }
    CHECK_THROWS_AS(window_extremal_rate(tr, 60.0, Extremum::inf), std::invalid_argument);
}

TEST_CASE("window_extremal_rate: log-oscillatory extremal windows vs scan oracle") {
    const auto& tr = logosc_trace();
    double inf3 = window_extremal_rate(tr, 1e3, Extremum::inf, 4);
    double sup3 = window_extremal_rate(tr, 1e3, Extremum::sup, 4);
    CHECK(inf3 == Catch::Approx(oracle_window_rate(1e3, Extremum::inf)).margin(2e-4));
    CHECK(sup3 == Catch::Approx(oracle_window_rate(1e3, Extremum::sup)).margin(2e-4));
    CHECK(inf3 == Catch::Approx(-kLam - 0.9995).margin(2e-3));
    CHECK(sup3 == Catch::Approx(-kLam + 0.9995).margin(2e-3));
}

TEST_CASE("monotone information: coarser scan strides never sharpen the extrema") {
    const auto& tr = logosc_trace();
    double i1 = window_extremal_rate(tr, 500.0, Extremum::inf, 1);
    double i4 = window_extremal_rate(tr, 500.0, Extremum::inf, 4);
    double i16 = window_extremal_rate(tr, 500.0, Extremum::inf, 16);
    CHECK(i1 <= i4 + 1e-15);
    CHECK(i4 <= i16 + 1e-15);
    double s1 = window_extremal_rate(tr, 500.0, Extremum::sup, 1);
    double s16 = window_extremal_rate(tr, 500.0, Extremum::sup, 16);
    CHECK(s1 >= s16 - 1e-15);
}

TEST_CASE("global_growth_rates: log-oscillatory limits") {
    std::vector<double> T_list{500, 1000, 2000, 5000, 10000};
    auto rates = global_growth_rates(logosc_trace(), T_list, 4);
    CHECK(rates.lgr.value == Catch::Approx(-kLam - 1.0).margin(5e-3));
    CHECK(rates.ggr.value == Catch::Approx(-kLam + 1.0).margin(5e-3));
}

TEST_CASE("global_growth_rates: bounded antiderivatives force the mean") {
    SECTION("periodic") {
        auto sig = SigmaSignal::cosine(0.5, 2.0, 1.0);
        auto tr = make_synthetic_trace(kLam, sig, 0.0, 4e4, 0.05, IntervalTag::Rplus);
        std::vector<double> T_list{16, 32, 64, 128};
        auto r = global_growth_rates(tr, T_list);
        double tol = 2.0 * 1.0 / (kPi * 128.0);
        CHECK(r.lgr.value == Catch::Approx(-kLam + 0.5).margin(tol));
        CHECK(r.ggr.value == Catch::Approx(-kLam + 0.5).margin(tol));
        // deviation residual decreases along the T list
        double d_small = std::abs(r.lgr.finite_T_values.at(16.0) - r.lgr.value);
        double d_large = std::abs(r.lgr.finite_T_values.at(128.0) - r.lgr.value);
        CHECK(d_large <= d_small + 1e-9);
    }
    SECTION("quasi-periodic") {
        auto sig = SigmaSignal::quasi_periodic({{1.0, 1.0}, {1.0, std::sqrt(2.0)}});
        auto tr = make_synthetic_trace(kLam, sig, 0.0, 2e5, 0.1, IntervalTag::Rplus);
        std::vector<double> T_list{500, 1000, 2000, 4000};
        auto r = global_growth_rates(tr, T_list, 1);
        CHECK(r.lgr.value == Catch::Approx(-kLam).margin(3.0 / 4000.0));
        CHECK(r.ggr.value == Catch::Approx(-kLam).margin(3.0 / 4000.0));
    }
}

TEST_CASE("duality: greatest rate of a trace is minus the least rate of its negation") {
    auto tr = logosc_trace().restrict(0.0, 2e5, IntervalTag::Rplus);
    BetaTrace neg = tr;
    for (double& b : neg.beta) b = -b;
    std::vector<double> T_list{250, 500, 1000};
    auto r = global_growth_rates(tr, T_list, 8);
    auto rn = global_growth_rates(neg, T_list, 8);
    CHECK(r.ggr.value == Catch::Approx(-rn.lgr.value).margin(1e-12));
    for (double T : T_list)
        CHECK(r.ggr.finite_T_values.at(T) ==
              Catch::Approx(-rn.lgr.finite_T_values.at(T)).margin(1e-12));
}

TEST_CASE("cesaro_rates") {
    SECTION("linear trace: both limits equal the slope") {
        auto tr = make_synthetic_trace(2.0, SigmaSignal::constant(0.0), 0.0, 500.0, 0.1,
                                       IntervalTag::Rplus);
        auto c = cesaro_rates(tr, Direction::plus, 0.4);
        CHECK(c.lower.value == Catch::Approx(-2.0).margin(1e-12));
        CHECK(c.upper.value == Catch::Approx(-2.0).margin(1e-12));
    }
    SECTION("log-oscillatory running average oscillates by 1/sqrt(2)") {
        auto c = cesaro_rates(logosc_trace(), Direction::plus, 0.01);
        CHECK(c.lower.value == Catch::Approx(-kLam - 1.0 / std::sqrt(2.0)).margin(1e-2));
        CHECK(c.upper.value == Catch::Approx(-kLam + 1.0 / std::sqrt(2.0)).margin(1e-2));
    }
    SECTION("even signal: minus direction equals plus direction") {
        auto tr = make_synthetic_trace(kLam, SigmaSignal::log_oscillatory(1.0), -1e5, 1e5, 0.25,
                                       IntervalTag::R);
        auto cp = cesaro_rates(tr, Direction::plus, 0.02);
        auto cm = cesaro_rates(tr, Direction::minus, 0.02);
        CHECK(cm.lower.value == Catch::Approx(cp.lower.value).margin(1e-9));
        CHECK(cm.upper.value == Catch::Approx(cp.upper.value).margin(1e-9));
    }
}

TEST_CASE("least_mean") {
    SECTION("constant signal") {
        std::vector<double> g(1001, 3.0);
        CHECK(least_mean(g, 0.1) == Catch::Approx(3.0).margin(1e-12));
    }
    SECTION("zero-mean periodic signal") {
        std::size_t n = 1000001;
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = std::cos(2.0 * kPi * 1e-3 * i);
        CHECK(least_mean(g, 1e-3) == Catch::Approx(0.0).margin(1e-3));
    }
    SECTION("log-oscillatory signal has least mean -1") {
        std::size_t n = 1000001;
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = std::cos(std::log1p(static_cast<double>(i)));
        std::vector<double> T_list{250, 500, 1000, 2000};
        CHECK(least_mean(g, 1.0, T_list) == Catch::Approx(-1.0).margin(5e-3));
    }
    SECTION("empty input") {
        CHECK_THROWS_AS(least_mean(std::vector<double>{}, 0.1), std::invalid_argument);
    }
}

TEST_CASE("interpolation_witness") {
    SECTION("linear trace: the witness is the trace") {
        auto tr = make_synthetic_trace(1.5, SigmaSignal::constant(0.0), 0.0, 100.0, 0.1,
                                       IntervalTag::Rplus);
        auto w = interpolation_witness(tr, 10.0);
        CHECK(w.sup_dev == Catch::Approx(0.0).margin(1e-12));
        CHECK(w.slope_essinf == Catch::Approx(-1.5).margin(1e-12));
        CHECK(w.slope_esssup == Catch::Approx(-1.5).margin(1e-12));
    }
    SECTION("knot slopes are exactly the knot-aligned window quotients") {
        auto tr = logosc_trace().restrict(0.0, 1e5, IntervalTag::Rplus);
        double T = 1e3;
        auto w = interpolation_witness(tr, T);
        auto lag = static_cast<std::size_t>(std::llround(T / tr.dt_record));
        double knot_scan = window_extremal_rate(tr, T, Extremum::inf, lag);
        CHECK(w.slope_essinf == Catch::Approx(knot_scan).margin(1e-12));
        // knot slopes are a subset of all window quotients
        double full_scan = window_extremal_rate(tr, T, Extremum::inf, 1);
        CHECK(w.slope_essinf >= full_scan - 1e-12);
        CHECK(w.sup_dev <= 2.0 * w.sublinear_C * (T + 1.0));
    }
    SECTION("sublinearity bound holds on suite traces") {
        auto sig = SigmaSignal::cosine(0.3, 1.0, 1.0);
        auto tr = make_synthetic_trace(kLam, sig, 0.0, 2000.0, 0.05, IntervalTag::Rplus);
        for (double T : {5.0, 20.0, 100.0}) {
            auto w = interpolation_witness(tr, T);
            CHECK(w.sup_dev <= 2.0 * w.sublinear_C * (T + 1.0));
        }
        CHECK_THROWS_AS(interpolation_witness(tr, 1500.0), std::invalid_argument);
    }
}

TEST_CASE("constant shift moves every functional by exactly the shift") {
    double kappa = 0.75;
    auto t0 = make_synthetic_trace(kLam, SigmaSignal::log_oscillatory(1.0), 0.0, 1e5, 0.25,
                                   IntervalTag::Rplus);
    auto t1 = make_synthetic_trace(kLam - kappa, SigmaSignal::log_oscillatory(1.0), 0.0, 1e5, 0.25,
                                   IntervalTag::Rplus);
    std::vector<double> T_list{250, 500, 1000};
    auto r0 = global_growth_rates(t0, T_list, 8);
    auto r1 = global_growth_rates(t1, T_list, 8);
    CHECK(r1.lgr.value == Catch::Approx(r0.lgr.value + kappa).margin(1e-9));
    CHECK(r1.ggr.value == Catch::Approx(r0.ggr.value + kappa).margin(1e-9));
    auto c0 = cesaro_rates(t0, Direction::plus, 0.05);
    auto c1 = cesaro_rates(t1, Direction::plus, 0.05);
    CHECK(c1.lower.value == Catch::Approx(c0.lower.value + kappa).margin(1e-9));
}

TEST_CASE("eigen_report") {
    SECTION("time-independent synthetic triple: every defined entry is lambda") {
        auto sig = SigmaSignal::constant(0.0);
        TraceTriple tt;
        tt.R = make_synthetic_trace(kLam, sig, -200.0, 200.0, 0.1, IntervalTag::R);
        tt.plus = make_synthetic_trace(kLam, sig, 0.0, 200.0, 0.1, IntervalTag::Rplus);
        tt.minus = make_synthetic_trace(kLam, sig, -200.0, 0.0, 0.1, IntervalTag::Rminus);
        ReportOptions opt;
        opt.T_list = {10, 20, 40, 80};
        auto rep = eigen_report(tt, nullptr, opt, 0.0);
        for (auto* e : {&rep.R.mu_bp, &rep.R.lambda_bp, &rep.R.mu_p, &rep.R.lambda_b, &rep.R.mu_b,
                        &rep.R.lambda_p, &rep.Rplus.mu_bp, &rep.Rplus.lambda_bp, &rep.Rplus.mu_p,
                        &rep.Rplus.lambda_b, &rep.Rminus.mu_bp, &rep.Rminus.lambda_bp,
                        &rep.Rminus.mu_b, &rep.Rminus.lambda_p}) {
            REQUIRE(e->has_value());
            CHECK((*e)->value == Catch::Approx(kLam).margin(1e-9));
        }
        CHECK_FALSE(rep.Rplus.mu_b.has_value());
        CHECK_FALSE(rep.Rplus.lambda_p.has_value());
        CHECK_FALSE(rep.Rminus.mu_p.has_value());
        CHECK_FALSE(rep.Rminus.lambda_b.has_value());
        CHECK(rep.chain_ok_R);
        CHECK(rep.chain_ok_plus);
        CHECK(rep.chain_ok_minus);
        CHECK(rep.split_mu_ok);
        CHECK(rep.split_lambda_ok);
    }
    SECTION("log-oscillatory: the four forward-interval notions separate") {
        // the span must reach past the late extremal regions near 2.9e5 and 6.3e5
        auto sig = SigmaSignal::log_oscillatory(1.0);
        TraceTriple tt;
        tt.R = make_synthetic_trace(kLam, sig, -1e6, 1e6, 0.5, IntervalTag::R);
        tt.plus = tt.R.restrict(0.0, 1e6, IntervalTag::Rplus);
        tt.minus = tt.R.restrict(-1e6, 0.0, IntervalTag::Rminus);
        ReportOptions opt;
        opt.T_list = {500, 1000, 2000, 5000};
        opt.s_stride = 4;
        opt.tail_fraction = 0.01;
        auto rep = eigen_report(tt, nullptr, opt, 1.0);
        double rt2 = 1.0 / std::sqrt(2.0);
        CHECK(rep.Rplus.mu_bp->value == Catch::Approx(kLam + 1.0).margin(1e-2));
        CHECK(rep.Rplus.mu_p->value == Catch::Approx(kLam + rt2).margin(1e-2));
        CHECK(rep.Rplus.lambda_b->value == Catch::Approx(kLam - rt2).margin(1e-2));
        CHECK(rep.Rplus.lambda_bp->value == Catch::Approx(kLam - 1.0).margin(1e-2));
        CHECK(rep.chain_ok_plus);
        CHECK(rep.chain_ok_minus);
        CHECK(rep.chain_ok_R);
        CHECK(rep.split_mu_ok);
        CHECK(rep.split_lambda_ok);
    }
    SECTION("provenance mismatch is rejected") {
        auto sig = SigmaSignal::constant(0.0);
        TraceTriple tt;
        tt.R = make_synthetic_trace(1.0, sig, -10.0, 10.0, 0.1, IntervalTag::R);
        tt.plus = make_synthetic_trace(1.0, sig, 0.0, 10.0, 0.05, IntervalTag::Rplus);
        tt.minus = make_synthetic_trace(1.0, sig, -10.0, 0.0, 0.1, IntervalTag::Rminus);
        tt.R.scheme_dt = 1e-3;
        tt.plus.scheme_dt = 2e-3;
        ReportOptions opt;
        opt.T_list = {1, 2, 4};
        CHECK_THROWS_AS(eigen_report(tt, nullptr, opt, 0.0), std::invalid_argument);
    }
}

TEST_CASE("interval shift invariance on a forward trace") {
    auto sig = SigmaSignal::cosine(0.4, 1.0, 1.0);
    auto tr = make_synthetic_trace(kLam, sig, 0.0, 4e4, 0.05, IntervalTag::Rplus);
    std::vector<double> T_list{16, 32, 64, 128};
    auto r0 = global_growth_rates(tr, T_list, 4);
    auto shifted = tr.restrict(1000.0, 4e4, IntervalTag::Rplus);
    auto r1 = global_growth_rates(shifted, T_list, 4);
    CHECK(std::abs(r0.lgr.value - r1.lgr.value) <=
          r0.lgr.trust_radius + r1.lgr.trust_radius + 1e-9);
    CHECK(std::abs(r0.ggr.value - r1.ggr.value) <=
          r0.ggr.trust_radius + r1.ggr.trust_radius + 1e-9);
}

TEST_CASE("translate_scan") {
    auto m = build_mesh(Domain1D(0.0, 1.0), 49);
    StepScheme sch{1.0, 2e-3, true};
    SECTION("time-independent field: all shifts identical") {
        FieldSpec spec;
        spec.kind = FieldKind::constant;
        spec.c = SpatialProfile::constant(0.5);
        auto f = make_field(spec);
        std::vector<double> shifts{0.0, 3.0, 11.5};
        auto scan = translate_scan(f, m, sch, shifts, 30.0, 2.0, 0.5);
        auto first = scan.begin()->second;
        for (auto& [s, v] : scan) {
            CHECK(v.first == Catch::Approx(first.first).margin(1e-9));
            CHECK(v.second == Catch::Approx(first.second).margin(1e-9));
        }
    }
    SECTION("periodic field: shifts across one period agree") {
        FieldSpec spec;
        spec.kind = FieldKind::periodic;
        spec.period = 1.0;
        spec.sigma = SigmaSignal::cosine(0.5, 1.0, 1.0);
        auto f = make_field(spec);
        std::vector<double> shifts{0.0, 0.25, 0.5, 0.75};
        auto scan = translate_scan(f, m, sch, shifts, 40.0, 2.0, 0.5);
        double lam = dirichlet_eigen(make_field(FieldSpec{}), m).value;
        auto first = scan.begin()->second;
        for (auto& [s, v] : scan) {
            // raw single-dt diagnostic: the O(dt lam^2 / 2) stepping bias remains
            CHECK(v.first == Catch::Approx(lam - 0.5).margin(0.15));
            CHECK(v.second == Catch::Approx(lam - 0.5).margin(0.15));
            CHECK(v.first == Catch::Approx(first.first).margin(0.02));
        }
    }
    SECTION("converging field: large shifts approach the limit operator") {
        FieldSpec spec;
        spec.kind = FieldKind::converging;
        spec.c = SpatialProfile::constant(1.0);  // limit zero-order term
        spec.g = SpatialProfile::constant(1.0);
        spec.decay_amp = 2.0;
        spec.decay_scale = 4.0;
        auto f = make_field(spec);
        std::vector<double> shifts{0.0, 20.0, 60.0};
        auto scan = translate_scan(f, m, sch, shifts, 30.0, 2.0, 0.5);
        FieldSpec lim;
        lim.c = SpatialProfile::constant(1.0);
        double lam_inf = dirichlet_eigen(make_field(lim), m).value;
        CHECK(scan.at(60.0).first == Catch::Approx(lam_inf).margin(0.15));
        CHECK(std::abs(scan.at(0.0).first - lam_inf) >
              std::abs(scan.at(60.0).first - lam_inf));
    }
}
