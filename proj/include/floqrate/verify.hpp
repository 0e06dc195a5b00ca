// Verification suite: oracle- and property-based checks at desk scale, one
// row per criterion. Every tolerance is pinned here.
#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "floqrate/scenario.hpp"

namespace floqrate {

struct CriterionResult {
    std::string id, name, modules;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

namespace verify_detail {

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!ok) detail << "[FAIL " << what << "] ";
    }
    template <class T>
    void note(const std::string& k, T v) {
        detail << k << "=" << v << " ";
    }
};

inline CoefficientField const_field(double a, double b, double c,
                                    Domain1D dom = Domain1D(0.0, 1.0)) {
    FieldSpec spec;
    spec.kind = FieldKind::constant;
    spec.domain = dom;
    spec.a = SpatialProfile::constant(a);
    spec.b = SpatialProfile::constant(b);
    spec.c = SpatialProfile::constant(c);
    return make_field(spec);
}

// PDE-path report with the two-grid dt pair, spanning [-t_minus, t_plus].
inline GrowthRateReport pde_report(const CoefficientField& field, const Mesh& mesh, double dt,
                                   double burn_in, double t_minus, double t_plus,
                                   std::size_t stride, const ReportOptions& opt,
                                   bool richardson = true) {
    auto triple = [&](double dtf, std::size_t st) {
        StepScheme sch{1.0, dt * dtf, true};
        TraceTriple tt;
        tt.R = compute_bundle(field, mesh, sch, IntervalTag::R, -t_minus, t_plus, burn_in, st);
        tt.plus = tt.R.restrict(0.0, t_plus, IntervalTag::Rplus);
        tt.minus = tt.R.restrict(-t_minus, 0.0, IntervalTag::Rminus);
        tt.plus.anchor_at(0.0);
        tt.minus.anchor_at(0.0);
        return tt;
    };
    auto fine = triple(1.0, stride);
    if (!richardson) return eigen_report(fine, nullptr, opt, field.sup_c_plus());
    auto coarse = triple(2.0, std::max<std::size_t>(1, stride / 2));
    return eigen_report(fine, &coarse, opt, field.sup_c_plus());
}

inline GrowthRateReport synthetic_report(double lambda0, const SigmaSignal& sig, double span,
                                         double dt_record, const ReportOptions& opt,
                                         double sup_c) {
    TraceTriple tt;
    tt.R = make_synthetic_trace(lambda0, sig, -span, span, dt_record, IntervalTag::R);
    tt.plus = tt.R.restrict(0.0, span, IntervalTag::Rplus);
    tt.minus = tt.R.restrict(-span, 0.0, IntervalTag::Rminus);
    tt.plus.anchor_at(0.0);
    tt.minus.anchor_at(0.0);
    return eigen_report(tt, nullptr, opt, sup_c);
}

using EntryRef = std::pair<const char*, const std::optional<Estimate>*>;

inline std::vector<EntryRef> all_entries(const GrowthRateReport& r) {
    return {{"R.mu_bp", &r.R.mu_bp},           {"R.lambda_bp", &r.R.lambda_bp},
            {"R.mu_p", &r.R.mu_p},             {"R.lambda_b", &r.R.lambda_b},
            {"R.mu_b", &r.R.mu_b},             {"R.lambda_p", &r.R.lambda_p},
            {"R+.mu_bp", &r.Rplus.mu_bp},      {"R+.lambda_bp", &r.Rplus.lambda_bp},
            {"R+.mu_p", &r.Rplus.mu_p},        {"R+.lambda_b", &r.Rplus.lambda_b},
            {"R-.mu_bp", &r.Rminus.mu_bp},     {"R-.lambda_bp", &r.Rminus.lambda_bp},
            {"R-.mu_b", &r.Rminus.mu_b},       {"R-.lambda_p", &r.Rminus.lambda_p}};
}

inline void check_entries_near(Check& ck, const GrowthRateReport& r, double target, double tol) {
    double worst = 0.0;
    const char* worst_name = "";
    for (auto& [name, e] : all_entries(r)) {
        if (!e->has_value()) continue;
        double err = std::abs((*e)->value - target);
        if (err > worst) {
            worst = err;
            worst_name = name;
        }
        ck.require(err <= tol, std::string(name));
    }
    ck.note("worst", worst);
    ck.note("at", worst_name);
}

inline void check_report_invariants(Check& ck, const GrowthRateReport& r, const char* tag) {
    ck.require(r.chain_ok_R, std::string(tag) + ".chain_R");
    ck.require(r.chain_ok_plus, std::string(tag) + ".chain_R+");
    ck.require(r.chain_ok_minus, std::string(tag) + ".chain_R-");
    ck.require(r.split_mu_ok, std::string(tag) + ".split_mu");
    ck.require(r.split_lambda_ok, std::string(tag) + ".split_lambda");
}

// ---------------------------------------------------------------------------

inline void c01_elliptic_oracle(Check& ck, std::uint64_t) {
    auto f = const_field(1.0, 0.0, 0.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    auto est = dirichlet_eigen(f, m);
    double exact = 2.0 / (m.dx * m.dx) * (1.0 - std::cos(kPi * m.dx));
    ck.require(std::abs(est.value - exact) <= 1e-9 * std::abs(exact), "closed-form eigenvalue");
    ck.note("lambda_h", est.value);
    double e1 = std::abs(dirichlet_eigen(f, build_mesh(m.domain, 24)).value - kPi * kPi);
    double e2 = std::abs(dirichlet_eigen(f, build_mesh(m.domain, 49)).value - kPi * kPi);
    double e3 = std::abs(est.value - kPi * kPi);
    double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    ck.require(o1 >= 1.9 && o2 >= 1.9, "convergence order >= 1.9");
    ck.note("orders", o1);
    ck.note("/", o2);
}

inline void c02_time_independent(Check& ck, std::uint64_t) {
    auto f = const_field(1.0, 0.0, 0.0);
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    double lam = dirichlet_eigen(f, m).value;
    ReportOptions opt{{5, 10, 20, 25}, 1, 0.4};
    auto rep = pde_report(f, m, 1e-3, 3.0, 50.0, 50.0, 20, opt);
    check_entries_near(ck, rep, lam, 1e-3);
    check_report_invariants(ck, rep, "rep");
}

inline void c03_periodic(Check& ck, std::uint64_t) {
    FieldSpec spec;
    spec.kind = FieldKind::periodic;
    spec.period = 1.0;
    spec.sigma = SigmaSignal::cosine(1.0, 1.0, 1.0);
    auto f = make_field(spec);
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    double lam = dirichlet_eigen(const_field(1.0, 0.0, 0.0), m).value;
    ReportOptions opt{{20, 40, 80, 120}, 2, 0.4};
    auto rep = pde_report(f, m, 1e-3, 2.0, 250.0, 250.0, 20, opt);
    check_entries_near(ck, rep, lam - 1.0, 2e-3);
    check_report_invariants(ck, rep, "rep");
    StepScheme sch{1.0, 1e-3, true};
    double vper = periodic_eigen_richardson(f, m, sch, 1.0);
    ck.require(std::abs(vper - (lam - 1.0)) <= 1e-4, "periodic map eigenvalue");
    ck.note("periodic_eigen_err", vper - (lam - 1.0));
}

inline void c04_six_notion_separation(Check& ck, std::uint64_t) {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    double lam = dirichlet_eigen(const_field(1.0, 0.0, 0.0), m).value;
    ReportOptions opt{{500, 1000, 2000, 5000, 10000}, 4, 0.01};
    auto rep = synthetic_report(lam, SigmaSignal::log_oscillatory(1.0), 1e6, 0.25, opt, 1.0);
    double rt2 = 1.0 / std::sqrt(2.0);
    const double tol = 1e-2;
    double v_mubp = rep.Rplus.mu_bp->value, v_mup = rep.Rplus.mu_p->value;
    double v_lb = rep.Rplus.lambda_b->value, v_lbp = rep.Rplus.lambda_bp->value;
    ck.require(std::abs(v_mubp - (lam + 1.0)) <= tol, "mu_bp");
    ck.require(std::abs(v_mup - (lam + rt2)) <= tol, "mu_p");
    ck.require(std::abs(v_lb - (lam - rt2)) <= tol, "lambda_b");
    ck.require(std::abs(v_lbp - (lam - 1.0)) <= tol, "lambda_bp");
    ck.note("errs", std::abs(v_mubp - lam - 1.0));
    double vals[4] = {v_mubp, v_mup, v_lb, v_lbp};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            ck.require(std::abs(vals[i] - vals[j]) >= 5.0 * tol, "pairwise gap resolved");
    check_report_invariants(ck, rep, "rep");
}

inline void c05_random_suite(Check& ck, std::uint64_t seed) {
    auto m = build_mesh(Domain1D(0.0, 1.0), 49);
    double lam = dirichlet_eigen(const_field(1.0, 0.0, 0.0), m).value;
    int n_scen = 21, n_pass = 0;
    for (int i = 0; i < n_scen; ++i) {
        auto u = [&](int k, double lo, double hi) {
            return lo + (hi - lo) * detail::cell_uniform(seed ^ (0xABCDu + i), k);
        };
        GrowthRateReport rep;
        switch (i % 7) {
            case 0:  // constant zero-order level
                rep = synthetic_report(lam - u(0, -2.0, 2.0), SigmaSignal::constant(0.0), 200.0,
                                       0.05, ReportOptions{{10, 20, 40, 80}, 1, 0.4}, 2.0);
                break;
            case 1: {  // frozen spatial structure, PDE path
                FieldSpec sp;
                sp.kind = FieldKind::time_independent;
                sp.a = SpatialProfile::sine_bump(1.0, u(1, 0.0, 0.5));
                sp.b = SpatialProfile::constant(u(2, -0.5, 0.5));
                sp.c = SpatialProfile::sine_bump(u(3, -1.0, 1.0), u(4, -1.0, 1.0));
                auto f = make_field(sp);
                rep = pde_report(f, m, 1e-3, 2.0, 40.0, 40.0, 20,
                                 ReportOptions{{5, 10, 20}, 1, 0.4});
                break;
            }
            case 2: {  // separable periodic signal
                auto sig = SigmaSignal::cosine(u(5, -1.0, 1.0), u(6, 0.1, 1.5), 1.0);
                rep = synthetic_report(lam, sig, 4e4, 0.05,
                                       ReportOptions{{16, 32, 64, 128}, 2, 0.4}, sig.sup_abs());
                break;
            }
            case 3: {  // non-separable periodic drift, PDE path
                FieldSpec sp;
                sp.kind = FieldKind::periodic;
                sp.period = 1.0;
                sp.sigma = SigmaSignal::cosine(u(7, -0.5, 0.5), u(8, 0.1, 1.0), 1.0);
                sp.b_mod_amp = u(9, 0.2, 0.6);
                auto f = make_field(sp);
                rep = pde_report(f, m, 1e-3, 2.0, 40.0, 40.0, 20,
                                 ReportOptions{{5, 10, 20}, 1, 0.4});
                break;
            }
            case 4: {  // quasi-periodic
                auto sig = SigmaSignal::quasi_periodic(
                    {{u(10, 0.3, 1.0), 1.0}, {u(11, 0.3, 1.0), std::sqrt(2.0)}});
                rep = synthetic_report(lam, sig, 2e5, 0.1,
                                       ReportOptions{{500, 1000, 2000, 4000}, 4, 0.4},
                                       sig.sup_abs());
                break;
            }
            case 5: {  // log-oscillatory
                auto sig = SigmaSignal::log_oscillatory(u(12, 0.3, 1.2));
                rep = synthetic_report(lam, sig, 2e5, 0.25,
                                       ReportOptions{{250, 500, 1000, 2000}, 4, 0.01},
                                       sig.sup_abs());
                break;
            }
            default: {  // stationary cells
                double lo = u(13, -1.0, 0.0), hi = lo + u(14, 0.5, 1.5);
                auto sig = SigmaSignal::piecewise_linear_iid(seed * 131 + i, lo, hi);
                rep = synthetic_report(lam, sig, 1e5, 0.25,
                                       ReportOptions{{2, 3, 4, 5}, 4, 0.3}, sig.sup_abs());
                break;
            }
        }
        bool ok = rep.chain_ok_R && rep.chain_ok_plus && rep.chain_ok_minus && rep.split_mu_ok &&
                  rep.split_lambda_ok;
        if (ok) ++n_pass;
        if (!ok) ck.detail << "[scenario " << i << " violated] ";
    }
    ck.note("scenarios", n_scen);
    ck.note("clean", n_pass);
    ck.require(n_pass == n_scen, "chain and splits on every scenario");
}

inline void c06_quasi_periodic_collapse(Check& ck, std::uint64_t) {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    double lam = dirichlet_eigen(const_field(1.0, 0.0, 0.0), m).value;
    auto sig = SigmaSignal::quasi_periodic({{1.0, 1.0}, {1.0, std::sqrt(2.0)}});
    ReportOptions opt{{500, 1000, 2000, 4000}, 2, 0.4};
    auto rep = synthetic_report(lam, sig, 2e5, 0.1, opt, sig.sup_abs());
    check_entries_near(ck, rep, lam, 5e-3);
    check_report_invariants(ck, rep, "rep");
}

inline void c07_random_stationary(Check& ck, std::uint64_t seed) {
    auto mesh = build_mesh(Domain1D(0.0, 1.0), 49);
    double lam = dirichlet_eigen(const_field(1.0, 0.0, 0.0), mesh).value;
    const int n_seeds = 5;
    const double horizon = 1e4;

    // per seed: mu_p, lambda_b, mu_b, lambda_p
    std::vector<std::array<double, 4>> cesaro(n_seeds);
    std::vector<std::array<double, 2>> extremal(n_seeds);  // mu_bp, lambda_bp (synthetic)
    {
        detail::WorkerPool pool(2);
        for (int s = 0; s < n_seeds; ++s) {
            pool.submit([&, s] {
                FieldSpec sp;
                sp.kind = FieldKind::random_stationary;
                sp.sigma = SigmaSignal::piecewise_linear_iid(seed + 1000 * s, 0.0, 1.0);
                auto f = make_field(sp);
                auto run = [&](double dt, std::size_t stride) {
                    StepScheme sch{1.0, dt, true};
                    auto tr = compute_bundle(f, mesh, sch, IntervalTag::R, -horizon, horizon, 2.0,
                                             stride);
                    auto cp = cesaro_rates(tr, Direction::plus, 0.3);
                    auto cm = cesaro_rates(tr, Direction::minus, 0.3);
                    return std::array<double, 4>{-cp.lower.value, -cp.upper.value,
                                                 -cm.lower.value, -cm.upper.value};
                };
                auto fine = run(1e-3, 50);
                auto coarse = run(2e-3, 25);
                for (int k = 0; k < 4; ++k) cesaro[s][k] = 2.0 * fine[k] - coarse[k];
                // exact-path extremal windows over a long span
                auto tr = make_synthetic_trace(lam, *f.sigma, 0.0, 1e6, 0.25, IntervalTag::Rplus);
                auto rates = global_growth_rates(tr, std::vector<double>{2, 2.5, 3, 4, 5}, 4);
                extremal[s] = {-rates.lgr.value, -rates.ggr.value};
            });
        }
        pool.wait();
    }
    const char* names[4] = {"mu_p", "lambda_b", "mu_b", "lambda_p"};
    for (int k = 0; k < 4; ++k) {
        double mean = 0.0;
        for (int s = 0; s < n_seeds; ++s) mean += cesaro[s][k];
        mean /= n_seeds;
        double var = 0.0;
        for (int s = 0; s < n_seeds; ++s) var += (cesaro[s][k] - mean) * (cesaro[s][k] - mean);
        double sem = std::sqrt(var / (n_seeds - 1)) / std::sqrt(double(n_seeds));
        double err = std::abs(mean - (lam - 0.5));
        ck.require(err <= 3.0 * sem, std::string(names[k]) + " within 3 sigma");
        ck.note(names[k], err);
        ck.note("3sem", 3.0 * sem);
    }
    for (int s = 0; s < n_seeds; ++s) {
        ck.require(std::abs(extremal[s][0] - lam) <= 5e-2, "mu_bp -> lam - essinf");
        ck.require(std::abs(extremal[s][1] - (lam - 1.0)) <= 5e-2, "lambda_bp -> lam - esssup");
    }
    ck.note("mu_bp_err0", std::abs(extremal[0][0] - lam));
}

inline void c08_floquet_diagnostics(Check& ck, std::uint64_t seed) {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    auto heat = const_field(1.0, 0.0, 0.0);
    // separation rate against the discrete spectral gap
    {
        StepScheme sch{1.0, 2e-4, true};
        std::vector<double> a(m.n_interior), b(m.n_interior);
        for (int i = 0; i < m.n_interior; ++i) {
            a[i] = std::sin(kPi * m.nodes[i]);
            b[i] = a[i] + 0.4 * std::sin(2.0 * kPi * m.nodes[i]);
        }
        auto r = separation_rate(heat, m, sch, a, b, 0.9, 10);
        double gap = 2.0 / (m.dx * m.dx) * (std::cos(kPi * m.dx) - std::cos(2.0 * kPi * m.dx));
        ck.require(!r.lower_bound_only && std::abs(r.gamma - gap) <= 0.10 * gap,
                   "separation rate within 10% of the gap");
        ck.note("gamma", r.gamma);
        ck.note("gap", gap);
    }
    // Harnack quotient: finite and horizon-stable across the field suite
    {
        StepScheme sch{1.0, 1e-3, true};
        std::vector<FieldSpec> specs(3);
        specs[0].kind = FieldKind::constant;
        specs[1].kind = FieldKind::periodic;
        specs[1].period = 1.0;
        specs[1].sigma = SigmaSignal::cosine(0.5, 1.0, 1.0);
        specs[1].b_mod_amp = 0.4;
        specs[2].kind = FieldKind::log_oscillatory;
        specs[2].sigma = SigmaSignal::log_oscillatory(1.0);
        for (auto& sp : specs) {
            auto f = make_field(sp);
            auto c1 = harnack_constant(f, m, sch, 3, 0.25, 2.0, seed);
            auto c2 = harnack_constant(f, m, sch, 3, 0.25, 4.0, seed);
            ck.require(std::isfinite(c1.C) && c2.C <= c1.C * 1.05 + 1e-9,
                       "harnack horizon-stable");
        }
        auto cheat = harnack_constant(heat, m, sch, 3, 1.0, 2.5, seed);
        ck.require(cheat.C <= 1.0 + 1e-6, "frozen-heat collapse");
    }
    // unit-window bound and Holder fit on a PDE trace and a synthetic trace
    {
        double lam = dirichlet_eigen(heat, m).value;
        StepScheme sch{1.0, 1e-3, true};
        FieldSpec sp;
        sp.kind = FieldKind::periodic;
        sp.period = 1.0;
        sp.sigma = SigmaSignal::cosine(1.0, 1.0, 1.0);
        auto f = make_field(sp);
        auto tr = compute_bundle(f, m, sch, IntervalTag::Rplus, 0.0, 150.0, 2.0, 10);
        auto syn = make_synthetic_trace(lam, SigmaSignal::log_oscillatory(1.0), 0.0, 2e4, 0.01,
                                        IntervalTag::Rplus);
        for (const BetaTrace* t : {&tr, &syn}) {
            double logC = unit_window_log_bound(*t);
            ck.require(logC <= lam + 2.0 + 1.0, "unit-window bound at comparison scale");
            auto fit = holder_fit(*t);
            ck.require(fit.bound_ok && fit.alpha > 0.0, "holder fit");
        }
    }
}

inline void c09_kpp_dichotomy(Check& ck, std::uint64_t) {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    StepScheme sch{1.0, 1e-3, true};
    auto datum = make_initial_state(m, 0.0).profile;
    for (double& v : datum) v *= 0.2;

    auto run = [&](const CoefficientField& f, double horizon) {
        auto fs = NonlinearitySpec::make(f, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
        PersistenceOptions opt;
        opt.horizon = horizon;
        return persistence_verdict(f, fs, datum, m, sch, opt);
    };
    auto vp = run(const_field(1.0, 0.0, kPi * kPi + 0.5), 100.0);
    ck.require(vp.verdict == Verdict::persistent && vp.consistent, "supercritical persists");
    ck.require(vp.floor > 0.01, "persistent floor");
    auto ve = run(const_field(1.0, 0.0, kPi * kPi - 0.5), 100.0);
    ck.require(ve.verdict == Verdict::extinct && ve.consistent, "subcritical dies");
    ck.require(std::abs(ve.decay_rate + 0.5) <= 0.05, "subcritical decay rate");
    FieldSpec sp;
    sp.kind = FieldKind::log_oscillatory;
    sp.c = SpatialProfile::constant(kPi * kPi);
    sp.sigma = SigmaSignal::log_oscillatory(1.0);
    auto vo = run(make_field(sp), 120.0);
    ck.require(vo.verdict == Verdict::extinct && vo.consistent, "oscillatory extinction");
    ck.require(vo.mu_bp_plus > 0.5, "extremal eigenvalue positive");
    ck.note("mu_bp_osc", vo.mu_bp_plus);
}

inline void c10_entire_and_uniqueness(Check& ck, std::uint64_t) {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    StepScheme sch{1.0, 1e-3, true};
    double lam = laplacian_principal_eigenvalue(m);
    std::vector<double> n_list{4, 8, 16, 24, 32, 44};

    FieldSpec neg;
    neg.kind = FieldKind::periodic;
    neg.period = 1.0;
    neg.sigma = SigmaSignal::cosine(lam + 0.5, 1.0, 1.0);
    auto f_neg = make_field(neg);
    auto fs_neg = NonlinearitySpec::make(f_neg, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
    auto pb = entire_solution_pullback(f_neg, fs_neg, n_list, 0.0, m, sch);
    ck.require(pb.monotone, "pullback monotone");
    ck.require(pb.gaps.back() < 1e-6, "pullback gap below 1e-6");
    ck.require(pb.interior_floor > 0.0, "interior floor positive");
    ck.note("gap", pb.gaps.back());

    std::vector<double> half(m.n_interior, fs_neg.M / 2.0);
    auto gaps = ancient_uniqueness_gap(f_neg, fs_neg, std::vector<double>{10, 25, 40}, half, 0.0,
                                       m, sch);
    ck.require(gaps.back() < 1e-6, "two pullback data converge");
    ck.note("uniq_gap", gaps.back());

    FieldSpec pos;
    pos.kind = FieldKind::periodic;
    pos.period = 1.0;
    pos.sigma = SigmaSignal::cosine(lam - 0.5, 1.0, 1.0);
    auto f_pos = make_field(pos);
    auto fs_pos = NonlinearitySpec::make(f_pos, LogisticForm::quadratic,
                                         SpatialProfile::constant(1.0));
    auto pb2 = entire_solution_pullback(f_pos, fs_pos, n_list, 0.0, m, sch);
    double sup = 0.0;
    for (double v : pb2.window_final.back()) sup = std::max(sup, v);
    ck.require(sup < 1e-6, "sign-reversed case has no entire solution");
    ck.note("reversed_sup", sup);
}

inline void c11_maximum_principle(Check& ck, std::uint64_t) {
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);
    StepScheme sch{1.0, 1e-3, true};
    std::vector<double> T_list{5, 10, 20, 30, 40};
    std::vector<double> u0(m.n_interior, 1.0);
    double lam = laplacian_principal_eigenvalue(m);

    auto r_dec = mp_decay_test(const_field(1.0, 0.0, kPi * kPi - 0.5), m, sch, u0, T_list);
    double mu_b = lam - (kPi * kPi - 0.5);
    ck.require(!r_dec.inconclusive && std::abs(-r_dec.fitted_rate - mu_b) <= 0.10 * mu_b,
               "decay matches +mu_b");
    ck.note("rate_dec", r_dec.fitted_rate);
    auto r_gro = mp_decay_test(const_field(1.0, 0.0, kPi * kPi + 0.5), m, sch, u0, T_list);
    double mu_b2 = lam - (kPi * kPi + 0.5);
    ck.require(!r_gro.inconclusive && std::abs(-r_gro.fitted_rate - mu_b2) <= 0.10 * (-mu_b2),
               "growth matches -mu_b");
    ck.note("rate_gro", r_gro.fitted_rate);
    auto r_crit = mp_decay_test(const_field(1.0, 0.0, kPi * kPi), m, sch, u0, T_list);
    ck.require(r_crit.inconclusive, "critical case flagged inconclusive");
}

inline void c12_perturbation_stability(Check& ck, std::uint64_t) {
    const double delta = 1e-2, K = 50.0;
    auto m = build_mesh(Domain1D(0.0, 1.0), 99);

    // zero-order, drift and diffusion perturbations of a frozen operator
    double base = dirichlet_eigen(const_field(1.0, 0.3, 0.7), m).value;
    double dc = dirichlet_eigen(const_field(1.0, 0.3, 0.7 + delta), m).value;
    double db = dirichlet_eigen(const_field(1.0, 0.3 + delta, 0.7), m).value;
    double da = dirichlet_eigen(const_field(1.0 + delta, 0.3, 0.7), m).value;
    ck.require(std::abs(dc - base) <= K * delta, "c perturbation");
    ck.require(std::abs(db - base) <= K * delta, "b perturbation");
    ck.require(std::abs(da - base) <= K * delta, "a perturbation");
    ck.note("dc", std::abs(dc - base));
    ck.note("da", std::abs(da - base));

    // pipeline-level coefficient perturbation (periodic signal, PDE path)
    {
        auto make_periodic = [&](double shift) {
            FieldSpec sp;
            sp.kind = FieldKind::periodic;
            sp.period = 1.0;
            sp.sigma = SigmaSignal::cosine(1.0 + shift, 1.0, 1.0);
            return make_field(sp);
        };
        ReportOptions opt{{5, 10, 20}, 1, 0.4};
        auto r0 = pde_report(make_periodic(0.0), m, 1e-3, 2.0, 40.0, 40.0, 20, opt);
        auto r1 = pde_report(make_periodic(delta), m, 1e-3, 2.0, 40.0, 40.0, 20, opt);
        auto e0 = all_entries(r0);
        auto e1 = all_entries(r1);
        for (std::size_t k = 0; k < e0.size(); ++k) {
            if (!e0[k].second->has_value()) continue;
            double d = std::abs((*e1[k].second)->value - (*e0[k].second)->value);
            ck.require(d <= K * delta, std::string("pipeline ") + e0[k].first);
        }
    }

    // domain perturbation at Hausdorff distance delta: continuity + monotone sign
    auto f = const_field(1.0, 0.0, 0.5);
    auto m_shrunk = build_mesh(Domain1D(0.01, 0.99), 97);  // dx = 0.01 preserved
    double lam_full = dirichlet_eigen(f, m).value;
    auto f_shrunk = const_field(1.0, 0.0, 0.5, Domain1D(0.01, 0.99));
    double lam_shrunk = dirichlet_eigen(f_shrunk, m_shrunk).value;
    ck.require(lam_shrunk > lam_full, "domain monotonicity sign");
    ck.require(std::abs(lam_shrunk - lam_full) <= K * delta, "domain continuity");
    ck.note("domain_shift", lam_shrunk - lam_full);
}

}  // namespace verify_detail

inline std::vector<CriterionResult> verify_suite(std::uint64_t seed = 0,
                                                 const std::string& only = "",
                                                 std::FILE* stream = stdout) {
    using verify_detail::Check;
    struct Row {
        const char* id;
        const char* name;
        const char* modules;
        void (*fn)(Check&, std::uint64_t);
    };
    const Row rows[] = {
        {"C01", "elliptic-oracle", "eigensolve", verify_detail::c01_elliptic_oracle},
        {"C02", "time-independent-equality", "eigensolve growthrate floquet",
         verify_detail::c02_time_independent},
        {"C03", "periodic-equality", "eigensolve growthrate", verify_detail::c03_periodic},
        {"C04", "six-notion-separation", "growthrate", verify_detail::c04_six_notion_separation},
        {"C05", "ordering-chain-random-suite", "growthrate", verify_detail::c05_random_suite},
        {"C06", "quasi-periodic-collapse", "growthrate",
         verify_detail::c06_quasi_periodic_collapse},
        {"C07", "random-stationary-ergodic", "growthrate coeffield",
         verify_detail::c07_random_stationary},
        {"C08", "floquet-diagnostics", "floquet", verify_detail::c08_floquet_diagnostics},
        {"C09", "kpp-dichotomy", "kpp", verify_detail::c09_kpp_dichotomy},
        {"C10", "entire-solutions-uniqueness", "kpp", verify_detail::c10_entire_and_uniqueness},
        {"C11", "maximum-principle", "kpp", verify_detail::c11_maximum_principle},
        {"C12", "perturbation-stability", "eigensolve growthrate",
         verify_detail::c12_perturbation_stability},
    };
    // stated per-criterion runtime budgets (seconds); 0 = unbounded
    const double budget[] = {1, 30, 60, 120, 0, 0, 0, 0, 120, 0, 0, 0};

    std::vector<CriterionResult> results;
    int idx = -1;
    for (const Row& row : rows) {
        ++idx;
        if (!only.empty() && std::string(row.modules).find(only) == std::string::npos) continue;
        CriterionResult r;
        r.id = row.id;
        r.name = row.name;
        r.modules = row.modules;
        Check ck;
        auto t0 = std::chrono::steady_clock::now();
        try {
            row.fn(ck, seed);
        } catch (const std::exception& ex) {
            ck.pass = false;
            ck.detail << "[exception: " << ex.what() << "]";
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget[idx] > 0.0 && r.seconds > budget[idx]) {
            ck.pass = false;
            ck.detail << "[runtime budget " << budget[idx] << "s exceeded]";
        }
        r.pass = ck.pass;
        r.detail = ck.detail.str();
        results.push_back(r);
        if (stream)
            std::fprintf(stream, "%s %-28s %s  (%6.2f s)  %s\n", r.id, r.name,
                         r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    }
    return results;
}

inline json verify_results_json(const std::vector<CriterionResult>& rs) {
    json rows = json::array();
    for (auto& r : rs)
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"modules", r.modules},
                        {"pass", r.pass},
                        {"seconds", r.seconds},
                        {"detail", r.detail}});
    return {{"schema_version", kSchemaVersion}, {"criteria", rows}};
}

}  // namespace floqrate
