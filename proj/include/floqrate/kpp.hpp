// Semilinear logistic problems driven by the linear machinery: persistence
// dichotomy, pullback construction of bounded entire solutions, ancient
// uniqueness gaps, and the linear decay test behind the maximum principle.
//
// The reaction is split as linearization + strictly negative remainder; the
// remainder is folded in by implicit pointwise weighting (divide, never
// subtract), so trajectories stay in [0, max(M, |u0|)] for any dt with
// dt sup c < 1.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "floqrate/eigensolve.hpp"
#include "floqrate/growthrate.hpp"

namespace floqrate {

enum class LogisticForm { quadratic, cubic };  // c s - n s^2  /  c s - n s^3

struct NonlinearitySpec {
    LogisticForm form = LogisticForm::quadratic;
    SpatialProfile n_prof = SpatialProfile::constant(1.0);  // absorption coefficient n(x)
    double n_min = 1.0;
    double M = 1.0;  // saturation: f(t,x,s) <= 0 for s >= M

    static NonlinearitySpec make(const CoefficientField& field, LogisticForm form,
                                 SpatialProfile n_prof) {
        NonlinearitySpec sp;
        sp.form = form;
        sp.n_prof = n_prof;
        sp.n_min = n_prof.min_on(field.domain);
        if (!(sp.n_min > 0.0))
            throw std::invalid_argument("NonlinearitySpec: absorption must be positive");
        double c_sup = std::max(field.bounds.c_sup, 0.0);
        sp.M = form == LogisticForm::quadratic ? c_sup / sp.n_min
                                               : std::sqrt(c_sup / sp.n_min);
        if (sp.M <= 0.0) sp.M = 1.0;
        return sp;
    }

    double f(double c, double n, double s) const {
        return form == LogisticForm::quadratic ? c * s - n * s * s : c * s - n * s * s * s;
    }
};

struct KppTrajectory {
    std::vector<double> times, sup_u, inf_probe;
    std::map<std::size_t, std::vector<double>> profiles;  // record index -> profile
    std::vector<double> final_profile;
};

namespace detail {

// One IMEX step: implicit linear part (zero-order term included), then the
// absorption remainder by implicit weighting u+ = w / (1 + dt n w^{p-1}).
class KppStepper {
  public:
    KppStepper(const CoefficientField& field, const NonlinearitySpec& fspec, const Mesh& mesh,
               const StepScheme& scheme)
        : ev_(field, mesh, scheme), fspec_(&fspec), dt_(scheme.dt) {
        if (scheme.theta != 1.0)
            throw std::invalid_argument("KppStepper: the semilinear path uses theta = 1");
        n_nodes_.resize(mesh.n_interior);
        for (int i = 0; i < mesh.n_interior; ++i)
            n_nodes_[i] = fspec.n_prof.value(mesh.nodes[i], field.domain);
    }

    // state is an unnormalized nonnegative profile at time t
    void step(std::vector<double>& u, double& t) {
        NormalizedState st;
        st.profile = u;
        double scale = 0.0;
        for (double v : st.profile) scale = std::max(scale, v);
        if (scale == 0.0) {  // zero state stays zero
            t += dt_;
            return;
        }
        for (double& v : st.profile) v /= scale;
        st.t = t;
        st.log_mass = 0.0;
        ev_.step(st);
        double mass = scale * std::exp(st.log_mass);
        for (std::size_t i = 0; i < u.size(); ++i) {
            double w = st.profile[i] * mass;
            double weight = fspec_->form == LogisticForm::quadratic
                                ? 1.0 + dt_ * n_nodes_[i] * w
                                : 1.0 + dt_ * n_nodes_[i] * w * w;
            u[i] = w / weight;
        }
        t += dt_;
    }

  private:
    Evolver ev_;
    const NonlinearitySpec* fspec_;
    double dt_;
    std::vector<double> n_nodes_;
};

}  // namespace detail

inline KppTrajectory evolve_kpp(const CoefficientField& field, const NonlinearitySpec& fspec,
                                std::vector<double> u0, double t0, double t1, const Mesh& mesh,
                                const StepScheme& scheme, std::size_t record_stride = 100,
                                std::size_t profile_every = 0, double probe_fraction = 0.6) {
    if (!(t1 > t0)) throw std::invalid_argument("evolve_kpp: t1 must exceed t0");
    for (double v : u0)
        if (v < 0.0) throw std::invalid_argument("evolve_kpp: datum must be nonnegative");
    const int n = mesh.n_interior;
    if (static_cast<int>(u0.size()) != n)
        throw std::invalid_argument("evolve_kpp: datum length mismatch");
    const int lo = static_cast<int>(std::floor(n * (0.5 - probe_fraction / 2.0)));
    const int hi = static_cast<int>(std::ceil(n * (0.5 + probe_fraction / 2.0)));

    detail::KppStepper stepper(field, fspec, mesh, scheme);
    auto n_steps = static_cast<std::size_t>(std::llround((t1 - t0) / scheme.dt));
    KppTrajectory out;
    double t = t0;
    auto record = [&](std::size_t rec_idx) {
        out.times.push_back(t);
        double s = 0.0, p = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            s = std::max(s, u0[i]);
            if (i >= lo && i < hi) p = std::min(p, u0[i]);
        }
        out.sup_u.push_back(s);
        out.inf_probe.push_back(p);
        if (profile_every > 0 && rec_idx % profile_every == 0) out.profiles.emplace(rec_idx, u0);
    };
    record(0);
    std::size_t rec = 0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        stepper.step(u0, t);
        t = t0 + scheme.dt * static_cast<double>(k);
        if (k % record_stride == 0) record(++rec);
    }
    out.final_profile = std::move(u0);
    return out;
}

enum class Verdict { persistent, extinct, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::persistent: return "persistent";
        case Verdict::extinct: return "extinct";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct PersistenceVerdict {
    Verdict verdict = Verdict::inconclusive;
    double floor = 0.0;        // min over probe nodes of the late-time infimum
    double mu_bp_plus = 0.0;   // linearized forward-interval eigenvalue
    double decay_rate = 0.0;   // fitted rate of ln sup u (extinct branch)
    bool consistent = false;   // verdict matches the sign of mu_bp_plus
    double margin = 0.0;
};

struct PersistenceOptions {
    double horizon = 100.0;
    double floor_tol = 1e-3;
    double ext_tol = 1e-8;
    double margin = 0.05;  // |mu_bp| below this is numerically undecidable
    std::vector<double> T_list{4, 8, 16, 24};
    double burn_in = 2.0;
    std::size_t record_stride = 100;
};

inline PersistenceVerdict persistence_verdict(const CoefficientField& field,
                                              const NonlinearitySpec& fspec,
                                              const std::vector<double>& u0, const Mesh& mesh,
                                              const StepScheme& scheme,
                                              const PersistenceOptions& opt = {}) {
    auto traj = evolve_kpp(field, fspec, u0, 0.0, opt.horizon, mesh, scheme, opt.record_stride);

    PersistenceVerdict out;
    out.margin = opt.margin;
    // floor over the last 20% of the horizon
    std::size_t n_rec = traj.times.size();
    std::size_t tail0 = n_rec - std::max<std::size_t>(n_rec / 5, 2);
    double fl = std::numeric_limits<double>::infinity();
    for (std::size_t k = tail0; k < n_rec; ++k) fl = std::min(fl, traj.inf_probe[k]);
    out.floor = fl;

    // fitted decay rate of ln sup u over the second half
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t k = n_rec / 2; k < n_rec; ++k) {
        if (traj.sup_u[k] <= 0.0) continue;
        double x = traj.times[k], y = std::log(traj.sup_u[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 4) throw std::invalid_argument("persistence_verdict: horizon too short for the fit");
    out.decay_rate = (static_cast<double>(m) * sxy - sx * sy) /
                     (static_cast<double>(m) * sxx - sx * sx);

    Verdict dynamic;
    if (fl > opt.floor_tol)
        dynamic = Verdict::persistent;
    else if (traj.sup_u.back() < opt.ext_tol && out.decay_rate < 0.0)
        dynamic = Verdict::extinct;
    else
        dynamic = Verdict::inconclusive;

    // linearized eigenvalue from the growth-rate pipeline (Richardson pair)
    double span = std::min(opt.horizon, 2.0 * opt.T_list.back() + 10.0);
    span = std::max(span, 2.0 * opt.T_list.back());
    auto run = [&](double dt_run, std::size_t stride) {
        StepScheme sch{1.0, dt_run, true};
        auto tr = compute_bundle(field, mesh, sch, IntervalTag::Rplus, 0.0, span, opt.burn_in,
                                 stride);
        return global_growth_rates(tr, opt.T_list).lgr;
    };
    auto fine = run(scheme.dt, 20);
    auto coarse = run(2.0 * scheme.dt, 10);
    out.mu_bp_plus = -detail::richardson_combine(fine, coarse).value;

    // a near-critical eigenvalue cannot be decided numerically: downgrade
    if (std::abs(out.mu_bp_plus) <= opt.margin) {
        out.verdict = Verdict::inconclusive;
        out.consistent = true;
    } else {
        out.verdict = dynamic;
        out.consistent = (out.verdict == Verdict::persistent && out.mu_bp_plus < -opt.margin) ||
                         (out.verdict == Verdict::extinct && out.mu_bp_plus > opt.margin);
    }
    return out;
}

struct PullbackResult {
    std::vector<double> starts;                     // pullback start offsets n
    std::vector<std::vector<double>> window_final;  // profile at the window anchor per start
    std::vector<double> gaps;                       // sup |u_{k+1} - u_k| at the anchor
    bool monotone = true;                           // u_{k+1} <= u_k pointwise
    double interior_floor = 0.0;                    // floor of the deepest profile on the probe set
};

// Evolve from t = -n with datum == M for each n; compare at the window anchor.
inline PullbackResult entire_solution_pullback(const CoefficientField& field,
                                               const NonlinearitySpec& fspec,
                                               std::span<const double> n_list, double t_anchor,
                                               const Mesh& mesh, const StepScheme& scheme,
                                               double probe_fraction = 0.6) {
    if (n_list.size() < 2)
        throw std::invalid_argument("entire_solution_pullback: need at least two starts");
    PullbackResult out;
    const int n = mesh.n_interior;
    for (double back : n_list) {
        if (!(back > 0.0) || -back >= t_anchor)
            throw std::invalid_argument("entire_solution_pullback: bad start offset");
        std::vector<double> u(n, fspec.M);
        auto traj = evolve_kpp(field, fspec, u, t_anchor - back, t_anchor, mesh, scheme,
                               1u << 30, 0, probe_fraction);
        out.starts.push_back(back);
        out.window_final.push_back(traj.final_profile);
    }
    for (std::size_t k = 1; k < out.window_final.size(); ++k) {
        double gap = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = out.window_final[k][i] - out.window_final[k - 1][i];
            gap = std::max(gap, std::abs(d));
            if (d > 1e-12) out.monotone = false;
        }
        out.gaps.push_back(gap);
    }
    const int lo = static_cast<int>(std::floor(n * (0.5 - probe_fraction / 2.0)));
    const int hi = static_cast<int>(std::ceil(n * (0.5 + probe_fraction / 2.0)));
    double fl = std::numeric_limits<double>::infinity();
    for (int i = lo; i < hi; ++i) fl = std::min(fl, out.window_final.back()[i]);
    out.interior_floor = fl;
    return out;
}

// Pullback families from datum M and from a second datum; their gap at the
// anchor must vanish as the start recedes when the absorption is strict.
inline std::vector<double> ancient_uniqueness_gap(const CoefficientField& field,
                                                  const NonlinearitySpec& fspec,
                                                  std::span<const double> n_list,
                                                  const std::vector<double>& second_datum,
                                                  double t_anchor, const Mesh& mesh,
                                                  const StepScheme& scheme) {
    const int n = mesh.n_interior;
    if (static_cast<int>(second_datum.size()) != n)
        throw std::invalid_argument("ancient_uniqueness_gap: datum length mismatch");
    for (double v : second_datum)
        if (!(v >= 0.0) || v > 4.0 * fspec.M + 1.0)
            throw std::invalid_argument("ancient_uniqueness_gap: datum violates bounds");
    std::vector<double> gaps;
    for (double back : n_list) {
        std::vector<double> uM(n, fspec.M);
        auto a = evolve_kpp(field, fspec, uM, t_anchor - back, t_anchor, mesh, scheme, 1u << 30);
        auto b = evolve_kpp(field, fspec, second_datum, t_anchor - back, t_anchor, mesh, scheme,
                            1u << 30);
        double gap = 0.0;
        for (int i = 0; i < n; ++i)
            gap = std::max(gap, std::abs(a.final_profile[i] - b.final_profile[i]));
        gaps.push_back(gap);
    }
    return gaps;
}

struct MpDecayResult {
    std::vector<double> T_values, log_sup_at_zero;
    double fitted_rate = 0.0;  // slope of ln sup u(0) against the start depth T
    bool inconclusive = false;
};

// Linear problem from t = -T with a fixed datum: the decay (growth) of
// sup u(0) as T grows tracks the backward-interval eigenvalue.
inline MpDecayResult mp_decay_test(const CoefficientField& field, const Mesh& mesh,
                                   const StepScheme& scheme, const std::vector<double>& u0,
                                   std::span<const double> T_list, double rate_margin = 0.02) {
    if (T_list.size() < 3) throw std::invalid_argument("mp_decay_test: need at least 3 depths");
    MpDecayResult out;
    for (double T : T_list) {
        auto n_steps = static_cast<std::size_t>(std::llround(T / scheme.dt));
        auto tr = evolve_normalized(field, mesh, scheme, u0, -T, 0.0, n_steps);
        double m0 = *std::max_element(u0.begin(), u0.end());
        out.T_values.push_back(T);
        out.log_sup_at_zero.push_back(tr.beta.back() + std::log(m0));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto m = static_cast<double>(T_list.size());
    for (std::size_t k = 0; k < T_list.size(); ++k) {
        sx += out.T_values[k];
        sy += out.log_sup_at_zero[k];
        sxx += out.T_values[k] * out.T_values[k];
        sxy += out.T_values[k] * out.log_sup_at_zero[k];
    }
    out.fitted_rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.inconclusive = std::abs(out.fitted_rate) <= rate_margin;
    return out;
}

}  // namespace floqrate
