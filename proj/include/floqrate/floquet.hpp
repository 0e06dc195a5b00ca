// Discrete principal bundle via spin-up from a positive datum, plus the
// diagnostics the bundle theory guarantees: exponential separation rate,
// same-time Harnack ratio, unit-window norm equivalence and a Holder fit
// of beta.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "floqrate/stepper.hpp"

namespace floqrate {

// Bundle trace on [t_lo, t_hi]: spin up from t_lo - burn_in so the profile
// has geometrically aligned with the bundle by the time recording starts,
// then re-anchor beta(0) = 0 (beta(t_hi) = 0 for backward-interval traces).
inline BetaTrace compute_bundle(const CoefficientField& field, const Mesh& mesh,
                                const StepScheme& scheme, IntervalTag tag, double t_lo,
                                double t_hi, double burn_in, std::size_t record_stride,
                                std::size_t profile_every = 0, double gamma_hint = 0.0) {
    if (!(burn_in > 0.0)) throw std::invalid_argument("compute_bundle: burn_in must be positive");
    if (!(t_hi > t_lo)) throw std::invalid_argument("compute_bundle: empty window");
    const double dt = scheme.dt;
    const auto burn_steps = static_cast<std::size_t>(std::ceil(burn_in / dt - 1e-12));
    const double t_begin = t_lo - dt * static_cast<double>(burn_steps);

    NormalizedState st = make_initial_state(mesh, t_begin);
    Evolver ev(field, mesh, scheme);
    for (std::size_t k = 1; k <= burn_steps; ++k) {
        ev.step(st);
        st.t = t_begin + dt * static_cast<double>(k);
    }

    BetaTrace tr = evolve_normalized(field, mesh, scheme, st.profile, t_lo, t_hi, record_stride,
                                     profile_every);
    tr.tag = tag;
    tr.burn_in_used = dt * static_cast<double>(burn_steps);
    double anchor = tag == IntervalTag::Rminus ? std::min(0.0, t_hi) : 0.0;
    if (anchor >= t_lo && anchor <= t_hi) tr.anchor_at(anchor);
    if (gamma_hint > 0.0 && burn_in < 5.0 / gamma_hint)
        tr.warnings.push_back("burn_in shorter than 5/gamma_estimate");
    return tr;
}

struct SeparationRate {
    double gamma = 0.0;
    bool lower_bound_only = false;
    std::size_t fit_points = 0;
};

// Fitted exponential decay rate of the spread sup(u_a/u_b)/inf(u_a/u_b) - 1
// between two evolutions of the same operator.
inline SeparationRate separation_rate(const CoefficientField& field, const Mesh& mesh,
                                      const StepScheme& scheme, std::vector<double> u0_a,
                                      std::vector<double> u0_b, double horizon,
                                      std::size_t record_stride = 1) {
    const int n = mesh.n_interior;
    if (static_cast<int>(u0_a.size()) != n || static_cast<int>(u0_b.size()) != n)
        throw std::invalid_argument("separation_rate: datum length mismatch");
    NormalizedState sa, sb;
    sa.profile = std::move(u0_a);
    sb.profile = std::move(u0_b);
    normalize_state(sa);
    normalize_state(sb);
    double prop = 0.0;
    for (int i = 0; i < n; ++i) prop = std::max(prop, std::abs(sa.profile[i] - sb.profile[i]));
    if (prop < 1e-12)
        throw std::invalid_argument("separation_rate: proportional initial data");

    Evolver ea(field, mesh, scheme), eb(field, mesh, scheme);
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / scheme.dt));
    std::vector<double> times, logspread;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        ea.step(sa);
        eb.step(sb);
        if (k % record_stride) continue;
        double t = scheme.dt * static_cast<double>(k);
        double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double r = sa.profile[i] / sb.profile[i];
            rmax = std::max(rmax, r);
            rmin = std::min(rmin, r);
        }
        double spread = rmax / rmin - 1.0;
        if (spread < 1e-13) break;
        times.push_back(t);
        logspread.push_back(std::log(spread));
    }
    SeparationRate out;
    if (times.empty()) throw std::runtime_error("separation_rate: spread vanished at once");
    // least squares on the second half of the usable record
    double t_mid = times.back() / 2.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_mid) continue;
        sx += times[i];
        sy += logspread[i];
        sxx += times[i] * times[i];
        sxy += times[i] * logspread[i];
        ++m;
    }
    if (m < 4) {
        // data exhausted before the fit window: report the decay already seen
        out.gamma = (logspread.front() - std::log(1e-13)) / times.back();
        out.lower_bound_only = true;
        out.fit_points = m;
        return out;
    }
    double denom = static_cast<double>(m) * sxx - sx * sx;
    double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    out.gamma = -slope;
    out.fit_points = m;
    if (!(out.gamma > 0.0)) throw std::runtime_error("separation_rate: fitted rate not positive");
    return out;
}

// Cheap coarse-resolution separation estimate used to size burn-in windows.
inline double estimate_gamma(const CoefficientField& field, const Mesh& mesh, double dt = 2e-3,
                             double horizon = 20.0) {
    int n_coarse = std::min(mesh.n_interior, 49);
    Mesh coarse = build_mesh(mesh.domain, n_coarse);
    StepScheme sch{1.0, dt, true};
    NormalizedState s = make_initial_state(coarse, 0.0);
    std::vector<double> a = s.profile, b = s.profile;
    for (int i = 0; i < n_coarse; ++i)
        b[i] *= 1.0 + 0.5 * std::sin(2.0 * kPi * (i + 1) / (n_coarse + 1));
    auto r = separation_rate(field, coarse, sch, a, b, horizon, 5);
    return r.gamma;
}

inline double auto_burn_in(const CoefficientField& field, const Mesh& mesh) {
    double g = estimate_gamma(field, mesh);
    return 8.0 / std::max(g, 1e-3);
}

struct HarnackEstimate {
    double C = 1.0;
    std::size_t trials = 0;
};

// Empirical same-time Harnack quotient bound over the given positive data.
inline HarnackEstimate harnack_constant(const CoefficientField& field, const Mesh& mesh,
                                        const StepScheme& scheme,
                                        const std::vector<std::vector<double>>& data, double s0,
                                        double horizon, std::size_t record_stride = 10) {
    if (data.size() < 2) throw std::invalid_argument("harnack_constant: need at least 2 trials");
    if (!(horizon > s0)) throw std::invalid_argument("harnack_constant: horizon must exceed s0");
    const int n = mesh.n_interior;
    const std::size_t trials = data.size();

    std::vector<std::vector<std::vector<double>>> snaps(trials);
    for (std::size_t tr = 0; tr < trials; ++tr) {
        NormalizedState st;
        st.profile = data[tr];
        normalize_state(st);
        Evolver ev(field, mesh, scheme);
        auto n_steps = static_cast<std::size_t>(std::llround(horizon / scheme.dt));
        for (std::size_t k = 1; k <= n_steps; ++k) {
            ev.step(st);
            double t = scheme.dt * static_cast<double>(k);
            if (k % record_stride == 0 && t >= s0) snaps[tr].push_back(st.profile);
        }
    }
    HarnackEstimate out;
    out.trials = trials;
    for (std::size_t i = 0; i < trials; ++i)
        for (std::size_t j = i + 1; j < trials; ++j)
            for (std::size_t k = 0; k < snaps[i].size(); ++k) {
                double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
                for (int q = 0; q < n; ++q) {
                    double r = snaps[i][k][q] / snaps[j][k][q];
                    rmax = std::max(rmax, r);
                    rmin = std::min(rmin, r);
                }
                out.C = std::max(out.C, rmax / rmin);
            }
    return out;
}

// Random-trial variant, reproducible from the seed.
inline HarnackEstimate harnack_constant(const CoefficientField& field, const Mesh& mesh,
                                        const StepScheme& scheme, std::size_t trials, double s0,
                                        double horizon, std::uint64_t seed = 0,
                                        std::size_t record_stride = 10) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u01(0.05, 1.0);
    std::vector<std::vector<double>> data(trials);
    for (auto& u : data) {
        u.resize(mesh.n_interior);
        for (double& v : u) v = u01(rng);
    }
    return harnack_constant(field, mesh, scheme, data, s0, horizon, record_stride);
}

// exp of the largest |beta(s+t) - beta(s)| over windows t in (0, 1].
inline double unit_window_log_bound(const BetaTrace& tr) {
    auto max_lag = static_cast<std::size_t>(std::floor(1.0 / tr.dt_record + 1e-9));
    max_lag = std::min(max_lag, tr.size() - 1);
    double worst = 0.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag)
        for (std::size_t i = 0; i + lag < tr.size(); ++i)
            worst = std::max(worst, std::abs(tr.beta[i + lag] - tr.beta[i]));
    return worst;
}

struct HolderFit {
    double alpha = 1.0;
    double H = 0.0;
    bool bound_ok = true;  // all sampled pairs within 1.05 H t^alpha
};

// Fit max_s |beta(s+t) - beta(s)| <= H t^alpha over t in (0, 1].
inline HolderFit holder_fit(const BetaTrace& tr) {
    if (tr.span() < 100.0)
        throw std::invalid_argument("holder_fit: trace must cover at least 100 unit windows");
    auto max_lag = static_cast<std::size_t>(std::floor(1.0 / tr.dt_record + 1e-9));
    max_lag = std::min(max_lag, tr.size() - 1);
    if (max_lag < 2) throw std::invalid_argument("holder_fit: record grid too coarse");

    // log-spaced lags
    std::vector<std::size_t> lags;
    for (int j = 0; j < 24; ++j) {
        auto lag = static_cast<std::size_t>(
            std::llround(std::pow(static_cast<double>(max_lag), j / 23.0)));
        lag = std::max<std::size_t>(1, std::min(lag, max_lag));
        if (lags.empty() || lag != lags.back()) lags.push_back(lag);
    }
    std::vector<double> lt, ld, dvals, tvals;
    for (auto lag : lags) {
        double d = 0.0;
        for (std::size_t i = 0; i + lag < tr.size(); ++i)
            d = std::max(d, std::abs(tr.beta[i + lag] - tr.beta[i]));
        double t = tr.dt_record * static_cast<double>(lag);
        tvals.push_back(t);
        dvals.push_back(d);
        if (d > 0.0) {
            lt.push_back(std::log(t));
            ld.push_back(std::log(d));
        }
    }
    HolderFit fit;
    if (lt.size() < 2) {  // flat trace
        fit.alpha = 1.0;
        fit.H = 0.0;
        return fit;
    }
    double n = static_cast<double>(lt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sx += lt[i];
        sy += ld[i];
        sxx += lt[i] * lt[i];
        sxy += lt[i] * ld[i];
    }
    fit.alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(fit.alpha > 0.0)) fit.alpha = 1e-3;
    double H = 0.0;
    for (std::size_t i = 0; i < tvals.size(); ++i)
        H = std::max(H, dvals[i] / std::pow(tvals[i], fit.alpha));
    fit.H = H;
    for (std::size_t i = 0; i < tvals.size(); ++i)
        if (dvals[i] > 1.05 * fit.H * std::pow(tvals[i], fit.alpha)) fit.bound_ok = false;
    return fit;
}

}  // namespace floqrate
