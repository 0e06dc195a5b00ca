// Averaging functionals of a beta trace: window-extremal global growth
// rates, running-quotient tail limits, the least mean, a piecewise-linear
// interpolation witness, and the assembled six-eigenvalue report.
//
// Finite-horizon estimates are extrapolated with the model v(T) = v8 + k/T
// fitted on the best contiguous subwindow of the requested T list; the fit
// residual becomes the trust radius and the window choice is flagged when
// the largest T values had to be excluded (spans too short for them).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "floqrate/floquet.hpp"

namespace floqrate {

enum class Extremum { inf, sup };
enum class Direction { plus, minus };

struct Estimate {
    double value = 0.0;
    std::map<double, double> finite_T_values;
    double extrapolation_residual = 0.0;
    double trust_radius = 0.0;
    bool converged = true;

    Estimate negated() const {
        Estimate e = *this;
        e.value = -e.value;
        for (auto& [t, v] : e.finite_T_values) v = -v;
        return e;
    }
};

// Extremum over window starts s of (beta(s+T) - beta(s)) / T.
inline double window_extremal_rate(const BetaTrace& tr, double T, Extremum which,
                                   std::size_t s_stride = 1) {
    if (tr.size() < 2) throw std::invalid_argument("window_extremal_rate: trace too short");
    auto lag = static_cast<std::size_t>(std::llround(T / tr.dt_record));
    if (lag < 1) throw std::invalid_argument("window_extremal_rate: T below the record step");
    if (2.0 * T > tr.span() + 1e-9)
        throw std::invalid_argument("window_extremal_rate: window longer than half the trace");
    if (s_stride == 0) s_stride = 1;
    const double inv = 1.0 / (tr.dt_record * static_cast<double>(lag));
    const std::size_t last = tr.size() - 1 - lag;

    auto scan = [&](std::size_t from, std::size_t to, std::size_t stride) {
        double best = which == Extremum::inf ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity();
        for (std::size_t i = from; i <= to; i += stride) {
            double q = (tr.beta[i + lag] - tr.beta[i]) * inv;
            if (which == Extremum::inf ? q < best : q > best) best = q;
        }
        return best;
    };

    // coarse-then-refine scan for very long traces; refining around the coarse
    // winners can only sharpen the extremum
    if (s_stride == 1 && last > (std::size_t{1} << 25)) {
        const std::size_t coarse = 1024;
        double best = scan(0, last, coarse);
        std::vector<std::size_t> hot;
        for (std::size_t i = 0; i <= last; i += coarse) {
            double q = (tr.beta[i + lag] - tr.beta[i]) * inv;
            bool close = which == Extremum::inf ? q <= best + std::abs(best) * 1e-3 + 1e-9
                                                : q >= best - std::abs(best) * 1e-3 - 1e-9;
            if (close) hot.push_back(i);
        }
        for (std::size_t i : hot) {
            std::size_t from = i >= coarse ? i - coarse : 0;
            std::size_t to = std::min(last, i + coarse);
            double refined = scan(from, to, 1);
            if (which == Extremum::inf ? refined < best : refined > best) best = refined;
        }
        return best;
    }
    return scan(0, last, s_stride);
}

namespace detail {

struct LineFit {
    double intercept = 0.0, slope = 0.0, max_resid = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    double denom = n * sxx - sx * sx;
    f.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    f.intercept = (sy - f.slope * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i)
        f.max_resid = std::max(f.max_resid, std::abs(f.intercept + f.slope * x[i] - y[i]));
    return f;
}

// Fit v(T) = v8 + k/T on the best contiguous window of (T, v) points.
// An extremal window mean can only approach its limit from one side
// (superadditivity for the inf mode), so the fitted value is clipped to the
// sharpest finite-T bound inside the chosen window.
inline Estimate extrapolate_rates(const std::vector<std::pair<double, double>>& points,
                                  Extremum mode) {
    Estimate est;
    for (auto& [T, v] : points) est.finite_T_values[T] = v;
    if (points.empty()) throw std::invalid_argument("extrapolate_rates: no usable T values");
    if (points.size() < 3) {
        est.value = points.back().second;
        est.extrapolation_residual = points.size() == 2
                                         ? std::abs(points[1].second - points[0].second)
                                         : 0.1 * (1.0 + std::abs(est.value));
        est.trust_radius = 2.0 * est.extrapolation_residual + 1e-9 * (1.0 + std::abs(est.value));
        est.converged = false;
        return est;
    }
    const std::size_t m = points.size();
    std::size_t best_i = 0, best_len = 0;
    LineFit best_fit;
    double best_res = std::numeric_limits<double>::infinity();
    // pass 1: smallest residual over all windows of length >= 3
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 2; j < m; ++j) {
            std::vector<double> xs, ys;
            for (std::size_t k = i; k <= j; ++k) {
                xs.push_back(1.0 / points[k].first);
                ys.push_back(points[k].second);
            }
            LineFit f = fit_line(xs, ys);
            std::size_t len = j - i + 1;
            bool better;
            if (f.max_resid < best_res / 1.5)
                better = true;  // clearly tighter window
            else if (f.max_resid <= best_res * 1.5)
                better = len > best_len;  // comparable: prefer the longer window
            else
                better = false;
            if (better) {
                best_res = std::min(best_res, f.max_resid);
                best_i = i;
                best_len = len;
                best_fit = f;
            }
        }
    est.value = best_fit.intercept;
    est.extrapolation_residual = best_fit.max_resid;
    est.converged = best_len == m;
    // one-sided consistency clip within the chosen window
    double bound = mode == Extremum::inf ? -std::numeric_limits<double>::infinity()
                                         : std::numeric_limits<double>::infinity();
    for (std::size_t k = best_i; k < best_i + best_len; ++k)
        bound = mode == Extremum::inf ? std::max(bound, points[k].second)
                                      : std::min(bound, points[k].second);
    double clipped = mode == Extremum::inf ? std::max(est.value, bound)
                                           : std::min(est.value, bound);
    if (clipped != est.value) {
        est.extrapolation_residual =
            std::max(est.extrapolation_residual, std::abs(clipped - est.value));
        est.value = clipped;
    }
    est.trust_radius =
        2.0 * est.extrapolation_residual + 1e-9 * (1.0 + std::abs(est.value));
    return est;
}

}  // namespace detail

struct RatePair {
    Estimate lgr, ggr;  // least / greatest global growth-rate
};

inline RatePair global_growth_rates(const BetaTrace& tr, std::span<const double> T_list,
                                    std::size_t s_stride = 1) {
    std::vector<std::pair<double, double>> lo, hi;
    for (double T : T_list) {
        if (2.0 * T > tr.span() + 1e-9) continue;  // drop windows the span cannot support
        if (T < tr.dt_record - 1e-12) continue;
        lo.emplace_back(T, window_extremal_rate(tr, T, Extremum::inf, s_stride));
        hi.emplace_back(T, window_extremal_rate(tr, T, Extremum::sup, s_stride));
    }
    if (lo.empty())
        throw std::invalid_argument("global_growth_rates: no T in the list fits the trace");
    RatePair out;
    out.lgr = detail::extrapolate_rates(lo, Extremum::inf);
    out.ggr = detail::extrapolate_rates(hi, Extremum::sup);
    return out;
}

struct CesaroPair {
    Estimate lower, upper;  // liminf / limsup of beta(t)/t toward the requested end
};

// Tail limits of beta(t)/t. The tail is log-subsampled; the estimate is the
// extremum over the latest few local extrema of the running quotient and the
// trust radius is their spread (converged quotients give a tight spread,
// persistent oscillations an honest wide one).
inline CesaroPair cesaro_rates(const BetaTrace& tr, Direction dir, double tail_fraction = 0.4) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw std::invalid_argument("cesaro_rates: tail_fraction in (0,1)");
    double far_end = dir == Direction::plus ? tr.t_end() : -tr.t_start;
    if (!(far_end > 0.0)) throw std::invalid_argument("cesaro_rates: trace does not reach that end");
    double tau_hi = far_end;
    double tau_lo = std::max(tail_fraction * far_end, 4.0 * tr.dt_record);
    if (!(tau_lo < tau_hi)) throw std::invalid_argument("cesaro_rates: tail too short");

    const std::size_t M = 4096;
    std::vector<double> taus, q;
    for (std::size_t j = 0; j < M; ++j) {
        double tau = tau_lo * std::pow(tau_hi / tau_lo, static_cast<double>(j) / (M - 1));
        double t = dir == Direction::plus ? tau : -tau;
        std::size_t idx = tr.index_near(t);
        double tt = tr.time_at(idx);
        if (std::abs(tt) < 0.5 * tau_lo) continue;
        if (!taus.empty() && std::abs(tt - taus.back()) < 1e-15) continue;
        taus.push_back(tt);
        q.push_back(tr.beta[idx] / tt);
    }
    if (q.size() < 8) throw std::invalid_argument("cesaro_rates: tail too short");

    auto collect = [&](bool minima) {
        std::vector<std::pair<double, double>> ext;  // (tau, q)
        auto better = [&](double a, double b) { return minima ? a <= b : a >= b; };
        for (std::size_t j = 0; j < q.size(); ++j) {
            bool left = j == 0 || better(q[j], q[j - 1]);
            bool right = j + 1 == q.size() || better(q[j], q[j + 1]);
            if (left && right) ext.emplace_back(std::abs(taus[j]), q[j]);
        }
        Estimate est;
        std::size_t first = ext.size() > 3 ? ext.size() - 3 : 0;
        double v = minima ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
        double lo_v = std::numeric_limits<double>::infinity();
        double hi_v = -std::numeric_limits<double>::infinity();
        for (std::size_t j = first; j < ext.size(); ++j) {
            est.finite_T_values[ext[j].first] = ext[j].second;
            v = minima ? std::min(v, ext[j].second) : std::max(v, ext[j].second);
            lo_v = std::min(lo_v, ext[j].second);
            hi_v = std::max(hi_v, ext[j].second);
        }
        est.value = v;
        est.extrapolation_residual = hi_v - lo_v;
        est.trust_radius = (hi_v - lo_v) + 1e-9 * (1.0 + std::abs(v));
        return est;
    };
    CesaroPair out;
    out.lower = collect(true);
    out.upper = collect(false);
    return out;
}

// Least mean of a uniformly sampled signal: the least global growth-rate of
// its cumulative (trapezoidal) integral.
inline double least_mean(std::span<const double> samples, double dt,
                         std::span<const double> T_list = {}) {
    if (samples.empty()) throw std::invalid_argument("least_mean: empty input");
    if (!(dt > 0.0)) throw std::invalid_argument("least_mean: dt must be positive");
    BetaTrace tr;
    tr.tag = IntervalTag::Rplus;
    tr.t_start = 0.0;
    tr.dt_record = dt;
    tr.beta.resize(samples.size());
    tr.beta[0] = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        tr.beta[i] = tr.beta[i - 1] + 0.5 * dt * (samples[i - 1] + samples[i]);
    double span = tr.span();
    std::vector<double> Ts(T_list.begin(), T_list.end());
    if (Ts.empty()) {
        // default windows: round numbers near span/64 .. span/8
        auto nice = [](double x) {
            double p = std::pow(10.0, std::floor(std::log10(x)));
            return std::round(x / p) * p;
        };
        for (double f : {64.0, 32.0, 16.0, 8.0}) {
            double T = std::max(nice(span / f), 2.0 * dt);
            if (Ts.empty() || T > Ts.back()) Ts.push_back(T);
        }
    }
    return global_growth_rates(tr, Ts).lgr.value;
}

struct WitnessA {
    std::vector<double> knot_times, knot_values;
    double slope_essinf = 0.0, slope_esssup = 0.0;
    double sup_dev = 0.0;      // sup |A - beta| over the knot range
    double sublinear_C = 0.0;  // fitted constant with |dbeta| <= C (1 + |dt|)
};

// Piecewise-linear interpolation of beta at knots spaced T apart.
inline WitnessA interpolation_witness(const BetaTrace& tr, double T) {
    auto lag = static_cast<std::size_t>(std::llround(T / tr.dt_record));
    if (lag < 1 || tr.size() < 2 * lag + 1)
        throw std::invalid_argument("interpolation_witness: trace shorter than 2 knots");
    WitnessA w;
    std::size_t K = (tr.size() - 1) / lag;
    w.slope_essinf = std::numeric_limits<double>::infinity();
    w.slope_esssup = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= K; ++k) {
        w.knot_times.push_back(tr.time_at(k * lag));
        w.knot_values.push_back(tr.beta[k * lag]);
        if (k > 0) {
            double s = (w.knot_values[k] - w.knot_values[k - 1]) / T;
            w.slope_essinf = std::min(w.slope_essinf, s);
            w.slope_esssup = std::max(w.slope_esssup, s);
        }
    }
    for (std::size_t i = 0; i <= K * lag; ++i) {
        std::size_t k = i / lag;
        if (k >= K) k = K - 1;
        double r = static_cast<double>(i - k * lag) / static_cast<double>(lag);
        double A = (1.0 - r) * w.knot_values[k] + r * w.knot_values[k + 1];
        w.sup_dev = std::max(w.sup_dev, std::abs(A - tr.beta[i]));
    }
    w.sublinear_C = unit_window_log_bound(tr);
    return w;
}

// ---------------------------------------------------------------------------
// Report assembly

struct IntervalEntries {
    std::optional<Estimate> mu_bp, lambda_bp, mu_p, lambda_b, mu_b, lambda_p;
};

struct TraceTriple {
    BetaTrace R, plus, minus;
};

struct ReportOptions {
    std::vector<double> T_list;
    std::size_t s_stride = 1;
    double tail_fraction = 0.4;
};

struct GrowthRateReport {
    IntervalEntries R, Rplus, Rminus;
    bool chain_ok_R = false, chain_ok_plus = false, chain_ok_minus = false;
    bool split_mu_ok = false, split_lambda_ok = false;
    double sup_c = 0.0;
    bool richardson = false;
};

namespace detail {

inline Estimate richardson_combine(const Estimate& fine, const Estimate& coarse) {
    Estimate e;
    e.value = 2.0 * fine.value - coarse.value;
    e.finite_T_values = fine.finite_T_values;
    e.extrapolation_residual = std::max(fine.extrapolation_residual, coarse.extrapolation_residual);
    // the removed first-order term leaves an O(dt^2) remainder of comparable scale
    e.trust_radius = 2.0 * fine.trust_radius + coarse.trust_radius +
                     0.5 * std::abs(fine.value - coarse.value) * 0.5;
    e.converged = fine.converged && coarse.converged;
    return e;
}

inline IntervalEntries interval_entries(const BetaTrace& tr, IntervalTag tag,
                                        const ReportOptions& opt) {
    IntervalEntries e;
    auto rates = global_growth_rates(tr, opt.T_list, opt.s_stride);
    e.mu_bp = rates.lgr.negated();
    e.lambda_bp = rates.ggr.negated();
    if (tag != IntervalTag::Rminus) {
        auto ces = cesaro_rates(tr, Direction::plus, opt.tail_fraction);
        e.mu_p = ces.lower.negated();
        e.lambda_b = ces.upper.negated();
    }
    if (tag != IntervalTag::Rplus) {
        auto ces = cesaro_rates(tr, Direction::minus, opt.tail_fraction);
        e.mu_b = ces.lower.negated();
        e.lambda_p = ces.upper.negated();
    }
    return e;
}

inline IntervalEntries combine_entries(const IntervalEntries& f, const IntervalEntries& c) {
    IntervalEntries e;
    auto comb = [](const std::optional<Estimate>& a, const std::optional<Estimate>& b) {
        return a && b ? std::optional<Estimate>(richardson_combine(*a, *b)) : a;
    };
    e.mu_bp = comb(f.mu_bp, c.mu_bp);
    e.lambda_bp = comb(f.lambda_bp, c.lambda_bp);
    e.mu_p = comb(f.mu_p, c.mu_p);
    e.lambda_b = comb(f.lambda_b, c.lambda_b);
    e.mu_b = comb(f.mu_b, c.mu_b);
    e.lambda_p = comb(f.lambda_p, c.lambda_p);
    return e;
}

inline double tol2(const Estimate& a, const Estimate& b) {
    return a.trust_radius + b.trust_radius + 1e-9;
}

inline bool chain_holds(const IntervalEntries& e, double sup_c) {
    // -sup c <= lambda_bp <= min(lambda_b, lambda_p) <= max(mu_b, mu_p) <= mu_bp
    const Estimate& lbp = *e.lambda_bp;
    const Estimate& mbp = *e.mu_bp;
    if (lbp.value < -sup_c - lbp.trust_radius - 1e-9) return false;
    double lmin = std::numeric_limits<double>::infinity(), lmin_tr = 0.0;
    if (e.lambda_b && e.lambda_b->value < lmin) {
        lmin = e.lambda_b->value;
        lmin_tr = e.lambda_b->trust_radius;
    }
    if (e.lambda_p && e.lambda_p->value < lmin) {
        lmin = e.lambda_p->value;
        lmin_tr = e.lambda_p->trust_radius;
    }
    double mmax = -std::numeric_limits<double>::infinity(), mmax_tr = 0.0;
    if (e.mu_b && e.mu_b->value > mmax) {
        mmax = e.mu_b->value;
        mmax_tr = e.mu_b->trust_radius;
    }
    if (e.mu_p && e.mu_p->value > mmax) {
        mmax = e.mu_p->value;
        mmax_tr = e.mu_p->trust_radius;
    }
    if (lbp.value > lmin + lbp.trust_radius + lmin_tr + 1e-9) return false;
    if (lmin > mmax + lmin_tr + mmax_tr + 1e-9) return false;
    if (mmax > mbp.value + mmax_tr + mbp.trust_radius + 1e-9) return false;
    return true;
}

}  // namespace detail

inline GrowthRateReport eigen_report(const TraceTriple& traces, const TraceTriple* coarse,
                                     const ReportOptions& opt, double sup_c) {
    auto same = [](const BetaTrace& a, const BetaTrace& b) {
        return a.scheme_theta == b.scheme_theta && std::abs(a.scheme_dt - b.scheme_dt) < 1e-15;
    };
    if (!same(traces.R, traces.plus) || !same(traces.R, traces.minus))
        throw std::invalid_argument("eigen_report: inconsistent trace provenance");

    GrowthRateReport rep;
    rep.sup_c = sup_c;
    rep.R = detail::interval_entries(traces.R, IntervalTag::R, opt);
    rep.Rplus = detail::interval_entries(traces.plus, IntervalTag::Rplus, opt);
    rep.Rminus = detail::interval_entries(traces.minus, IntervalTag::Rminus, opt);
    if (coarse) {
        rep.richardson = true;
        rep.R = detail::combine_entries(rep.R, detail::interval_entries(coarse->R, IntervalTag::R, opt));
        rep.Rplus = detail::combine_entries(
            rep.Rplus, detail::interval_entries(coarse->plus, IntervalTag::Rplus, opt));
        rep.Rminus = detail::combine_entries(
            rep.Rminus, detail::interval_entries(coarse->minus, IntervalTag::Rminus, opt));
    }
    rep.chain_ok_R = detail::chain_holds(rep.R, sup_c);
    rep.chain_ok_plus = detail::chain_holds(rep.Rplus, sup_c);
    rep.chain_ok_minus = detail::chain_holds(rep.Rminus, sup_c);
    double split_mu = std::max(rep.Rminus.mu_bp->value, rep.Rplus.mu_bp->value);
    double split_la = std::min(rep.Rminus.lambda_bp->value, rep.Rplus.lambda_bp->value);
    rep.split_mu_ok = std::abs(rep.R.mu_bp->value - split_mu) <=
                      rep.R.mu_bp->trust_radius + rep.Rminus.mu_bp->trust_radius +
                          rep.Rplus.mu_bp->trust_radius + 1e-9;
    rep.split_lambda_ok = std::abs(rep.R.lambda_bp->value - split_la) <=
                          rep.R.lambda_bp->trust_radius + rep.Rminus.lambda_bp->trust_radius +
                              rep.Rplus.lambda_bp->trust_radius + 1e-9;
    return rep;
}

// Forward-interval tail rates of the time-translated operators: a finite
// diagnostic for the limit-operator extremal characterization.
inline std::map<double, std::pair<double, double>> translate_scan(
    const CoefficientField& field, const Mesh& mesh, const StepScheme& scheme,
    std::span<const double> shifts, double horizon, double burn_in = 2.0,
    double tail_fraction = 0.4) {
    std::map<double, std::pair<double, double>> out;
    for (double s : shifts) {
        auto shifted = field.translated(s);
        auto tr = compute_bundle(shifted, mesh, scheme, IntervalTag::Rplus, 0.0, horizon, burn_in,
                                 10);
        auto ces = cesaro_rates(tr, Direction::plus, tail_fraction);
        out[s] = {-ces.lower.value, -ces.upper.value};  // (mu_p, lambda_b)
    }
    return out;
}

}  // namespace floqrate
