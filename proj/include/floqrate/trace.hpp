// Uniformly sampled record of beta(t) = ln ||u(t,.)||_inf, with optional
// sparse profile snapshots. Also builds synthetic traces
// beta(t) = -lambda0 t + int_0^t sigma from exact antiderivatives.
#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "floqrate/coefficients.hpp"

namespace floqrate {

enum class IntervalTag { R, Rplus, Rminus };

inline const char* to_string(IntervalTag tag) {
    switch (tag) {
        case IntervalTag::R: return "R";
        case IntervalTag::Rplus: return "R_plus";
        case IntervalTag::Rminus: return "R_minus";
    }
    return "?";
}

struct BetaTrace {
    IntervalTag tag = IntervalTag::Rplus;
    double t_start = 0.0;
    double dt_record = 0.0;
    std::vector<double> beta;
    std::map<std::size_t, std::vector<double>> profiles;  // sample index -> profile
    double burn_in_used = 0.0;
    double scheme_dt = 0.0;
    double scheme_theta = 1.0;
    std::vector<std::string> warnings;

    std::size_t size() const { return beta.size(); }
    double time_at(std::size_t k) const { return t_start + dt_record * static_cast<double>(k); }
    double t_end() const { return beta.empty() ? t_start : time_at(beta.size() - 1); }
    double span() const { return t_end() - t_start; }

    std::size_t index_near(double t) const {
        if (beta.empty()) throw std::runtime_error("BetaTrace: empty");
        double k = (t - t_start) / dt_record;
        auto i = static_cast<std::ptrdiff_t>(std::llround(k));
        if (i < 0) i = 0;
        if (i >= static_cast<std::ptrdiff_t>(beta.size()))
            i = static_cast<std::ptrdiff_t>(beta.size()) - 1;
        return static_cast<std::size_t>(i);
    }

    void anchor_at(double t) {
        double b0 = beta[index_near(t)];
        for (double& b : beta) b -= b0;
    }

    BetaTrace restrict(double lo, double hi, IntervalTag new_tag) const {
        std::size_t i0 = index_near(lo), i1 = index_near(hi);
        if (i1 <= i0) throw std::invalid_argument("BetaTrace::restrict: empty range");
        BetaTrace out;
        out.tag = new_tag;
        out.t_start = time_at(i0);
        out.dt_record = dt_record;
        out.beta.assign(beta.begin() + static_cast<std::ptrdiff_t>(i0),
                        beta.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
        for (auto& [k, p] : profiles)
            if (k >= i0 && k <= i1) out.profiles.emplace(k - i0, p);
        out.burn_in_used = burn_in_used;
        out.scheme_dt = scheme_dt;
        out.scheme_theta = scheme_theta;
        return out;
    }
};

// Synthetic bundle trace for a separable operator with principal elliptic
// eigenvalue lambda0 and zero-order time signal sigma. Exact: the only
// error is the record granularity. Walks the signal incrementally so
// cell-based families stay O(1) per sample.
inline BetaTrace make_synthetic_trace(double lambda0, const SigmaSignal& sigma, double t_lo,
                                      double t_hi, double dt_record, IntervalTag tag) {
    if (!(t_hi > t_lo) || !(dt_record > 0.0))
        throw std::invalid_argument("make_synthetic_trace: bad time range");
    BetaTrace tr;
    tr.tag = tag;
    tr.t_start = t_lo;
    tr.dt_record = dt_record;
    auto n = static_cast<std::size_t>(std::llround((t_hi - t_lo) / dt_record));
    tr.beta.resize(n + 1);
    if (sigma.family == SigmaFamily::piecewise_linear_iid) {
        // prefix sums over integer cells, one pass
        double F_lo = sigma.antiderivative(t_lo);
        double F = F_lo;
        double t_prev = t_lo;
        for (std::size_t k = 0; k <= n; ++k) {
            double t = t_lo + dt_record * static_cast<double>(k);
            if (k > 0) {
                // advance the integral across [t_prev, t] cell by cell
                double lo = t_prev, hi = t;
                auto l0 = static_cast<std::int64_t>(std::floor(lo));
                auto l1 = static_cast<std::int64_t>(std::floor(hi));
                double cl = sigma.cell_value(l0);
                for (std::int64_t l = l0; l <= l1; ++l) {
                    double cr = sigma.cell_value(l + 1);
                    double s0 = std::max(lo - static_cast<double>(l), 0.0);
                    double s1 = std::min(hi - static_cast<double>(l), 1.0);
                    if (s1 > s0) {
                        auto seg = [&](double r) { return cl * r + 0.5 * (cr - cl) * r * r; };
                        F += seg(s1) - seg(s0);
                    }
                    cl = cr;
                }
                t_prev = t;
            }
            tr.beta[k] = -lambda0 * t + F;
        }
    } else {
        for (std::size_t k = 0; k <= n; ++k) {
            double t = t_lo + dt_record * static_cast<double>(k);
            tr.beta[k] = -lambda0 * t + sigma.antiderivative(t);
        }
    }
    double anchor = (tag == IntervalTag::Rminus) ? t_hi : 0.0;
    if (anchor >= t_lo && anchor <= t_hi) tr.anchor_at(anchor);
    return tr;
}

inline void write_trace_csv(const std::string& path, const BetaTrace& tr) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
    std::fprintf(f, "t,beta\n");
    for (std::size_t k = 0; k < tr.size(); ++k)
        std::fprintf(f, "%.17g,%.17g\n", tr.time_at(k), tr.beta[k]);
    std::fclose(f);
}

inline void write_profiles_csv(const std::string& path, const BetaTrace& tr,
                               const std::vector<double>& nodes) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_profiles_csv: cannot open " + path);
    std::fprintf(f, "t,x,u\n");
    for (auto& [k, p] : tr.profiles) {
        double t = tr.time_at(k);
        for (std::size_t i = 0; i < p.size() && i < nodes.size(); ++i)
            std::fprintf(f, "%.17g,%.17g,%.17g\n", t, nodes[i], p[i]);
    }
    std::fclose(f);
}

}  // namespace floqrate
