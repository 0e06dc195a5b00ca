// Implicit theta-scheme for  u_t + L_h(t) u = 0  with per-step sup-norm
// renormalization. Log-mass is accumulated as a running sum of stripped
// norms, so beta spans millions of time units without over/underflow.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "floqrate/discretize.hpp"
#include "floqrate/trace.hpp"

namespace floqrate {

struct StepScheme {
    double theta = 1.0;  // 1 = backward Euler, 0.5 = Crank-Nicolson
    double dt = 1e-3;
    bool positivity_guard = true;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("StepScheme: dt must be positive");
        if (theta != 1.0 && theta != 0.5)
            throw std::invalid_argument("StepScheme: theta must be 1 or 0.5");
        if (theta == 0.5 && !positivity_guard)
            throw std::invalid_argument("StepScheme: theta = 0.5 requires the positivity guard");
    }
};

struct PositivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NormalizedState {
    std::vector<double> profile;  // max-norm 1, entries >= 0
    double log_mass = 0.0;
    double t = 0.0;
};

// Discrete sine datum: strictly positive, satisfies the boundary condition.
inline NormalizedState make_initial_state(const Mesh& mesh, double t0) {
    NormalizedState s;
    s.t = t0;
    s.profile.resize(mesh.n_interior);
    for (int i = 0; i < mesh.n_interior; ++i)
        s.profile[i] = std::sin(kPi * (mesh.nodes[i] - mesh.domain.x_lo) / mesh.domain.length());
    double m = *std::max_element(s.profile.begin(), s.profile.end());
    for (double& v : s.profile) v /= m;
    return s;
}

inline void normalize_state(NormalizedState& s) {
    double m = 0.0;
    for (double v : s.profile) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("normalize_state: profile must be nonnegative and finite");
        m = std::max(m, v);
    }
    if (m == 0.0) throw std::invalid_argument("normalize_state: profile is identically zero");
    for (double& v : s.profile) v /= m;
    s.log_mass += std::log(m);
}

// One evolution owns an Evolver; it caches the frozen spatial parts so a
// separable field costs one signal evaluation per step.
class Evolver {
  public:
    Evolver(const CoefficientField& field, const Mesh& mesh, const StepScheme& scheme)
        : field_(&field), mesh_(&mesh), scheme_(scheme) {
        scheme_.validate();
        if (scheme_.theta == 1.0 && !(scheme_.dt * field.sup_c_plus() < 1.0))
            throw std::invalid_argument("Evolver: dt * sup c+ must stay below 1");
        const int n = mesh.n_interior;
        lo_.resize(n);
        di_.resize(n);
        up_.resize(n);
        rhs_.resize(n);
        scratch_.resize(n);
        static_ab_ = field.time_independent_ab();
        separable_c_ = field.separable();
        if (static_ab_) {
            base_ = assemble(field, mesh, 0.0);
            cprof_.resize(n);
            for (int i = 0; i < n; ++i) {
                base_.diag[i] += field.c(0.0, mesh.nodes[i]);  // strip c: keep -a,-b part only
                cprof_[i] = field.c_prof.value(mesh.nodes[i], field.domain);
            }
        }
    }

    const StepScheme& scheme() const { return scheme_; }

    void step(NormalizedState& state) {
        const int n = mesh_->n_interior;
        if (static_cast<int>(state.profile.size()) != n)
            throw std::invalid_argument("Evolver::step: profile length mismatch");
        const double dt = scheme_.dt;
        const double th = scheme_.theta;
        const double t_sample = th == 1.0 ? state.t + dt : state.t + 0.5 * dt;

        fill_operator(t_sample);

        if (th == 1.0) {
            for (int i = 0; i < n; ++i) {
                rhs_[i] = state.profile[i];
                lo_[i] *= dt;
                di_[i] = 1.0 + dt * di_[i];
                up_[i] *= dt;
            }
        } else {
            const double h = 0.5 * dt;
            for (int i = 0; i < n; ++i) {
                double v = (1.0 - h * di_[i]) * state.profile[i];
                if (i > 0) v -= h * lo_[i] * state.profile[i - 1];
                if (i < n - 1) v -= h * up_[i] * state.profile[i + 1];
                rhs_[i] = v;
                lo_[i] *= h;
                di_[i] = 1.0 + h * di_[i];
                up_[i] *= h;
            }
        }
        thomas_solve(lo_, di_, up_, rhs_, scratch_);

        double m = 0.0;
        int imax = 0;
        for (int i = 0; i < n; ++i) {
            double v = rhs_[i];
            if (!std::isfinite(v)) throw std::runtime_error("Evolver::step: non-finite update");
            if (v < 0.0 && scheme_.positivity_guard)
                throw PositivityError("Evolver::step: negative entry, fallback required");
            if (v > m) {
                m = v;
                imax = i;
            }
        }
        if (!(m > 0.0)) throw std::runtime_error("Evolver::step: profile collapsed");
        const double inv = 1.0 / m;
        for (int i = 0; i < n; ++i) state.profile[i] = rhs_[i] * inv;
        state.profile[imax] = 1.0;  // renormalized max is exact
        state.log_mass += std::log(m);
        state.t += dt;
    }

  private:
    void fill_operator(double t) {
        const int n = mesh_->n_interior;
        if (static_ab_) {
            std::copy(base_.lower.begin(), base_.lower.end(), lo_.begin());
            std::copy(base_.upper.begin(), base_.upper.end(), up_.begin());
            if (separable_c_) {
                double s = field_->sigma ? field_->sigma->value(field_->effective_time(t)) : 0.0;
                for (int i = 0; i < n; ++i) di_[i] = base_.diag[i] - cprof_[i] - s;
            } else {
                for (int i = 0; i < n; ++i)
                    di_[i] = base_.diag[i] - field_->c(t, mesh_->nodes[i]);
            }
        } else {
            TridiagonalOperator op;
            assemble_into(*field_, *mesh_, t, op);
            lo_ = std::move(op.lower);
            di_ = std::move(op.diag);
            up_ = std::move(op.upper);
        }
    }

    const CoefficientField* field_;
    const Mesh* mesh_;
    StepScheme scheme_;
    bool static_ab_ = false;
    bool separable_c_ = false;
    TridiagonalOperator base_;  // diffusion + advection rows, zero-order part stripped
    std::vector<double> cprof_;
    std::vector<double> lo_, di_, up_, rhs_, scratch_;
};

inline NormalizedState step(const CoefficientField& field, const Mesh& mesh,
                            const StepScheme& scheme, NormalizedState state) {
    double m = *std::max_element(state.profile.begin(), state.profile.end());
    if (!(m > 0.0)) throw std::invalid_argument("step: invalid state, profile vanishes");
    Evolver ev(field, mesh, scheme);
    ev.step(state);
    return state;
}

// Evolve from u0 over [t0, t1], recording beta relative to beta(t0) every
// record_stride steps. profile_every > 0 stores a snapshot every that many
// records.
inline BetaTrace evolve_normalized(const CoefficientField& field, const Mesh& mesh,
                                   const StepScheme& scheme, std::span<const double> u0, double t0,
                                   double t1, std::size_t record_stride,
                                   std::size_t profile_every = 0) {
    if (!(t1 > t0)) throw std::invalid_argument("evolve_normalized: t1 must exceed t0");
    if (record_stride == 0) throw std::invalid_argument("evolve_normalized: record_stride >= 1");
    const double steps_exact = (t1 - t0) / scheme.dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(steps_exact));
    if (std::abs(steps_exact - static_cast<double>(n_steps)) > 1e-6)
        throw std::invalid_argument("evolve_normalized: (t1 - t0) must be a multiple of dt");

    NormalizedState st;
    st.t = t0;
    st.profile.assign(u0.begin(), u0.end());
    normalize_state(st);
    st.log_mass = 0.0;  // beta(t0) = 0 by normalization

    Evolver ev(field, mesh, scheme);
    BetaTrace tr;
    tr.t_start = t0;
    tr.dt_record = scheme.dt * static_cast<double>(record_stride);
    tr.scheme_dt = scheme.dt;
    tr.scheme_theta = scheme.theta;
    tr.beta.reserve(n_steps / record_stride + 2);
    tr.beta.push_back(0.0);
    if (profile_every > 0) tr.profiles.emplace(0, st.profile);

    std::size_t records = 0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        ev.step(st);
        st.t = t0 + scheme.dt * static_cast<double>(k);  // suppress additive time drift
        if (k % record_stride == 0) {
            ++records;
            tr.beta.push_back(st.log_mass);
            if (profile_every > 0 && records % profile_every == 0)
                tr.profiles.emplace(records, st.profile);
        }
    }
    if (profile_every > 0) tr.profiles.emplace(tr.beta.size() - 1, st.profile);
    return tr;
}

}  // namespace floqrate
