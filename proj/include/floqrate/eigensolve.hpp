// Independent spectral oracles: the elliptic Dirichlet principal eigenpair of
// a frozen operator, the time-periodic principal eigenvalue via the period
// map, and the time-averaged lower bound on the exponential rate.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "floqrate/growthrate.hpp"
#include "floqrate/stepper.hpp"

namespace floqrate {

struct EigenvalueEstimate {
    double value = 0.0;
    std::vector<double> eigenvector;  // strictly positive, max-norm 1
    int iterations = 0;
    double residual = 0.0;  // ||L_h phi - value phi||_inf
};

// Principal (smallest-real) eigenpair of the operator frozen at t_star.
// Shifted inverse power iteration: the shift -|c|_sup - 1 makes the shifted
// matrix an M-matrix, so iterates stay positive and converge to the
// Perron pair.
inline EigenvalueEstimate dirichlet_eigen(const CoefficientField& field, const Mesh& mesh,
                                          double t_star = 0.0, double tol = 1e-10,
                                          int max_iter = 10000) {
    auto op = assemble(field, mesh, t_star);
    const int n = op.n();
    const double shift = field.bounds.c_sup + 1.0;
    std::vector<double> lo(n), di(n), up(n), v(n), w(n), scratch(n), Lv(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = op.lower[i];
        di[i] = op.diag[i] + shift;
        up[i] = op.upper[i];
        v[i] = std::sin(kPi * (i + 1) / (n + 1));
    }
    double norm0 = *std::max_element(v.begin(), v.end());
    for (double& x : v) x /= norm0;

    EigenvalueEstimate est;
    double lambda = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        w = v;
        thomas_solve(lo, di, up, w, scratch);
        double rho = 0.0;
        for (double x : w) rho = std::max(rho, x);
        if (!(rho > 0.0)) throw std::runtime_error("dirichlet_eigen: iteration lost positivity");
        for (int i = 0; i < n; ++i) v[i] = w[i] / rho;
        lambda = 1.0 / rho - shift;

        // residual of the unshifted operator
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            double y = op.diag[i] * v[i];
            if (i > 0) y += op.lower[i] * v[i - 1];
            if (i < n - 1) y += op.upper[i] * v[i + 1];
            res = std::max(res, std::abs(y - lambda * v[i]));
        }
        est.iterations = it;
        est.residual = res;
        if (res <= tol) break;
        if (it == max_iter)
            throw std::runtime_error("dirichlet_eigen: iteration cap exceeded");
    }
    est.value = lambda;
    est.eigenvector = std::move(v);
    for (double x : est.eigenvector)
        if (!(x > 0.0)) throw std::runtime_error("dirichlet_eigen: eigenvector not positive");
    return est;
}

// Closed form for the a=const, b=0, c=const operator on the mesh.
inline double laplacian_principal_eigenvalue(const Mesh& mesh, double a = 1.0, double c = 0.0) {
    double dx = mesh.dx;
    return a * 2.0 / (dx * dx) * (1.0 - std::cos(kPi * dx / mesh.domain.length())) - c;
}

// Principal eigenvalue of a time-periodic operator through the normalized
// period map: power iteration until successive period log-multipliers agree.
inline EigenvalueEstimate periodic_eigen(const CoefficientField& field, const Mesh& mesh,
                                         const StepScheme& scheme, double period,
                                         int max_periods = 500) {
    if (!(period > 0.0)) throw std::invalid_argument("periodic_eigen: period must be positive");
    const double steps_exact = period / scheme.dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_exact));
    if (steps == 0 || std::abs(steps_exact - static_cast<double>(steps)) > 1e-9 * steps_exact)
        throw std::invalid_argument("periodic_eigen: dt must divide the period");
    // spot-check periodicity of the coefficients
    for (int k = 0; k < 8; ++k) {
        double t = 0.37 * (k + 1);
        double x = mesh.nodes[(k * 7) % mesh.n_interior];
        auto u = field.eval(t, x);
        auto v = field.eval(t + period, x);
        if (std::abs(u.a - v.a) + std::abs(u.b - v.b) + std::abs(u.c - v.c) > 1e-9)
            throw std::invalid_argument("periodic_eigen: field is not periodic with this period");
    }

    Evolver ev(field, mesh, scheme);
    NormalizedState st = make_initial_state(mesh, 0.0);
    double prev_mult = 0.0;
    std::vector<double> prev_profile;
    EigenvalueEstimate est;
    for (int p = 1; p <= max_periods; ++p) {
        double mass0 = st.log_mass;
        prev_profile = st.profile;
        for (std::size_t k = 0; k < steps; ++k) ev.step(st);
        double mult = st.log_mass - mass0;
        double dprof = 0.0;
        for (std::size_t i = 0; i < st.profile.size(); ++i)
            dprof = std::max(dprof, std::abs(st.profile[i] - prev_profile[i]));
        est.iterations = p;
        if (p > 1 && std::abs(mult - prev_mult) < 1e-12 && dprof < 1e-10) {
            est.value = -mult / period;
            est.eigenvector = st.profile;
            est.residual = std::abs(mult - prev_mult);
            return est;
        }
        prev_mult = mult;
    }
    throw std::runtime_error("periodic_eigen: period map did not converge");
}

// Three-level dt extrapolation removing the first- and second-order
// time-stepping bias of the period map.
inline double periodic_eigen_richardson(const CoefficientField& field, const Mesh& mesh,
                                        StepScheme scheme, double period) {
    double v1 = periodic_eigen(field, mesh, scheme, period).value;
    scheme.dt *= 0.5;
    double v2 = periodic_eigen(field, mesh, scheme, period).value;
    scheme.dt *= 0.5;
    double v4 = periodic_eigen(field, mesh, scheme, period).value;
    return (v1 - 6.0 * v2 + 8.0 * v4) / 3.0;
}

// Lower bound on the extremal exponential rate of an operator of the form
// d_t - d_xx - c(t,x): the least mean over the time grid of the frozen
// Dirichlet eigenvalues. Equality holds exactly when c is separable.
inline double averaged_lower_bound(const CoefficientField& field, const Mesh& mesh, double t0,
                                   double t1, std::size_t n_grid,
                                   std::span<const double> T_list = {}) {
    if (n_grid < 16) throw std::invalid_argument("averaged_lower_bound: grid too coarse");
    for (int k = 0; k < 16; ++k) {
        double t = t0 + (t1 - t0) * (k + 0.5) / 16.0;
        double x = mesh.nodes[(k * 13) % mesh.n_interior];
        auto v = field.eval(t, x);
        if (std::abs(v.a - 1.0) > 1e-12 || std::abs(v.b) > 1e-12)
            throw std::invalid_argument("averaged_lower_bound: field must have a = 1, b = 0");
    }
    double dt_grid = (t1 - t0) / static_cast<double>(n_grid);
    std::vector<double> lam(n_grid + 1);
    for (std::size_t k = 0; k <= n_grid; ++k)
        lam[k] = dirichlet_eigen(field, mesh, t0 + dt_grid * static_cast<double>(k)).value;
    return least_mean(lam, dt_grid, T_list);
}

}  // namespace floqrate
