// Spatial mesh and monotone tridiagonal assembly of  L_h = -a d_xx - b d_x - c
// with homogeneous Dirichlet values eliminated. Central diffusion, upwind
// advection: off-diagonals stay nonpositive for any |b| dx / a, so the
// implicit update matrix is an M-matrix and the discrete comparison
// principle holds.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "floqrate/coefficients.hpp"

namespace floqrate {

struct Mesh {
    Domain1D domain;
    int n_interior = 0;
    double dx = 0.0;
    std::vector<double> nodes;  // x_i, i = 1..n_interior
};

inline Mesh build_mesh(const Domain1D& domain, int n_interior) {
    if (n_interior < 3) throw std::invalid_argument("build_mesh: n_interior must be >= 3");
    Mesh m;
    m.domain = domain;
    m.n_interior = n_interior;
    m.dx = domain.length() / (n_interior + 1);
    m.nodes.resize(n_interior);
    for (int i = 0; i < n_interior; ++i) m.nodes[i] = domain.x_lo + (i + 1) * m.dx;
    return m;
}

struct TridiagonalOperator {
    std::vector<double> lower, diag, upper;  // lower[0], upper[n-1] unused
    double timestamp = 0.0;
    int n() const { return static_cast<int>(diag.size()); }
};

inline void assemble_into(const CoefficientField& field, const Mesh& mesh, double t,
                          TridiagonalOperator& op) {
    const int n = mesh.n_interior;
    op.lower.resize(n);
    op.diag.resize(n);
    op.upper.resize(n);
    op.timestamp = t;
    const double inv_dx2 = 1.0 / (mesh.dx * mesh.dx);
    const double inv_dx = 1.0 / mesh.dx;
    for (int i = 0; i < n; ++i) {
        const double x = mesh.nodes[i];
        const double a = field.a(t, x);
        const double b = field.b(t, x);
        const double c = field.c(t, x);
        if (!(a >= field.alpha - 1e-12))
            throw std::runtime_error("assemble: ellipticity violated at a node");
        const double bp = b >= 0.0 ? b : 0.0;   // upwind split
        const double bm = b >= 0.0 ? 0.0 : -b;
        op.lower[i] = -a * inv_dx2 - bm * inv_dx;
        op.upper[i] = -a * inv_dx2 - bp * inv_dx;
        op.diag[i] = 2.0 * a * inv_dx2 + (bp + bm) * inv_dx - c;
    }
}

inline TridiagonalOperator assemble(const CoefficientField& field, const Mesh& mesh, double t) {
    TridiagonalOperator op;
    assemble_into(field, mesh, t, op);
    return op;
}

// Matrix-vector product with implicit zero boundary values.
inline std::vector<double> apply(const TridiagonalOperator& op, std::span<const double> u) {
    const int n = op.n();
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("apply: length mismatch");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double v = op.diag[i] * u[i];
        if (i > 0) v += op.lower[i] * u[i - 1];
        if (i < n - 1) v += op.upper[i] * u[i + 1];
        out[i] = v;
    }
    return out;
}

// Thomas algorithm; valid without pivoting for the diagonally dominant
// M-matrices produced here. Solves in place: rhs becomes the solution.
inline void thomas_solve(std::span<const double> lower, std::span<const double> diag,
                         std::span<const double> upper, std::span<double> rhs,
                         std::span<double> scratch) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || scratch.size() < n)
        throw std::invalid_argument("thomas_solve: length mismatch");
    double d0 = diag[0];
    if (d0 == 0.0) throw std::runtime_error("thomas_solve: singular system");
    double inv = 1.0 / d0;
    scratch[0] = upper[0] * inv;
    rhs[0] *= inv;
    for (std::size_t i = 1; i < n; ++i) {
        double m = diag[i] - lower[i] * scratch[i - 1];
        if (m == 0.0) throw std::runtime_error("thomas_solve: singular system");
        inv = 1.0 / m;
        scratch[i] = upper[i] * inv;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * inv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

}  // namespace floqrate
