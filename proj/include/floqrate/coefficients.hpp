// Coefficient families (a, b, c) of the operator  P = d_t - a d_xx - b d_x - c
// on an interval, with exact antiderivatives for the separable time signals.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace floqrate {

inline constexpr double kPi = 3.14159265358979323846;

struct Domain1D {
    double x_lo = 0.0;
    double x_hi = 1.0;

    Domain1D() = default;
    Domain1D(double lo, double hi) : x_lo(lo), x_hi(hi) {
        if (!(x_hi - x_lo > 0.0))
            throw std::invalid_argument("Domain1D: x_hi must exceed x_lo");
    }
    double length() const { return x_hi - x_lo; }
    bool contains(double x) const { return x >= x_lo && x <= x_hi; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based draw for cell `cell` of stream `seed`: O(1), order-independent.
inline double cell_uniform(std::uint64_t seed, std::int64_t cell) {
    std::uint64_t h = splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(cell));
    return static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalar time signals sigma(t)

enum class SigmaFamily {
    constant,
    cosine,               // m + A cos(2 pi t / tau)
    quasi_periodic,       // sum A_i cos(omega_i t)
    log_oscillatory,      // A cos(ln(1 + |t|)), even by construction
    piecewise_linear_iid  // linear interpolation of i.i.d. uniform cell values
};

struct SigmaSignal {
    SigmaFamily family = SigmaFamily::constant;
    double level = 0.0;      // constant value / cosine mean m
    double amplitude = 0.0;  // cosine A / log_oscillatory A
    double period = 1.0;     // cosine tau
    std::vector<std::pair<double, double>> modes;  // quasi-periodic (A_i, omega_i)
    std::uint64_t seed = 0;                        // piecewise_linear_iid
    double draw_lo = 0.0, draw_hi = 1.0;           // uniform draw range

    static SigmaSignal constant(double v) {
        SigmaSignal s;
        s.family = SigmaFamily::constant;
        s.level = v;
        return s;
    }
    static SigmaSignal cosine(double m, double A, double tau) {
        if (!(tau > 0.0)) throw std::invalid_argument("SigmaSignal: cosine period must be positive");
        SigmaSignal s;
        s.family = SigmaFamily::cosine;
        s.level = m;
        s.amplitude = A;
        s.period = tau;
        return s;
    }
    static SigmaSignal quasi_periodic(std::vector<std::pair<double, double>> modes_) {
        SigmaSignal s;
        s.family = SigmaFamily::quasi_periodic;
        s.modes = std::move(modes_);
        for (auto& [A, w] : s.modes)
            if (!(w > 0.0)) throw std::invalid_argument("SigmaSignal: frequencies must be positive");
        // Reject frequency pairs with an exactly representable small rational ratio;
        // irrationality beyond that is declared, not verifiable.
        for (std::size_t i = 0; i < s.modes.size(); ++i)
            for (std::size_t j = i + 1; j < s.modes.size(); ++j) {
                double r = s.modes[i].second / s.modes[j].second;
                for (int q = 1; q <= 32; ++q) {
                    double p = r * q;
                    if (std::abs(p - std::round(p)) < 1e-12 * q)
                        throw std::invalid_argument(
                            "SigmaSignal: rationally dependent quasi-periodic frequencies");
                }
            }
        return s;
    }
    static SigmaSignal log_oscillatory(double A) {
        SigmaSignal s;
        s.family = SigmaFamily::log_oscillatory;
        s.amplitude = A;
        return s;
    }
    static SigmaSignal piecewise_linear_iid(std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
        if (!(hi >= lo)) throw std::invalid_argument("SigmaSignal: bad draw range");
        SigmaSignal s;
        s.family = SigmaFamily::piecewise_linear_iid;
        s.seed = seed;
        s.draw_lo = lo;
        s.draw_hi = hi;
        return s;
    }

    bool has_exact_antiderivative() const { return true; }

    double cell_value(std::int64_t cell) const {
        return draw_lo + (draw_hi - draw_lo) * detail::cell_uniform(seed, cell);
    }

    double value(double t) const {
        switch (family) {
            case SigmaFamily::constant:
                return level;
            case SigmaFamily::cosine:
                return level + amplitude * std::cos(2.0 * kPi * t / period);
            case SigmaFamily::quasi_periodic: {
                double v = level;
                for (auto& [A, w] : modes) v += A * std::cos(w * t);
                return v;
            }
            case SigmaFamily::log_oscillatory:
                return amplitude * std::cos(std::log1p(std::abs(t)));
            case SigmaFamily::piecewise_linear_iid: {
                double fl = std::floor(t);
                auto l = static_cast<std::int64_t>(fl);
                double r = t - fl;
                return (1.0 - r) * cell_value(l) + r * cell_value(l + 1);
            }
        }
        return 0.0;
    }

    // F(t) = int_0^t sigma, exact per family.
    double antiderivative(double t) const {
        switch (family) {
            case SigmaFamily::constant:
                return level * t;
            case SigmaFamily::cosine:
                return level * t +
                       amplitude * period / (2.0 * kPi) * std::sin(2.0 * kPi * t / period);
            case SigmaFamily::quasi_periodic: {
                double v = level * t;
                for (auto& [A, w] : modes) v += A / w * std::sin(w * t);
                return v;
            }
            case SigmaFamily::log_oscillatory: {
                // On t >= 0: A [ ((1+t)/2)(cos(ln(1+t)) + sin(ln(1+t))) - 1/2 ];
                // odd extension for t < 0 since the signal is even.
                double s = std::abs(t);
                double u = std::log1p(s);
                double F = amplitude * (0.5 * (1.0 + s) * (std::cos(u) + std::sin(u)) - 0.5);
                return t < 0.0 ? -F : F;
            }
            case SigmaFamily::piecewise_linear_iid: {
                if (t == 0.0) return 0.0;
                bool neg = t < 0.0;
                double lo = neg ? t : 0.0, hi = neg ? 0.0 : t;
                auto l0 = static_cast<std::int64_t>(std::floor(lo));
                auto l1 = static_cast<std::int64_t>(std::floor(hi));
                double sum = 0.0;
                double cl = cell_value(l0);
                for (std::int64_t l = l0; l <= l1; ++l) {
                    double cr = cell_value(l + 1);
                    double s0 = std::max(lo - static_cast<double>(l), 0.0);
                    double s1 = std::min(hi - static_cast<double>(l), 1.0);
                    if (s1 > s0) {
                        // exact integral of the linear interpolant over [l+s0, l+s1]
                        auto seg = [&](double r) { return cl * r + 0.5 * (cr - cl) * r * r; };
                        sum += seg(s1) - seg(s0);
                    }
                    cl = cr;
                }
                return neg ? -sum : sum;
            }
        }
        return 0.0;
    }

    double integrate(double t0, double t1) const { return antiderivative(t1) - antiderivative(t0); }

    double sup_abs() const {
        switch (family) {
            case SigmaFamily::constant:
                return std::abs(level);
            case SigmaFamily::cosine:
                return std::abs(level) + std::abs(amplitude);
            case SigmaFamily::quasi_periodic: {
                double s = std::abs(level);
                for (auto& [A, w] : modes) {
                    (void)w;
                    s += std::abs(A);
                }
                return s;
            }
            case SigmaFamily::log_oscillatory:
                return std::abs(amplitude);
            case SigmaFamily::piecewise_linear_iid:
                return std::max(std::abs(draw_lo), std::abs(draw_hi));
        }
        return 0.0;
    }

    double sup() const {
        if (family == SigmaFamily::piecewise_linear_iid) return draw_hi;
        if (family == SigmaFamily::constant) return level;
        if (family == SigmaFamily::cosine) return level + std::abs(amplitude);
        return sup_abs();
    }
};

// Composite trapezoid integration of an arbitrary time signal; O(step^2) error.
template <class F>
double trapezoid(F&& f, double t0, double t1, double step) {
    if (t1 < t0) return -trapezoid(f, t1, t0, step);
    auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((t1 - t0) / step)));
    double h = (t1 - t0) / static_cast<double>(n);
    double sum = 0.5 * (f(t0) + f(t1));
    for (std::int64_t k = 1; k < n; ++k) sum += f(t0 + h * static_cast<double>(k));
    return sum * h;
}

// ---------------------------------------------------------------------------
// Spatial profiles for the time-independent parts

enum class ProfileFamily { constant, sine_bump, cosine_mode, linear };

struct SpatialProfile {
    ProfileFamily family = ProfileFamily::constant;
    double base = 0.0;  // additive offset
    double amp = 0.0;
    int mode = 1;  // cosine_mode wavenumber

    static SpatialProfile constant(double v) { return {ProfileFamily::constant, v, 0.0, 1}; }
    // base + amp * sin(pi (x - x_lo)/L)
    static SpatialProfile sine_bump(double base, double amp) {
        return {ProfileFamily::sine_bump, base, amp, 1};
    }
    // base + amp * cos(k pi (x - x_lo)/L)
    static SpatialProfile cosine_mode(double base, double amp, int k) {
        return {ProfileFamily::cosine_mode, base, amp, k};
    }
    // linear from base at x_lo to base+amp at x_hi
    static SpatialProfile linear(double v0, double v1) {
        return {ProfileFamily::linear, v0, v1 - v0, 1};
    }

    double value(double x, const Domain1D& dom) const {
        double s = (x - dom.x_lo) / dom.length();
        switch (family) {
            case ProfileFamily::constant:
                return base;
            case ProfileFamily::sine_bump:
                return base + amp * std::sin(kPi * s);
            case ProfileFamily::cosine_mode:
                return base + amp * std::cos(mode * kPi * s);
            case ProfileFamily::linear:
                return base + amp * s;
        }
        return base;
    }
    double min_on(const Domain1D& dom) const {
        double m = value(dom.x_lo, dom);
        for (int i = 1; i <= 256; ++i)
            m = std::min(m, value(dom.x_lo + dom.length() * i / 256.0, dom));
        return m;
    }
    double max_abs_on(const Domain1D& dom) const {
        double m = std::abs(value(dom.x_lo, dom));
        for (int i = 1; i <= 256; ++i)
            m = std::max(m, std::abs(value(dom.x_lo + dom.length() * i / 256.0, dom)));
        return m;
    }
};

// ---------------------------------------------------------------------------
// Coefficient field

enum class FieldKind {
    constant,
    time_independent,
    periodic,
    quasi_periodic,
    log_oscillatory,
    converging,
    separable_sigma,
    random_stationary,
    tabulated
};

struct Coeffs {
    double a, b, c;
};

struct FieldBounds {
    double a_sup = 0, b_sup = 0, c_sup = 0;
};

struct CoefficientField {
    FieldKind kind = FieldKind::constant;
    Domain1D domain;
    SpatialProfile a_prof = SpatialProfile::constant(1.0);
    SpatialProfile b_prof = SpatialProfile::constant(0.0);
    SpatialProfile c_prof = SpatialProfile::constant(0.0);
    std::optional<SigmaSignal> sigma;  // additive time signal on c
    // periodic-kind modulations (make the field genuinely non-separable when set)
    double a_mod_amp = 0.0;  // a = a_prof(x) * (1 + a_mod_amp cos(2 pi t / period))
    double b_mod_amp = 0.0;  // b = b_prof(x) + b_mod_amp sin(2 pi t / period)
    std::optional<double> period;
    std::optional<std::uint64_t> seed;
    bool even_reflected = false;
    double t_shift = 0.0;
    // converging kind: c += decay_amp * g_prof(x) * exp(-|t| / decay_scale)
    SpatialProfile g_prof = SpatialProfile::constant(0.0);
    double decay_amp = 0.0;
    double decay_scale = 1.0;
    // tabulated kind: piecewise-linear table for c over tab_t x tab_x, row-major
    std::vector<double> tab_t, tab_x, tab_c;

    double alpha = 1.0;  // ellipticity lower bound for a
    FieldBounds bounds;

    double effective_time(double t) const {
        double s = t + t_shift;
        return even_reflected ? std::abs(s) : s;
    }

    double a(double t, double x) const {
        double v = a_prof.value(x, domain);
        if (a_mod_amp != 0.0 && period)
            v *= 1.0 + a_mod_amp * std::cos(2.0 * kPi * effective_time(t) / *period);
        return v;
    }
    double b(double t, double x) const {
        double v = b_prof.value(x, domain);
        if (b_mod_amp != 0.0 && period)
            v += b_mod_amp * std::sin(2.0 * kPi * effective_time(t) / *period);
        return v;
    }
    double c(double t, double x) const {
        double te = effective_time(t);
        double v = c_prof.value(x, domain);
        if (sigma) v += sigma->value(te);
        if (decay_amp != 0.0)
            v += decay_amp * g_prof.value(x, domain) * std::exp(-std::abs(te) / decay_scale);
        if (!tab_c.empty()) v += tabulated_c(te, x);
        return v;
    }

    Coeffs eval(double t, double x) const {
        if (!domain.contains(x)) throw std::out_of_range("CoefficientField::eval: x outside domain");
        return {a(t, x), b(t, x), c(t, x)};
    }

    bool time_independent_ab() const { return a_mod_amp == 0.0 && b_mod_amp == 0.0; }

    // c(t,x) = c_prof(x) + sigma(t) with a, b frozen in time
    bool separable() const {
        return time_independent_ab() && decay_amp == 0.0 && tab_c.empty();
    }

    double sup_c_plus() const { return std::max(0.0, bounds.c_sup); }

    CoefficientField translated(double s) const {
        CoefficientField f = *this;
        f.t_shift += s;
        return f;
    }

    double tabulated_c(double t, double x) const {
        // clamp t to the table range; linear interpolation in t and x
        auto interp = [](const std::vector<double>& g, double v) {
            if (v <= g.front()) return std::pair<std::size_t, double>{0, 0.0};
            if (v >= g.back()) return std::pair<std::size_t, double>{g.size() - 2, 1.0};
            auto it = std::upper_bound(g.begin(), g.end(), v);
            std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
            return std::pair<std::size_t, double>{i, (v - g[i]) / (g[i + 1] - g[i])};
        };
        auto [it_, rt] = interp(tab_t, t);
        auto [ix_, rx] = interp(tab_x, x);
        std::size_t nx = tab_x.size();
        auto at = [&](std::size_t i, std::size_t j) { return tab_c[i * nx + j]; };
        double lo = (1 - rx) * at(it_, ix_) + rx * at(it_, ix_ + 1);
        double hi = (1 - rx) * at(it_ + 1, ix_) + rx * at(it_ + 1, ix_ + 1);
        return (1 - rt) * lo + rt * hi;
    }
};

// Structured family description accepted by make_field.
struct FieldSpec {
    FieldKind kind = FieldKind::constant;
    Domain1D domain;
    SpatialProfile a = SpatialProfile::constant(1.0);
    SpatialProfile b = SpatialProfile::constant(0.0);
    SpatialProfile c = SpatialProfile::constant(0.0);
    std::optional<SigmaSignal> sigma;
    double a_mod_amp = 0.0;
    double b_mod_amp = 0.0;
    std::optional<double> period;
    std::optional<std::uint64_t> seed;
    bool even_reflected = false;
    SpatialProfile g = SpatialProfile::constant(0.0);
    double decay_amp = 0.0;
    double decay_scale = 1.0;
    std::vector<double> tab_t, tab_x, tab_c;
};

inline CoefficientField make_field(const FieldSpec& spec) {
    CoefficientField f;
    f.kind = spec.kind;
    f.domain = spec.domain;
    f.a_prof = spec.a;
    f.b_prof = spec.b;
    f.c_prof = spec.c;
    f.sigma = spec.sigma;
    f.a_mod_amp = spec.a_mod_amp;
    f.b_mod_amp = spec.b_mod_amp;
    f.period = spec.period;
    f.seed = spec.seed;
    f.even_reflected = spec.even_reflected;
    f.g_prof = spec.g;
    f.decay_amp = spec.decay_amp;
    f.decay_scale = spec.decay_scale;
    f.tab_t = spec.tab_t;
    f.tab_x = spec.tab_x;
    f.tab_c = spec.tab_c;

    switch (spec.kind) {
        case FieldKind::periodic:
            if (!spec.period || !(*spec.period > 0.0))
                throw std::invalid_argument("make_field: periodic kind requires period > 0");
            if (f.sigma && f.sigma->family != SigmaFamily::cosine &&
                f.sigma->family != SigmaFamily::constant)
                throw std::invalid_argument("make_field: periodic kind takes a cosine signal");
            break;
        case FieldKind::quasi_periodic:
            if (!f.sigma || f.sigma->family != SigmaFamily::quasi_periodic)
                throw std::invalid_argument("make_field: quasi_periodic kind needs modes");
            break;
        case FieldKind::log_oscillatory:
            if (!f.sigma || f.sigma->family != SigmaFamily::log_oscillatory)
                throw std::invalid_argument("make_field: log_oscillatory kind needs a signal");
            break;
        case FieldKind::random_stationary:
            if (!f.sigma || f.sigma->family != SigmaFamily::piecewise_linear_iid)
                throw std::invalid_argument("make_field: random_stationary kind needs iid cells");
            break;
        case FieldKind::tabulated:
            if (spec.tab_t.size() < 2 || spec.tab_x.size() < 2 ||
                spec.tab_c.size() != spec.tab_t.size() * spec.tab_x.size())
                throw std::invalid_argument("make_field: malformed table");
            break;
        default:
            break;
    }

    double a_min = f.a_prof.min_on(f.domain) * (1.0 - std::abs(f.a_mod_amp));
    if (!(a_min > 0.0)) throw std::invalid_argument("make_field: nonpositive ellipticity bound");
    f.alpha = a_min;

    f.bounds.a_sup = f.a_prof.max_abs_on(f.domain) * (1.0 + std::abs(f.a_mod_amp));
    f.bounds.b_sup = f.b_prof.max_abs_on(f.domain) + std::abs(f.b_mod_amp);
    double c_sup = f.c_prof.max_abs_on(f.domain);
    if (f.sigma) c_sup += f.sigma->sup_abs();
    c_sup += std::abs(f.decay_amp) * f.g_prof.max_abs_on(f.domain);
    for (double v : f.tab_c) c_sup = std::max(c_sup, std::abs(v));
    f.bounds.c_sup = c_sup;
    return f;
}

// int_{t0}^{t1} sigma for separable fields: exact antiderivative when the
// family has one, composite trapezoid with step <= dt_quad otherwise.
inline double integral_sigma(const CoefficientField& field, double t0, double t1,
                             double dt_quad = 1e-4) {
    if (!field.separable() || !field.sigma)
        throw std::invalid_argument("integral_sigma: field has no separable time signal");
    const SigmaSignal& s = *field.sigma;
    if (s.has_exact_antiderivative()) {
        // under even reflection, int_0^t sigma(|u|) du = sign(t) F(|t|)
        auto G = [&](double t) {
            double te = t + field.t_shift;
            if (!field.even_reflected) return s.antiderivative(te);
            double F = s.antiderivative(std::abs(te));
            return te < 0.0 ? -F : F;
        };
        return G(t1) - G(t0);
    }
    return trapezoid([&](double t) { return s.value(field.effective_time(t)); }, t0, t1, dt_quad);
}

}  // namespace floqrate
