// Scenario configuration, experiment orchestration and report emission.
// Configurations and reports are JSON documents; traces are CSV. Floats are
// serialized with 17 significant digits, so identical (config, seed) pairs
// reproduce byte-identical reports up to the timing block.
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <queue>
#include <thread>

#include <json.hpp>

#include "floqrate/eigensolve.hpp"
#include "floqrate/kpp.hpp"

namespace floqrate {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kLibraryVersion = "0.1.0";

// ---------------------------------------------------------------------------
// config model

enum class ExperimentKind {
    eigen_report,
    synthetic_growth,
    kpp_persistence,
    kpp_entire,
    kpp_uniqueness,
    mp_decay,
    translate_scan,
    oracle_crosscheck
};

struct ExperimentConfig {
    ExperimentKind kind;
    std::string name;
    json params;  // validated per kind at parse time
};

struct ScenarioConfig {
    std::string name;
    Domain1D domain;
    FieldSpec field_spec;
    int n_interior = 199;
    double dt = 1e-3;
    double theta = 1.0;
    bool richardson = true;
    std::string burn_in_mode = "auto";  // "auto" or a number
    double burn_in = 0.0;
    double t_max_plus = 50.0;
    double t_max_minus = 50.0;
    std::size_t record_stride = 10;
    std::vector<double> T_list;
    std::size_t s_stride = 1;
    double tail_fraction = 0.4;
    std::vector<ExperimentConfig> experiments;
    std::uint64_t seed = 0;
    json echo;  // the parsed document, defaults filled
};

namespace cfg {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw std::invalid_argument("scenario config: " + path + ": " + msg);
}

inline void expect_keys(const json& j, const std::string& path,
                        std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) fail(path + "." + k, "unknown key");
    }
}

inline double num(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

inline double req_num(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing");
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

inline SpatialProfile parse_profile(const json& j, const std::string& path) {
    expect_keys(j, path, {"type", "value", "base", "amp", "mode", "v0", "v1"});
    std::string type = j.value("type", "constant");
    if (type == "constant") return SpatialProfile::constant(num(j, path, "value", 0.0));
    if (type == "sine_bump")
        return SpatialProfile::sine_bump(num(j, path, "base", 0.0), req_num(j, path, "amp"));
    if (type == "cosine_mode")
        return SpatialProfile::cosine_mode(num(j, path, "base", 0.0), req_num(j, path, "amp"),
                                           static_cast<int>(num(j, path, "mode", 1)));
    if (type == "linear")
        return SpatialProfile::linear(req_num(j, path, "v0"), req_num(j, path, "v1"));
    fail(path + ".type", "unknown profile type '" + type + "'");
}

inline SigmaSignal parse_sigma(const json& j, const std::string& path, std::uint64_t dflt_seed) {
    expect_keys(j, path,
                {"family", "value", "mean", "amplitude", "period", "modes", "seed", "lo", "hi"});
    if (!j.contains("family")) fail(path + ".family", "missing");
    std::string fam = j["family"].get<std::string>();
    if (fam == "constant") return SigmaSignal::constant(num(j, path, "value", 0.0));
    if (fam == "cosine")
        return SigmaSignal::cosine(num(j, path, "mean", 0.0), req_num(j, path, "amplitude"),
                                   num(j, path, "period", 1.0));
    if (fam == "quasi_periodic") {
        if (!j.contains("modes") || !j["modes"].is_array()) fail(path + ".modes", "missing");
        std::vector<std::pair<double, double>> modes;
        for (auto& mj : j["modes"]) {
            if (!mj.is_array() || mj.size() != 2) fail(path + ".modes", "expected [amp, omega]");
            modes.emplace_back(mj[0].get<double>(), mj[1].get<double>());
        }
        return SigmaSignal::quasi_periodic(std::move(modes));
    }
    if (fam == "log_oscillatory") return SigmaSignal::log_oscillatory(req_num(j, path, "amplitude"));
    if (fam == "piecewise_linear_iid") {
        auto seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : dflt_seed;
        return SigmaSignal::piecewise_linear_iid(seed, num(j, path, "lo", 0.0),
                                                 num(j, path, "hi", 1.0));
    }
    fail(path + ".family", "unknown signal family '" + fam + "'");
}

inline FieldKind parse_kind(const std::string& s, const std::string& path) {
    if (s == "constant") return FieldKind::constant;
    if (s == "time_independent") return FieldKind::time_independent;
    if (s == "periodic") return FieldKind::periodic;
    if (s == "quasi_periodic") return FieldKind::quasi_periodic;
    if (s == "log_oscillatory") return FieldKind::log_oscillatory;
    if (s == "converging") return FieldKind::converging;
    if (s == "separable_sigma") return FieldKind::separable_sigma;
    if (s == "random_stationary") return FieldKind::random_stationary;
    if (s == "tabulated") return FieldKind::tabulated;
    fail(path, "unknown coefficient kind '" + s + "'");
}

inline ExperimentKind parse_experiment_kind(const std::string& s, const std::string& path) {
    if (s == "eigen_report") return ExperimentKind::eigen_report;
    if (s == "synthetic_growth") return ExperimentKind::synthetic_growth;
    if (s == "kpp_persistence") return ExperimentKind::kpp_persistence;
    if (s == "kpp_entire") return ExperimentKind::kpp_entire;
    if (s == "kpp_uniqueness") return ExperimentKind::kpp_uniqueness;
    if (s == "mp_decay") return ExperimentKind::mp_decay;
    if (s == "translate_scan") return ExperimentKind::translate_scan;
    if (s == "oracle_crosscheck") return ExperimentKind::oracle_crosscheck;
    fail(path, "unknown experiment kind '" + s + "'");
}

}  // namespace cfg

inline ScenarioConfig parse_scenario(const json& doc) {
    using namespace cfg;
    expect_keys(doc, "$",
                {"name", "domain", "coefficients", "discretization", "horizons", "growthrate",
                 "experiments", "seed"});
    ScenarioConfig sc;
    if (!doc.contains("name") || !doc["name"].is_string()) fail("$.name", "missing string");
    sc.name = doc["name"].get<std::string>();
    sc.seed = doc.value("seed", std::uint64_t{0});

    if (!doc.contains("domain")) fail("$.domain", "missing");
    expect_keys(doc["domain"], "$.domain", {"x_lo", "x_hi"});
    double x_lo = req_num(doc["domain"], "$.domain", "x_lo");
    double x_hi = req_num(doc["domain"], "$.domain", "x_hi");
    if (!(x_hi > x_lo)) fail("$.domain", "x_hi must exceed x_lo");
    sc.domain = Domain1D(x_lo, x_hi);

    if (!doc.contains("coefficients")) fail("$.coefficients", "missing");
    const json& cj = doc["coefficients"];
    expect_keys(cj, "$.coefficients",
                {"kind", "a", "b", "c", "sigma", "period", "a_mod_amp", "b_mod_amp", "seed",
                 "even_reflected", "decay", "table"});
    FieldSpec fs;
    fs.domain = sc.domain;
    fs.kind = parse_kind(cj.value("kind", "constant"), "$.coefficients.kind");
    if (cj.contains("a")) fs.a = parse_profile(cj["a"], "$.coefficients.a");
    if (cj.contains("b")) fs.b = parse_profile(cj["b"], "$.coefficients.b");
    if (cj.contains("c")) fs.c = parse_profile(cj["c"], "$.coefficients.c");
    if (cj.contains("sigma")) fs.sigma = parse_sigma(cj["sigma"], "$.coefficients.sigma", sc.seed);
    if (cj.contains("period")) fs.period = req_num(cj, "$.coefficients", "period");
    fs.a_mod_amp = num(cj, "$.coefficients", "a_mod_amp", 0.0);
    fs.b_mod_amp = num(cj, "$.coefficients", "b_mod_amp", 0.0);
    if (cj.contains("seed")) fs.seed = cj["seed"].get<std::uint64_t>();
    fs.even_reflected = cj.value("even_reflected", false);
    if (cj.contains("decay")) {
        expect_keys(cj["decay"], "$.coefficients.decay", {"g", "amplitude", "scale"});
        if (cj["decay"].contains("g"))
            fs.g = parse_profile(cj["decay"]["g"], "$.coefficients.decay.g");
        fs.decay_amp = req_num(cj["decay"], "$.coefficients.decay", "amplitude");
        fs.decay_scale = num(cj["decay"], "$.coefficients.decay", "scale", 1.0);
    }
    if (cj.contains("table")) {
        expect_keys(cj["table"], "$.coefficients.table", {"t", "x", "c"});
        fs.tab_t = cj["table"]["t"].get<std::vector<double>>();
        fs.tab_x = cj["table"]["x"].get<std::vector<double>>();
        fs.tab_c = cj["table"]["c"].get<std::vector<double>>();
    }
    sc.field_spec = fs;
    CoefficientField field = make_field(fs);  // validates the family now

    const json dj = doc.value("discretization", json::object());
    expect_keys(dj, "$.discretization", {"n_interior", "dt", "theta", "richardson"});
    sc.n_interior = static_cast<int>(num(dj, "$.discretization", "n_interior", 199));
    sc.dt = num(dj, "$.discretization", "dt", 1e-3);
    sc.theta = num(dj, "$.discretization", "theta", 1.0);
    sc.richardson = dj.value("richardson", true);
    if (sc.n_interior < 3) fail("$.discretization.n_interior", "must be >= 3");
    if (!(sc.dt > 0.0)) fail("$.discretization.dt", "must be positive");
    if (sc.theta != 1.0 && sc.theta != 0.5) fail("$.discretization.theta", "must be 1 or 0.5");
    if (!(sc.dt * field.sup_c_plus() < 1.0))
        fail("$.discretization.dt",
             "dt * sup c+ must stay below 1 (monotone implicit update)");

    const json hj = doc.value("horizons", json::object());
    expect_keys(hj, "$.horizons", {"burn_in", "t_max_plus", "t_max_minus", "record_stride"});
    sc.t_max_plus = num(hj, "$.horizons", "t_max_plus", 50.0);
    sc.t_max_minus = num(hj, "$.horizons", "t_max_minus", 50.0);
    if (!(sc.t_max_plus > 0.0) || !(sc.t_max_minus > 0.0))
        fail("$.horizons", "horizons must be positive");
    sc.record_stride = static_cast<std::size_t>(num(hj, "$.horizons", "record_stride", 10));
    if (sc.record_stride == 0) fail("$.horizons.record_stride", "must be >= 1");
    if (sc.richardson && sc.record_stride % 2 != 0 && sc.record_stride != 1) {
        // coarse companion runs at 2 dt with half the stride
        fail("$.horizons.record_stride", "must be even when richardson is on");
    }
    if (hj.contains("burn_in")) {
        if (hj["burn_in"].is_string()) {
            if (hj["burn_in"].get<std::string>() != "auto")
                fail("$.horizons.burn_in", "expected a number or \"auto\"");
            sc.burn_in_mode = "auto";
        } else {
            sc.burn_in_mode = "fixed";
            sc.burn_in = req_num(hj, "$.horizons", "burn_in");
            if (!(sc.burn_in > 0.0)) fail("$.horizons.burn_in", "must be positive");
        }
    }

    const json gj = doc.value("growthrate", json::object());
    expect_keys(gj, "$.growthrate", {"T_list", "s_stride", "tail_fraction"});
    if (gj.contains("T_list"))
        sc.T_list = gj["T_list"].get<std::vector<double>>();
    else {
        double tm = std::min(sc.t_max_plus, sc.t_max_minus);
        sc.T_list = {tm / 12.0, tm / 8.0, tm / 4.0, tm / 2.0};
    }
    double t_cap = std::min(sc.t_max_plus, sc.t_max_minus) / 2.0;
    for (double T : sc.T_list) {
        if (!(T > 0.0)) fail("$.growthrate.T_list", "windows must be positive");
        if (T > t_cap + 1e-9)
            fail("$.growthrate.T_list", "window exceeds half the shorter horizon");
    }
    sc.s_stride = static_cast<std::size_t>(num(gj, "$.growthrate", "s_stride", 1));
    sc.tail_fraction = num(gj, "$.growthrate", "tail_fraction", 0.4);
    if (!(sc.tail_fraction > 0.0 && sc.tail_fraction < 1.0))
        fail("$.growthrate.tail_fraction", "must lie in (0, 1)");

    const json ej = doc.value("experiments", json::array());
    if (!ej.is_array()) fail("$.experiments", "expected an array");
    for (std::size_t i = 0; i < ej.size(); ++i) {
        std::string path = "$.experiments[" + std::to_string(i) + "]";
        const json& x = ej[i];
        if (!x.is_object() || !x.contains("kind")) fail(path, "missing kind");
        ExperimentConfig ec;
        ec.kind = cfg::parse_experiment_kind(x["kind"].get<std::string>(), path + ".kind");
        ec.name = x.value("name", std::string("exp") + std::to_string(i));
        switch (ec.kind) {
            case ExperimentKind::eigen_report:
                expect_keys(x, path, {"kind", "name"});
                break;
            case ExperimentKind::synthetic_growth:
                expect_keys(x, path, {"kind", "name", "t_span", "dt_record"});
                break;
            case ExperimentKind::kpp_persistence:
                expect_keys(x, path, {"kind", "name", "form", "n_coef", "horizon", "margin",
                                      "amplitude"});
                break;
            case ExperimentKind::kpp_entire:
                expect_keys(x, path, {"kind", "name", "form", "n_coef", "n_list", "anchor"});
                break;
            case ExperimentKind::kpp_uniqueness:
                expect_keys(x, path, {"kind", "name", "form", "n_coef", "n_list", "anchor",
                                      "second_datum_level"});
                break;
            case ExperimentKind::mp_decay:
                expect_keys(x, path, {"kind", "name", "T_list", "rate_margin"});
                break;
            case ExperimentKind::translate_scan:
                expect_keys(x, path, {"kind", "name", "shifts", "horizon"});
                break;
            case ExperimentKind::oracle_crosscheck:
                expect_keys(x, path, {"kind", "name", "frozen_at"});
                break;
        }
        ec.params = x;
        ec.params.erase("kind");
        ec.params.erase("name");
        for (auto& prev : sc.experiments)
            if (prev.name == ec.name) fail(path + ".name", "duplicate experiment name");
        sc.experiments.push_back(std::move(ec));
    }

    // echo with defaults filled
    json echo = doc;
    echo["discretization"] = {{"n_interior", sc.n_interior},
                              {"dt", sc.dt},
                              {"theta", sc.theta},
                              {"richardson", sc.richardson}};
    echo["horizons"] = {{"burn_in", sc.burn_in_mode == "auto" ? json("auto") : json(sc.burn_in)},
                        {"t_max_plus", sc.t_max_plus},
                        {"t_max_minus", sc.t_max_minus},
                        {"record_stride", sc.record_stride}};
    echo["growthrate"] = {{"T_list", sc.T_list},
                          {"s_stride", sc.s_stride},
                          {"tail_fraction", sc.tail_fraction}};
    echo["seed"] = sc.seed;
    sc.echo = echo;
    return sc;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
    json doc = json::parse(text);
    return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// small bounded worker pool (experiments are independent)

namespace detail {

class WorkerPool {
  public:
    explicit WorkerPool(unsigned n) {
        n = std::max(1u, n);
        for (unsigned i = 0; i < n; ++i)
            threads_.emplace_back([this] { run(); });
    }
    ~WorkerPool() {
        {
            std::lock_guard lk(mu_);
            done_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }
    void submit(std::function<void()> f) {
        {
            std::lock_guard lk(mu_);
            work_.push(std::move(f));
            ++pending_;
        }
        cv_.notify_one();
    }
    void wait() {
        std::unique_lock lk(mu_);
        idle_.wait(lk, [this] { return pending_ == 0; });
    }

  private:
    void run() {
        for (;;) {
            std::function<void()> f;
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [this] { return done_ || !work_.empty(); });
                if (work_.empty()) {
                    if (done_) return;
                    continue;
                }
                f = std::move(work_.front());
                work_.pop();
            }
            f();
            {
                std::lock_guard lk(mu_);
                --pending_;
            }
            idle_.notify_all();
        }
    }
    std::mutex mu_;
    std::condition_variable cv_, idle_;
    std::queue<std::function<void()>> work_;
    std::vector<std::thread> threads_;
    std::size_t pending_ = 0;
    bool done_ = false;
};

inline json estimate_json(const Estimate& e) {
    json ft = json::object();
    char buf[40];
    for (auto& [T, v] : e.finite_T_values) {
        std::snprintf(buf, sizeof buf, "%.17g", T);
        ft[buf] = v;
    }
    return {{"value", e.value},
            {"trust_radius", e.trust_radius},
            {"extrapolation_residual", e.extrapolation_residual},
            {"converged", e.converged},
            {"finite_T_values", ft}};
}

inline json entries_json(const IntervalEntries& e) {
    json j = json::object();
    auto put = [&](const char* k, const std::optional<Estimate>& est) {
        if (est) j[k] = estimate_json(*est);
    };
    put("mu_bp", e.mu_bp);
    put("lambda_bp", e.lambda_bp);
    put("mu_p", e.mu_p);
    put("lambda_b", e.lambda_b);
    put("mu_b", e.mu_b);
    put("lambda_p", e.lambda_p);
    return j;
}

inline json report_json(const GrowthRateReport& r) {
    return {{"intervals",
             {{"R", entries_json(r.R)},
              {"R_plus", entries_json(r.Rplus)},
              {"R_minus", entries_json(r.Rminus)}}},
            {"invariants",
             {{"chain_R", r.chain_ok_R},
              {"chain_R_plus", r.chain_ok_plus},
              {"chain_R_minus", r.chain_ok_minus},
              {"split_mu_bp", r.split_mu_ok},
              {"split_lambda_bp", r.split_lambda_ok}}},
            {"sup_c", r.sup_c},
            {"richardson", r.richardson}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// experiment implementations

struct ScenarioContext {
    ScenarioConfig cfg;
    CoefficientField field;
    Mesh mesh;
    StepScheme scheme;
    double burn_in = 2.0;
    std::filesystem::path out_dir;
    bool write_traces = true;
};

// PDE-path trace triple (fine scheme), optionally with the 2 dt companion.
inline TraceTriple pipeline_traces(const ScenarioContext& ctx, double dt_factor,
                                   std::size_t record_stride) {
    StepScheme sch{ctx.scheme.theta, ctx.scheme.dt * dt_factor, ctx.scheme.positivity_guard};
    TraceTriple tt;
    tt.R = compute_bundle(ctx.field, ctx.mesh, sch, IntervalTag::R, -ctx.cfg.t_max_minus,
                          ctx.cfg.t_max_plus, ctx.burn_in, record_stride);
    tt.plus = tt.R.restrict(0.0, ctx.cfg.t_max_plus, IntervalTag::Rplus);
    tt.minus = tt.R.restrict(-ctx.cfg.t_max_minus, 0.0, IntervalTag::Rminus);
    tt.plus.anchor_at(0.0);
    tt.minus.anchor_at(0.0);
    return tt;
}

inline GrowthRateReport run_eigen_report(const ScenarioContext& ctx) {
    ReportOptions opt{ctx.cfg.T_list, ctx.cfg.s_stride, ctx.cfg.tail_fraction};
    auto fine = pipeline_traces(ctx, 1.0, ctx.cfg.record_stride);
    if (ctx.write_traces)
        write_trace_csv((ctx.out_dir / (ctx.cfg.name + "_trace_R.csv")).string(), fine.R);
    if (!ctx.cfg.richardson) return eigen_report(fine, nullptr, opt, ctx.field.sup_c_plus());
    auto coarse = pipeline_traces(ctx, 2.0, std::max<std::size_t>(1, ctx.cfg.record_stride / 2));
    return eigen_report(fine, &coarse, opt, ctx.field.sup_c_plus());
}

// Synthetic-path triple for separable fields: beta = -lambda0 t + int sigma
// with lambda0 the frozen Dirichlet eigenvalue of the sigma-free part.
inline GrowthRateReport run_synthetic_growth(const ScenarioContext& ctx, double t_span,
                                             double dt_record, json* extra) {
    if (!ctx.field.separable() || !ctx.field.sigma)
        throw std::invalid_argument("synthetic_growth: field is not separable");
    CoefficientField frozen = ctx.field;
    frozen.sigma.reset();
    double lambda0 = dirichlet_eigen(frozen, ctx.mesh).value;
    if (extra) (*extra)["lambda0"] = lambda0;
    TraceTriple tt;
    tt.R = make_synthetic_trace(lambda0, *ctx.field.sigma, -t_span, t_span, dt_record,
                                IntervalTag::R);
    tt.plus = tt.R.restrict(0.0, t_span, IntervalTag::Rplus);
    tt.minus = tt.R.restrict(-t_span, 0.0, IntervalTag::Rminus);
    tt.plus.anchor_at(0.0);
    tt.minus.anchor_at(0.0);
    ReportOptions opt{ctx.cfg.T_list, ctx.cfg.s_stride, ctx.cfg.tail_fraction};
    return eigen_report(tt, nullptr, opt, ctx.field.sup_c_plus());
}

inline json run_experiment(const ScenarioContext& ctx, const ExperimentConfig& ec,
                           std::vector<std::pair<std::string, bool>>& invariants,
                           std::mutex& inv_mu) {
    using cfg::num;
    const std::string path = "$.experiments." + ec.name;
    auto push_inv = [&](const std::string& name, bool pass) {
        std::lock_guard lk(inv_mu);
        invariants.emplace_back(ec.name + ":" + name, pass);
    };
    switch (ec.kind) {
        case ExperimentKind::eigen_report: {
            auto rep = run_eigen_report(ctx);
            push_inv("chain_R", rep.chain_ok_R);
            push_inv("chain_R_plus", rep.chain_ok_plus);
            push_inv("chain_R_minus", rep.chain_ok_minus);
            push_inv("split_mu_bp", rep.split_mu_ok);
            push_inv("split_lambda_bp", rep.split_lambda_ok);
            return detail::report_json(rep);
        }
        case ExperimentKind::synthetic_growth: {
            double t_span = num(ec.params, path, "t_span", 1e5);
            double dt_record = num(ec.params, path, "dt_record", 0.25);
            json extra;
            auto rep = run_synthetic_growth(ctx, t_span, dt_record, &extra);
            push_inv("chain_R", rep.chain_ok_R);
            push_inv("chain_R_plus", rep.chain_ok_plus);
            push_inv("chain_R_minus", rep.chain_ok_minus);
            push_inv("split_mu_bp", rep.split_mu_ok);
            push_inv("split_lambda_bp", rep.split_lambda_ok);
            json out = detail::report_json(rep);
            out["lambda0"] = extra["lambda0"];
            return out;
        }
        case ExperimentKind::kpp_persistence: {
            std::string form = ec.params.value("form", "quadratic");
            auto fspec = NonlinearitySpec::make(
                ctx.field, form == "cubic" ? LogisticForm::cubic : LogisticForm::quadratic,
                SpatialProfile::constant(num(ec.params, path, "n_coef", 1.0)));
            PersistenceOptions opt;
            opt.horizon = num(ec.params, path, "horizon", 100.0);
            opt.margin = num(ec.params, path, "margin", 0.05);
            opt.T_list = ctx.cfg.T_list;
            opt.burn_in = ctx.burn_in;
            auto st = make_initial_state(ctx.mesh, 0.0);
            double amp = num(ec.params, path, "amplitude", 0.1);
            for (double& v : st.profile) v *= amp;
            auto v = persistence_verdict(ctx.field, fspec, st.profile, ctx.mesh, ctx.scheme, opt);
            push_inv("verdict_eigenvalue_consistency", v.consistent);
            return {{"verdict", to_string(v.verdict)}, {"floor", v.floor},
                    {"mu_bp_plus", v.mu_bp_plus}, {"decay_rate", v.decay_rate},
                    {"margin", v.margin},         {"consistent", v.consistent}};
        }
        case ExperimentKind::kpp_entire: {
            std::string form = ec.params.value("form", "quadratic");
            auto fspec = NonlinearitySpec::make(
                ctx.field, form == "cubic" ? LogisticForm::cubic : LogisticForm::quadratic,
                SpatialProfile::constant(num(ec.params, path, "n_coef", 1.0)));
            std::vector<double> n_list =
                ec.params.contains("n_list")
                    ? ec.params["n_list"].get<std::vector<double>>()
                    : std::vector<double>{4, 8, 16, 24, 32, 44};
            auto pb = entire_solution_pullback(ctx.field, fspec, n_list,
                                               num(ec.params, path, "anchor", 0.0), ctx.mesh,
                                               ctx.scheme);
            push_inv("pullback_monotone", pb.monotone);
            double sup = 0.0;
            for (double u : pb.window_final.back()) sup = std::max(sup, u);
            return {{"gaps", pb.gaps},
                    {"monotone", pb.monotone},
                    {"interior_floor", pb.interior_floor},
                    {"final_sup", sup}};
        }
        case ExperimentKind::kpp_uniqueness: {
            std::string form = ec.params.value("form", "quadratic");
            auto fspec = NonlinearitySpec::make(
                ctx.field, form == "cubic" ? LogisticForm::cubic : LogisticForm::quadratic,
                SpatialProfile::constant(num(ec.params, path, "n_coef", 1.0)));
            std::vector<double> n_list =
                ec.params.contains("n_list") ? ec.params["n_list"].get<std::vector<double>>()
                                             : std::vector<double>{10, 20, 40};
            std::vector<double> second(ctx.mesh.n_interior,
                                       fspec.M * num(ec.params, path, "second_datum_level", 0.5));
            auto gaps = ancient_uniqueness_gap(ctx.field, fspec, n_list, second,
                                               num(ec.params, path, "anchor", 0.0), ctx.mesh,
                                               ctx.scheme);
            push_inv("uniqueness_gap_decay", gaps.back() <= gaps.front() + 1e-12);
            return {{"n_list", n_list}, {"gaps", gaps}};
        }
        case ExperimentKind::mp_decay: {
            std::vector<double> T_list =
                ec.params.contains("T_list") ? ec.params["T_list"].get<std::vector<double>>()
                                             : std::vector<double>{5, 10, 20, 30, 40};
            std::vector<double> u0(ctx.mesh.n_interior, 1.0);
            auto r = mp_decay_test(ctx.field, ctx.mesh, ctx.scheme, u0, T_list,
                                   num(ec.params, path, "rate_margin", 0.02));
            return {{"T_values", r.T_values},
                    {"log_sup_at_zero", r.log_sup_at_zero},
                    {"fitted_rate", r.fitted_rate},
                    {"inconclusive", r.inconclusive}};
        }
        case ExperimentKind::translate_scan: {
            std::vector<double> shifts =
                ec.params.contains("shifts") ? ec.params["shifts"].get<std::vector<double>>()
                                             : std::vector<double>{0.0, 1.0, 2.0, 5.0};
            double horizon = num(ec.params, path, "horizon", 30.0);
            auto scan = translate_scan(ctx.field, ctx.mesh, ctx.scheme, shifts, horizon,
                                       ctx.burn_in, ctx.cfg.tail_fraction);
            json per = json::object();
            double mx = -1e300, mn = 1e300;
            char buf[40];
            for (auto& [s, v] : scan) {
                std::snprintf(buf, sizeof buf, "%.17g", s);
                per[buf] = {{"mu_p", v.first}, {"lambda_b", v.second}};
                mx = std::max(mx, v.first);
                mn = std::min(mn, v.second);
            }
            return {{"per_shift", per}, {"max_mu_p", mx}, {"min_lambda_b", mn}};
        }
        case ExperimentKind::oracle_crosscheck: {
            json out;
            double frozen_at = num(ec.params, path, "frozen_at", 0.0);
            auto eig = dirichlet_eigen(ctx.field, ctx.mesh, frozen_at);
            out["dirichlet_eigen"] = {{"value", eig.value},
                                      {"residual", eig.residual},
                                      {"iterations", eig.iterations},
                                      {"frozen_at", frozen_at}};
            if (ctx.field.period) {
                double v = periodic_eigen_richardson(ctx.field, ctx.mesh, ctx.scheme,
                                                     *ctx.field.period);
                out["periodic_eigen"] = {{"value", v}, {"period", *ctx.field.period}};
            }
            bool diffusion_only = true;
            for (int i = 0; i < ctx.mesh.n_interior && diffusion_only; i += 7) {
                auto v = ctx.field.eval(frozen_at, ctx.mesh.nodes[i]);
                diffusion_only = std::abs(v.a - 1.0) < 1e-12 && std::abs(v.b) < 1e-12;
            }
            if (diffusion_only) {
                double bound = averaged_lower_bound(ctx.field, ctx.mesh, 0.0,
                                                    std::min(ctx.cfg.t_max_plus, 64.0), 1024);
                out["averaged_lower_bound"] = bound;
            }
            return out;
        }
    }
    throw std::logic_error("run_experiment: unhandled kind");
}

// ---------------------------------------------------------------------------
// scenario runner

struct RunReport {
    json document;
    bool all_invariants_pass = true;
};

inline RunReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                              unsigned threads = 2, bool write_files = true) {
    auto t_begin = std::chrono::steady_clock::now();
    ScenarioContext ctx{cfg,
                        make_field(cfg.field_spec),
                        build_mesh(cfg.domain, cfg.n_interior),
                        StepScheme{cfg.theta, cfg.dt, true},
                        2.0,
                        out_dir,
                        write_files};
    if (write_files) std::filesystem::create_directories(out_dir);
    double gamma_est = 0.0;
    if (cfg.burn_in_mode == "auto") {
        gamma_est = estimate_gamma(ctx.field, ctx.mesh);
        ctx.burn_in = 8.0 / std::max(gamma_est, 1e-3);
    } else {
        ctx.burn_in = cfg.burn_in;
    }

    std::vector<json> results(cfg.experiments.size());
    std::vector<double> seconds(cfg.experiments.size(), 0.0);
    std::vector<std::pair<std::string, bool>> invariants;
    std::mutex inv_mu;
    {
        detail::WorkerPool pool(threads);
        for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
            pool.submit([&, i] {
                auto t0 = std::chrono::steady_clock::now();
                try {
                    results[i] = run_experiment(ctx, cfg.experiments[i], invariants, inv_mu);
                } catch (const std::exception& ex) {
                    results[i] = {{"error", ex.what()}};  // siblings keep running
                    std::lock_guard lk(inv_mu);
                    invariants.emplace_back(cfg.experiments[i].name + ":completed", false);
                }
                seconds[i] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            });
        }
        pool.wait();
    }

    RunReport rep;
    json res = json::object();
    json timing_per = json::object();
    for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
        res[cfg.experiments[i].name] = results[i];
        timing_per[cfg.experiments[i].name] = seconds[i];
    }
    std::sort(invariants.begin(), invariants.end());
    json inv = json::array();
    for (auto& [name, pass] : invariants) {
        inv.push_back({{"name", name}, {"pass", pass}});
        rep.all_invariants_pass = rep.all_invariants_pass && pass;
    }
    rep.document = {{"schema_version", kSchemaVersion},
                    {"scenario", cfg.echo},
                    {"burn_in_used", ctx.burn_in},
                    {"gamma_estimate", gamma_est},
                    {"results", res},
                    {"invariants", inv},
                    {"timing",
                     {{"total_seconds",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
                           .count()},
                      {"per_experiment", timing_per}}},
                    {"versions", {{"floqrate", kLibraryVersion}, {"schema", kSchemaVersion}}}};
    if (write_files) {
        std::ofstream out(out_dir / (cfg.name + "_report.json"));
        out << rep.document.dump(2) << "\n";
    }
    return rep;
}

}  // namespace floqrate
