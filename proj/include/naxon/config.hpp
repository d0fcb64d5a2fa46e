#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "naxon/bench.hpp"
#include "naxon/errors.hpp"
#include "naxon/models.hpp"
#include "naxon/noise.hpp"
#include "naxon/solver.hpp"

namespace naxon {

using json = nlohmann::json;

struct InitialSpec {
    std::string u_kind = "constant";  // constant | cosine: value + amplitude cos(pi x)
    double u_value = 0.0;
    double u_amplitude = 0.0;
    std::string x_kind = "constant";  // constant | cosine | steady_state (hh)
    double x_value = 0.0;
    double x_amplitude = 0.0;

    bool operator==(const InitialSpec&) const = default;
};

struct AuditSpec {
    double u_lo = -3.0;
    double u_hi = 3.0;
    std::size_t samples = 20000;

    bool operator==(const AuditSpec&) const = default;
};

struct OUStatsSpec {
    std::vector<std::size_t> n_list{16, 64, 256};
    std::size_t paths = 500;
    double dt = 2e-3;
    double T = 1.0;
    double nu = 1.0;
    std::vector<double> quantiles{0.5, 0.9, 0.95, 0.99};

    bool operator==(const OUStatsSpec&) const = default;
};

struct RunConfig {
    std::string model = "fhn";  // hh | fhn | custom | heat
    HHParams hh;
    FHNParams fhn;
    CustomParams custom;
    std::map<std::string, double> declared;  // overrides of the model's declared constants
    NoiseSpec noise;
    InitialSpec initial;
    std::size_t n = 64;
    SolverConfig time;
    std::vector<std::uint64_t> seeds{1};
    bool write_csv = true;
    bool write_binary = true;
    HierarchySpec converge;
    AuditSpec audit;
    OUStatsSpec ou;
    double g_process_K = 1.0;
    double margin_R = 1.0;
    bool skip_audit = false;
    int quad_points = 4;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

// Object reader that records consumed keys so leftovers can be rejected.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a JSON object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <typename T>
    void get(const std::string& key, T& out) {
        if (!j_.contains(key)) return;
        used_.insert(key);
        const auto& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(key_path(key), "expected a boolean");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) throw ConfigError(key_path(key), "expected a non-negative integer");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
        }
        try {
            out = v.get<T>();
        } catch (const json::exception&) {
            throw ConfigError(key_path(key), "wrong type");
        }
    }

    Section sub(const std::string& key) {
        used_.insert(key);
        return Section(j_.contains(key) ? j_.at(key) : empty(), key_path(key));
    }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!used_.count(k)) throw ConfigError(key_path(k), "unknown key");
        }
    }

private:
    static const json& empty() {
        static const json e = json::object();
        return e;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline RateShape::Kind parse_shape(const std::string& s, const std::string& key) {
    if (s == "linexp") return RateShape::Kind::LinExp;
    if (s == "exp") return RateShape::Kind::Exp;
    if (s == "sigmoid") return RateShape::Kind::Sigmoid;
    throw ConfigError(key, "unknown rate shape '" + s + "' (linexp | exp | sigmoid)");
}

inline std::string shape_name(RateShape::Kind k) {
    switch (k) {
        case RateShape::Kind::LinExp: return "linexp";
        case RateShape::Kind::Exp: return "exp";
        case RateShape::Kind::Sigmoid: return "sigmoid";
    }
    return "linexp";
}

inline void read_rate(Section s, RateShape& r) {
    std::string shape = shape_name(r.kind);
    s.get("shape", shape);
    r.kind = parse_shape(shape, s.key_path("shape"));
    s.get("c1", r.c1);
    s.get("c2", r.c2);
    s.get("shift", r.shift);
    s.finish();
}

inline json rate_json(const RateShape& r) {
    return {{"shape", shape_name(r.kind)}, {"c1", r.c1}, {"c2", r.c2}, {"shift", r.shift}};
}

inline void read_kernel(Section s, KernelSpec& k) {
    s.get("name", k.name);
    s.get("amplitude", k.amplitude);
    s.get("length", k.length);
    s.finish();
    if (std::find(kernel_names().begin(), kernel_names().end(), k.name) == kernel_names().end()) {
        throw ConfigError(s.key_path("name"), "unknown kernel '" + k.name + "'");
    }
}

inline json kernel_json(const KernelSpec& k) {
    return {{"name", k.name}, {"amplitude", k.amplitude}, {"length", k.length}};
}

inline const std::vector<std::string>& declared_keys() {
    static const std::vector<std::string> keys{"L", "r", "rho0", "alpha", "rho_scale", "K", "kappa_K"};
    return keys;
}

inline void apply_declared(DeclaredConstants& c, const std::map<std::string, double>& m) {
    for (const auto& [k, v] : m) {
        if (k == "L") c.L = v;
        else if (k == "r") c.r = v;
        else if (k == "rho0") c.rho0 = v;
        else if (k == "alpha") c.alpha = v;
        else if (k == "rho_scale") c.rho_scale = v;
        else if (k == "K") c.K = v;
        else if (k == "kappa_K") c.kappa_K = v;
    }
}

inline std::vector<std::string> model_names() { return {"hh", "fhn", "custom", "heat"}; }

}  // namespace detail

/// Declared constants of the configured model before the margin and weight constants are applied.
inline DeclaredConstants base_declared(const RunConfig& c) {
    DeclaredConstants d;
    if (c.model == "hh") d = hh_declared_constants(c.hh);
    else if (c.model == "fhn") d = make_fhn_model(c.fhn, NoiseSpec{{"zero"}, {"zero"}, false}).declared;
    else if (c.model == "custom") d = c.custom.declared;
    else d = make_heat_model().declared;
    detail::apply_declared(d, c.declared);
    return d;
}

/**
 * Parses a run config. Missing keys take defaults (some depend on the model);
 * unknown keys and type mismatches raise ConfigError naming the key.
 */
inline RunConfig parse_config(const json& j) {
    RunConfig c;
    detail::Section root(j, "");
    root.get("model", c.model);
    const auto names = detail::model_names();
    if (std::find(names.begin(), names.end(), c.model) == names.end()) {
        throw ConfigError("model", "unknown model '" + c.model + "' (hh | fhn | custom | heat)");
    }

    {
        auto s = root.sub("hh");
        s.get("tau", c.hh.tau);
        s.get("lambda", c.hh.lambda);
        s.get("g_na", c.hh.g_na);
        s.get("g_k", c.hh.g_k);
        s.get("g_l", c.hh.g_l);
        s.get("e_na", c.hh.e_na);
        s.get("e_k", c.hh.e_k);
        s.get("e_l", c.hh.e_l);
        auto gates = s.sub("gates");
        const char* gnames[3] = {"n", "m", "h"};
        for (std::size_t i = 0; i < 3; ++i) {
            auto g = gates.sub(gnames[i]);
            detail::read_rate(g.sub("alpha"), c.hh.gates[i].alpha);
            detail::read_rate(g.sub("beta"), c.hh.gates[i].beta);
            g.get("sigma", c.hh.gates[i].sigma);
            g.finish();
        }
        gates.finish();
        s.finish();
        try {
            c.hh.validate();
        } catch (const DomainError& e) {
            throw ConfigError("hh", e.what());
        }
    }
    {
        auto s = root.sub("fhn");
        s.get("cubic", c.fhn.cubic);
        s.get("rate", c.fhn.rate);
        s.get("decay", c.fhn.decay);
        s.get("offset", c.fhn.offset);
        s.finish();
    }
    {
        auto s = root.sub("custom");
        s.get("poly_u", c.custom.poly_u);
        s.get("coupling", c.custom.coupling);
        s.get("eps", c.custom.eps);
        s.get("gamma", c.custom.gamma);
        s.get("beta", c.custom.beta);
        s.get("nu", c.custom.nu);
        s.get("gating_invariance", c.custom.gating_invariance);
        s.get("one_sided_lipschitz", c.custom.one_sided_lipschitz);
        s.finish();
        if (c.custom.poly_u.empty()) throw ConfigError("custom.poly_u", "need at least one coefficient");
        if (!(c.custom.nu > 0.0)) throw ConfigError("custom.nu", "must be positive");
    }
    {
        auto s = root.sub("declared");
        for (const auto& k : detail::declared_keys()) {
            if (s.has(k)) {
                double v = 0.0;
                s.get(k, v);
                c.declared[k] = v;
            }
        }
        s.finish();
        if (c.declared.count("r") && !(c.declared["r"] >= 2.0 && c.declared["r"] <= 4.0)) {
            throw ConfigError("declared.r", "must lie in [2, 4]");
        }
    }
    {
        auto s = root.sub("noise");
        detail::read_kernel(s.sub("u_kernel"), c.noise.u_kernel);
        detail::read_kernel(s.sub("gating_kernel"), c.noise.gating_kernel);
        s.get("gating_noise", c.noise.gating_noise);
        s.finish();
    }
    {
        // Model-dependent initial defaults.
        if (c.model == "hh") {
            c.initial = {"constant", -65.0, 0.0, "steady_state", 0.0, 0.0};
        } else if (c.model == "heat") {
            c.initial = {"cosine", 0.0, 1.0, "constant", 0.0, 0.0};
        }
        auto s = root.sub("initial");
        auto u = s.sub("u");
        u.get("kind", c.initial.u_kind);
        u.get("value", c.initial.u_value);
        u.get("amplitude", c.initial.u_amplitude);
        u.finish();
        auto x = s.sub("x");
        x.get("kind", c.initial.x_kind);
        x.get("value", c.initial.x_value);
        x.get("amplitude", c.initial.x_amplitude);
        x.finish();
        s.finish();
        if (c.initial.u_kind != "constant" && c.initial.u_kind != "cosine") {
            throw ConfigError("initial.u.kind", "expected constant | cosine");
        }
        if (c.initial.x_kind != "constant" && c.initial.x_kind != "cosine" && c.initial.x_kind != "steady_state") {
            throw ConfigError("initial.x.kind", "expected constant | cosine | steady_state");
        }
        if (c.initial.x_kind == "steady_state" && c.model != "hh") {
            throw ConfigError("initial.x.kind", "steady_state is only defined for the hh model");
        }
    }
    {
        auto s = root.sub("grid");
        s.get("n", c.n);
        s.finish();
        if (c.n < 2) throw ConfigError("grid.n", "need n >= 2");
    }
    {
        auto s = root.sub("time");
        s.get("dt", c.time.dt);
        s.get("T", c.time.T);
        s.get("record_every", c.time.record_every);
        std::string scheme = scheme_name(c.time.scheme);
        s.get("scheme", scheme);
        if (scheme == "semi_implicit") c.time.scheme = Scheme::SemiImplicit;
        else if (scheme == "explicit") c.time.scheme = Scheme::Explicit;
        else throw ConfigError("time.scheme", "expected semi_implicit | explicit");
        s.get("clamp_gating", c.time.clamp_gating);
        s.finish();
        try {
            c.time.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("time." + e.key(), std::string(e.what()).substr(e.key().size() + 2));
        }
    }
    root.get("seeds", c.seeds);
    if (c.seeds.empty()) throw ConfigError("seeds", "need at least one seed");
    {
        auto s = root.sub("output");
        s.get("csv", c.write_csv);
        s.get("binary", c.write_binary);
        s.finish();
    }
    {
        if (c.model == "heat") c.converge.reference = Reference::ExactHeat;
        auto s = root.sub("converge");
        s.get("n0", c.converge.n0);
        s.get("m", c.converge.m);
        s.get("levels", c.converge.levels);
        s.get("dt", c.converge.dt);
        s.get("T", c.converge.T);
        s.get("record_every", c.converge.record_every);
        std::string ref = reference_name(c.converge.reference);
        s.get("reference", ref);
        if (ref == "finest") c.converge.reference = Reference::Finest;
        else if (ref == "exact_heat") c.converge.reference = Reference::ExactHeat;
        else throw ConfigError("converge.reference", "expected finest | exact_heat");
        s.get("track_regularity", c.converge.track_regularity);
        s.finish();
        c.converge.seeds = c.seeds;
        c.converge.validate();
        if (c.converge.reference == Reference::ExactHeat && c.model != "heat") {
            throw ConfigError("converge.reference", "exact_heat requires model 'heat'");
        }
        const bool unit_cosine =
            c.initial.u_kind == "cosine" && c.initial.u_value == 0.0 && c.initial.u_amplitude == 1.0;
        if (c.converge.reference == Reference::ExactHeat && !unit_cosine) {
            throw ConfigError("converge.reference", "exact_heat requires initial u = cos(pi x)");
        }
    }
    {
        if (c.model == "hh") c.audit = {-100.0, 60.0, 20000};
        else if (c.model == "custom") c.audit = {-10.0, 10.0, 20000};
        else if (c.model == "heat") c.audit = {-1.0, 1.0, 20000};
        auto s = root.sub("audit");
        if (s.has("u_box")) {
            std::vector<double> box;
            s.get("u_box", box);
            if (box.size() != 2) throw ConfigError("audit.u_box", "expected [lo, hi]");
            c.audit.u_lo = box[0];
            c.audit.u_hi = box[1];
        }
        s.get("samples", c.audit.samples);
        s.finish();
        if (!(c.audit.u_hi > c.audit.u_lo)) throw ConfigError("audit.u_box", "empty box");
        if (c.audit.samples < 1000) throw ConfigError("audit.samples", "need at least 1000 samples");
    }
    {
        auto s = root.sub("ou_stats");
        s.get("n_list", c.ou.n_list);
        s.get("paths", c.ou.paths);
        s.get("dt", c.ou.dt);
        s.get("T", c.ou.T);
        s.get("nu", c.ou.nu);
        s.get("quantiles", c.ou.quantiles);
        s.finish();
        if (c.ou.n_list.empty()) throw ConfigError("ou_stats.n_list", "need at least one n");
        for (auto n : c.ou.n_list) {
            if (n < 2) throw ConfigError("ou_stats.n_list", "every n must be >= 2");
        }
        if (c.ou.paths < 1) throw ConfigError("ou_stats.paths", "need at least one path");
        if (!(c.ou.dt > 0.0)) throw ConfigError("ou_stats.dt", "time step must be positive");
        if (!(c.ou.T >= c.ou.dt)) throw ConfigError("ou_stats.T", "horizon must be >= dt");
        if (!(c.ou.nu > 0.0)) throw ConfigError("ou_stats.nu", "must be positive");
        for (double q : c.ou.quantiles) {
            if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("ou_stats.quantiles", "quantiles must lie in [0, 1]");
        }
    }
    root.get("g_process_K", c.g_process_K);
    if (!(c.g_process_K >= 0.0)) throw ConfigError("g_process_K", "must be >= 0");
    c.margin_R = std::max(base_declared(c).K, 1.0);
    root.get("margin_R", c.margin_R);
    if (!(c.margin_R >= 0.0)) throw ConfigError("margin_R", "must be >= 0");
    root.get("skip_audit", c.skip_audit);
    root.get("quad_points", c.quad_points);
    if (c.quad_points < 2 || c.quad_points > 16) throw ConfigError("quad_points", "expected 2..16");
    root.finish();
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<config>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Fully explicit echo of a config; parse_config(to_json(c)) == c.
inline json to_json(const RunConfig& c) {
    json gates = json::object();
    const char* gnames[3] = {"n", "m", "h"};
    for (std::size_t i = 0; i < 3; ++i) {
        gates[gnames[i]] = {{"alpha", detail::rate_json(c.hh.gates[i].alpha)},
                            {"beta", detail::rate_json(c.hh.gates[i].beta)},
                            {"sigma", c.hh.gates[i].sigma}};
    }
    json declared = json::object();
    for (const auto& [k, v] : c.declared) declared[k] = v;
    return {
        {"model", c.model},
        {"hh",
         {{"tau", c.hh.tau}, {"lambda", c.hh.lambda}, {"g_na", c.hh.g_na}, {"g_k", c.hh.g_k}, {"g_l", c.hh.g_l},
          {"e_na", c.hh.e_na}, {"e_k", c.hh.e_k}, {"e_l", c.hh.e_l}, {"gates", gates}}},
        {"fhn", {{"cubic", c.fhn.cubic}, {"rate", c.fhn.rate}, {"decay", c.fhn.decay}, {"offset", c.fhn.offset}}},
        {"custom",
         {{"poly_u", c.custom.poly_u}, {"coupling", c.custom.coupling}, {"eps", c.custom.eps},
          {"gamma", c.custom.gamma}, {"beta", c.custom.beta}, {"nu", c.custom.nu},
          {"gating_invariance", c.custom.gating_invariance}, {"one_sided_lipschitz", c.custom.one_sided_lipschitz}}},
        {"declared", declared},
        {"noise",
         {{"u_kernel", detail::kernel_json(c.noise.u_kernel)},
          {"gating_kernel", detail::kernel_json(c.noise.gating_kernel)},
          {"gating_noise", c.noise.gating_noise}}},
        {"initial",
         {{"u", {{"kind", c.initial.u_kind}, {"value", c.initial.u_value}, {"amplitude", c.initial.u_amplitude}}},
          {"x", {{"kind", c.initial.x_kind}, {"value", c.initial.x_value}, {"amplitude", c.initial.x_amplitude}}}}},
        {"grid", {{"n", c.n}}},
        {"time",
         {{"dt", c.time.dt}, {"T", c.time.T}, {"record_every", c.time.record_every},
          {"scheme", scheme_name(c.time.scheme)}, {"clamp_gating", c.time.clamp_gating}}},
        {"seeds", c.seeds},
        {"output", {{"csv", c.write_csv}, {"binary", c.write_binary}}},
        {"converge",
         {{"n0", c.converge.n0}, {"m", c.converge.m}, {"levels", c.converge.levels}, {"dt", c.converge.dt},
          {"T", c.converge.T}, {"record_every", c.converge.record_every},
          {"reference", reference_name(c.converge.reference)}, {"track_regularity", c.converge.track_regularity}}},
        {"audit", {{"u_box", {c.audit.u_lo, c.audit.u_hi}}, {"samples", c.audit.samples}}},
        {"ou_stats",
         {{"n_list", c.ou.n_list}, {"paths", c.ou.paths}, {"dt", c.ou.dt}, {"T", c.ou.T}, {"nu", c.ou.nu},
          {"quantiles", c.ou.quantiles}}},
        {"g_process_K", c.g_process_K},
        {"margin_R", c.margin_R},
        {"skip_audit", c.skip_audit},
        {"quad_points", c.quad_points},
    };
}

/// Model selected by the config, with declared-constant overrides, weight constant and margin applied.
inline ModelSpec build_model(const RunConfig& c) {
    ModelSpec m;
    if (c.model == "hh") m = make_hh_model(c.hh, c.noise);
    else if (c.model == "fhn") m = make_fhn_model(c.fhn, c.noise);
    else if (c.model == "custom") m = make_custom_model(c.custom, c.noise);
    else m = make_heat_model();
    detail::apply_declared(m.declared, c.declared);
    m.declared.g_process_K = c.g_process_K;
    m.declared.margin_R = c.margin_R;
    m.validate();
    return m;
}

inline InitialData build_initial(const RunConfig& c) {
    InitialData init;
    const auto& s = c.initial;
    const double uv = s.u_value, ua = s.u_kind == "cosine" ? s.u_amplitude : 0.0;
    init.u0 = [uv, ua](double x) { return uv + ua * std::cos(std::numbers::pi * x); };
    if (s.x_kind == "steady_state") {
        const HHParams p = c.hh;
        const auto u0 = init.u0;
        init.x0 = [p, u0](std::size_t i, double x) { return hh_steady_state(u0(x), static_cast<Gate>(i), p); };
    } else {
        const double xv = s.x_value, xa = s.x_kind == "cosine" ? s.x_amplitude : 0.0;
        init.x0 = [xv, xa](std::size_t, double x) { return xv + xa * std::cos(std::numbers::pi * x); };
    }
    return init;
}

}  // namespace naxon
