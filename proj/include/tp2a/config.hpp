// config.hpp — JSON scenario and sweep configuration for the CLI layer.

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tp2a/core.hpp"
#include "tp2a/engine.hpp"
#include "tp2a/states.hpp"

namespace tp2a {

using json = nlohmann::ordered_json;

struct StateSpec {
    std::string kind;  // uncorrelated | cascade | spdc | toy_symmetric | toy_product
    SourceParams source;
    std::vector<std::string> transforms;  // applied in declared order
    cplx alpha{1.0, 0.0};
};

struct GridSpec {
    bool auto_grid = true;
    double T = 0.0;
    double coverage = 40.0;
};

struct ScenarioConfig {
    StateSpec state;
    AtomPair atoms;
    GridSpec grid;
    bool time_is_T = true;
    double time_value = 0.0;
    std::string method = "all";  // closed | quadrature | delta | all
    std::string out_path = "-";
    std::string format = "json";
    bool strict = false;
    int threads = 1;
};

struct SweepConfig {
    ScenarioConfig base;
    std::string variable;  // delta | Delta | width_alpha | width_beta | alpha_mag | t
    double from = 0.0;
    double to = 0.0;
    int steps = 2;
    bool log_scale = false;
};

// ---------------------------------------------------------------------------
// Parsing.  Any structural problem throws ConfigError (CLI exit code 2).

namespace cfg {

inline double need_num(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string("config: missing numeric field '") + key + "'");
    return j[key].get<double>();
}

inline double num_or(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number())
        throw ConfigError(std::string("config: field '") + key + "' must be a number");
    return j[key].get<double>();
}

inline SourceParams parse_source(const json& j) {
    SourceParams s;
    s.omega_alpha = need_num(j, "omega_alpha");
    s.omega_beta = need_num(j, "omega_beta");
    s.width_alpha = need_num(j, "width_alpha");
    s.width_beta = need_num(j, "width_beta");
    s.t0 = num_or(j, "t0", 0.0);
    s.phase = num_or(j, "phase", kPi / 2.0);
    s.validate();
    return s;
}

inline AtomPair parse_atoms(const json& j) {
    AtomPair a;
    a.omega1 = need_num(j, "omega1");
    a.omega2 = need_num(j, "omega2");
    a.gamma1 = num_or(j, "gamma1", 1e-3);
    a.gamma2 = num_or(j, "gamma2", 1e-3);
    if (j.contains("p0"))
        a.p0 = need_num(j, "p0");
    else if (j.contains("beam_section"))
        a = AtomPair::with_derived_p0(a.omega1, a.omega2, a.gamma1, a.gamma2,
                                      need_num(j, "beam_section"));
    a.validate();
    return a;
}

inline ScenarioConfig parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ScenarioConfig c;
    if (!j.contains("state") || !j["state"].is_object())
        throw ConfigError("config: missing 'state' object");
    const json& st = j["state"];
    if (!st.contains("kind") || !st["kind"].is_string())
        throw ConfigError("config: state.kind must be a string");
    c.state.kind = st["kind"].get<std::string>();
    c.state.source = parse_source(st.contains("source") ? st["source"] : st);
    if (st.contains("transforms")) {
        if (!st["transforms"].is_array())
            throw ConfigError("config: state.transforms must be an array");
        for (const auto& t : st["transforms"]) {
            const std::string name = t.get<std::string>();
            if (name != "disentangle" && name != "factorize" && name != "coherent_lift")
                throw ConfigError("config: unknown transform '" + name + "'");
            c.state.transforms.push_back(name);
        }
    }
    if (st.contains("alpha")) {
        const json& al = st["alpha"];
        c.state.alpha = al.is_number()
                            ? cplx(al.get<double>(), 0.0)
                            : cplx(need_num(al, "re"), num_or(al, "im", 0.0));
    }
    if (!j.contains("atoms")) throw ConfigError("config: missing 'atoms'");
    c.atoms = parse_atoms(j["atoms"]);

    if (j.contains("grid") && j["grid"].is_object()) {
        c.grid.auto_grid = false;
        c.grid.T = need_num(j["grid"], "T");
        c.grid.coverage = num_or(j["grid"], "coverage", 40.0);
    } else if (j.contains("grid") && j["grid"].is_string()) {
        if (j["grid"].get<std::string>() != "auto")
            throw ConfigError("config: grid must be an object or \"auto\"");
    }
    if (j.contains("time")) {
        if (j["time"].is_string()) {
            if (j["time"].get<std::string>() != "T")
                throw ConfigError("config: time must be a number or \"T\"");
        } else {
            c.time_is_T = false;
            c.time_value = j["time"].get<double>();
        }
    }
    if (j.contains("method")) {
        c.method = j["method"].get<std::string>();
        if (c.method != "closed" && c.method != "quadrature" && c.method != "delta" &&
            c.method != "all")
            throw ConfigError("config: unknown method '" + c.method + "'");
    }
    if (j.contains("output") && j["output"].is_object()) {
        const json& o = j["output"];
        if (o.contains("path")) c.out_path = o["path"].get<std::string>();
        if (o.contains("format")) c.format = o["format"].get<std::string>();
        if (c.format != "csv" && c.format != "json")
            throw ConfigError("config: output.format must be csv or json");
    }
    return c;
}

inline SweepConfig parse_sweep(const json& j) {
    SweepConfig s;
    if (!j.contains("base")) throw ConfigError("sweep config: missing 'base'");
    s.base = parse_scenario(j["base"]);
    if (!j.contains("variable") || !j["variable"].is_string())
        throw ConfigError("sweep config: missing 'variable'");
    s.variable = j["variable"].get<std::string>();
    const bool known = s.variable == "delta" || s.variable == "Delta" ||
                       s.variable == "width_alpha" || s.variable == "width_beta" ||
                       s.variable == "alpha_mag" || s.variable == "t";
    if (!known) throw ConfigError("sweep config: unknown variable '" + s.variable + "'");
    if (!j.contains("range") || !j["range"].is_object())
        throw ConfigError("sweep config: missing 'range'");
    s.from = need_num(j["range"], "from");
    s.to = need_num(j["range"], "to");
    s.steps = static_cast<int>(need_num(j["range"], "steps"));
    if (s.steps < 2) throw ConfigError("sweep config: steps must be >= 2");
    if (j["range"].contains("scale"))
        s.log_scale = j["range"]["scale"].get<std::string>() == "log";
    if (s.log_scale && (s.from <= 0.0 || s.to <= 0.0))
        throw ConfigError("sweep config: log scale requires positive range");
    return s;
}

}  // namespace cfg

// ---------------------------------------------------------------------------
// Resolution of a scenario into runtime objects.

inline double resolve_T(const ScenarioConfig& c) {
    if (!c.grid.auto_grid) return c.grid.T;
    return kTwoPi / (c.state.source.min_width() / 6.0);
}

inline FrequencyGrid build_scenario_grid(const ScenarioConfig& c,
                                         double extra_coverage = 0.0) {
    return make_grid(c.state.source, c.atoms, resolve_T(c),
                     c.grid.coverage + extra_coverage);
}

inline BiphotonState build_base_state(const StateSpec& spec, const AtomPair& atoms,
                                      const FrequencyGrid& g, int threads) {
    if (spec.kind == "uncorrelated")
        return BiphotonState::uncorrelated(spec.source, g, threads);
    if (spec.kind == "cascade") return BiphotonState::cascade(spec.source, g, threads);
    if (spec.kind == "spdc") return BiphotonState::spdc(spec.source, g, threads);
    if (spec.kind == "toy_symmetric" || spec.kind == "toy_product") {
        const double w1 = atoms.omega1, w2 = atoms.omega2;
        const double sg = spec.source.min_width();
        const bool symmetric = spec.kind == "toy_symmetric";
        auto raw = [w1, w2, sg, symmetric](double wk, double wq) -> cplx {
            auto bump = [sg](double x, double c) {
                const double u = (x - c) / sg;
                return u * u < 600.0 ? std::exp(-0.5 * u * u) : 0.0;
            };
            if (symmetric) return bump(wk, w1) * bump(wq, w2) + bump(wk, w2) * bump(wq, w1);
            return (bump(wk, w1) + bump(wk, w2)) * (bump(wq, w1) + bump(wq, w2));
        };
        return BiphotonState::custom_pure(raw, spec.source, g, spec.kind, threads);
    }
    throw ConfigError("config: unknown state kind '" + spec.kind + "'");
}

inline BiphotonState build_state(const StateSpec& spec, const AtomPair& atoms,
                                 const FrequencyGrid& g, int threads) {
    BiphotonState st = build_base_state(spec, atoms, g, threads);
    for (const auto& t : spec.transforms) {
        if (t == "disentangle")
            st = disentangle(st);
        else if (t == "factorize")
            st = factorize(st, threads);
        else
            st = coherent_lift(st, spec.alpha);
    }
    return st;
}

}  // namespace tp2a
