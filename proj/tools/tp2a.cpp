// tp2a — command-line front end: scenario probabilities, parameter sweeps,
// correlation-map export, enhancement indices and the validation certificates.
//
// Exit codes: 0 ok, 1 certificate failure, 2 config error, 3 resource
// refusal (grid/budget), 4 strict-regime violation.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tp2a/config.hpp"
#include "tp2a/correlations.hpp"
#include "tp2a/engine.hpp"
#include "tp2a/io.hpp"
#include "tp2a/presets.hpp"
#include "tp2a/validation.hpp"

namespace {

using tp2a::json;

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out = "-";
    std::string format;
    bool strict = false;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--preset", o.preset, "named preset bundle");
    cmd->add_option("--out", o.out, "output path ('-' for stdout)");
    cmd->add_option("--format", o.format, "csv or json");
    cmd->add_flag("--strict", o.strict, "refuse closed forms outside their regime");
    cmd->add_option("--threads", o.threads, "worker threads (speed only)");
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tp2a::ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw tp2a::ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return j;
}

void emit(const std::string& out, const std::string& payload) {
    if (out == "-" || out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw tp2a::ConfigError("cannot open output path: " + out);
    f << payload;
}

tp2a::ScenarioConfig resolve_scenario(const CommonOpts& o) {
    tp2a::ScenarioConfig cfg;
    if (!o.config_path.empty())
        cfg = tp2a::cfg::parse_scenario(load_json(o.config_path));
    else if (!o.preset.empty())
        cfg = tp2a::presets::scenario(o.preset);
    else
        throw tp2a::ConfigError("one of --config/--preset is required");
    if (!o.format.empty()) cfg.format = o.format;
    if (o.out != "-") cfg.out_path = o.out;
    cfg.strict = o.strict;
    cfg.threads = o.threads;
    return cfg;
}

// Closed-form evaluation matching the configured state kind and transforms.
double closed_value(const tp2a::ScenarioConfig& cfg, const tp2a::BiphotonState& st,
                    double t, double T) {
    using namespace tp2a;
    const SourceParams& s = cfg.state.source;
    const AtomPair& a = cfg.atoms;
    double scale = 1.0;
    std::string shape = cfg.state.kind;
    for (const auto& tr : cfg.state.transforms) {
        if (tr == "coherent_lift") {
            const double a2 = std::norm(cfg.state.alpha);
            scale *= a2 * a2;
        } else {
            shape += ":" + tr;
        }
    }
    if (shape == "uncorrelated") return scale * closed_p11(s, a);
    if (shape == "cascade") return scale * closed_cascade_2p2a(s, a).value;
    if (shape == "spdc") return scale * closed_spdc_family(s, a, t, T).p_pdc;
    if (shape == "cascade:disentangle")
        return scale * closed_cascade_rho1_rho2(s, a, t, T).p1;
    if (shape == "cascade:factorize")
        return scale * closed_cascade_rho1_rho2(s, a, t, T).p2;
    if (shape == "spdc:disentangle")
        return scale * closed_spdc_family(s, a, t, T).p1_pdc;
    if (shape == "spdc:factorize") return scale * closed_spdc_family(s, a, t, T).p2_pdc;
    if (shape == "uncorrelated:disentangle" || shape == "uncorrelated:factorize")
        return scale * closed_p11(s, a) * (t / T) * (t / T);
    // no published closed form (toy amplitudes): the delta limit is the
    // closed-route stand-in
    return scale * prob_delta_limit(st, a, T).value;
}

void check_strict(const tp2a::ScenarioConfig& cfg, double t) {
    if (!cfg.strict) return;
    const tp2a::Detunings d = tp2a::Detunings::from(cfg.state.source, cfg.atoms);
    const tp2a::RegimeFlags f = tp2a::regime_flags(cfg.state.source, cfg.atoms, d, t);
    if (!f.long_time)
        throw tp2a::RegimeError("strict: closed form outside the long-time regime");
    if (d.Delta > 0.0 && !f.scale_separation)
        throw tp2a::RegimeError("strict: closed form without scale separation");
}

int run_prob(const CommonOpts& o) {
    using namespace tp2a;
    const ScenarioConfig cfg = resolve_scenario(o);
    const FrequencyGrid grid = build_scenario_grid(cfg);
    const BiphotonState st = build_state(cfg.state, cfg.atoms, grid, cfg.threads);
    const double T = grid.mode_density_time();
    const double t = cfg.time_is_T ? T : cfg.time_value;
    const Detunings d = Detunings::from(cfg.state.source, cfg.atoms);

    std::vector<ProbabilityResult> records;
    if (cfg.method == "closed" || cfg.method == "all") {
        check_strict(cfg, t);
        ProbabilityResult r;
        r.method = Method::closed_form;
        r.time = t;
        r.value = closed_value(cfg, st, t, T);
        r.regime_flags = regime_flags(cfg.state.source, cfg.atoms, d, t).to_strings();
        records.push_back(r);
    }
    if (cfg.method == "quadrature" || cfg.method == "all") {
        QuadratureOptions qo;
        qo.threads = cfg.threads;
        records.push_back(prob_quadrature(st, cfg.atoms, grid, t, qo));
    }
    if (cfg.method == "delta" || cfg.method == "all")
        records.push_back(prob_delta_limit(st, cfg.atoms, T));

    std::ostringstream os;
    if (cfg.format == "csv") {
        write_prob_csv(os, records);
    } else {
        json arr = json::array();
        for (const auto& r : records) arr.push_back(prob_record(r));
        os << arr.dump(2) << '\n';
    }
    emit(cfg.out_path, os.str());
    return 0;
}

int run_sweep(const CommonOpts& o) {
    using namespace tp2a;
    SweepConfig sw;
    if (!o.config_path.empty())
        sw = cfg::parse_sweep(load_json(o.config_path));
    else if (!o.preset.empty())
        sw = presets::sweep(o.preset);
    else
        throw ConfigError("one of --config/--preset is required");
    sw.base.threads = o.threads;

    const SourceParams base_src = sw.base.state.source;
    const Detunings base_d = Detunings::from(base_src, sw.base.atoms);

    // one shared comb for the whole sweep; widen the window by the sweep span
    double extra = 0.0;
    if (sw.variable == "delta" || sw.variable == "Delta") {
        const double span = std::max(std::abs(sw.from), std::abs(sw.to)) +
                            std::abs(base_d.delta) + base_d.Delta;
        extra = span / base_src.max_width() + 1.0;
    }
    const FrequencyGrid grid = build_scenario_grid(sw.base, extra);
    const double T = grid.mode_density_time();

    std::vector<SweepRow> rows(static_cast<std::size_t>(sw.steps));
    for (int i = 0; i < sw.steps; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(sw.steps - 1);
        const double x = sw.log_scale
                             ? sw.from * std::pow(sw.to / sw.from, f)
                             : sw.from + (sw.to - sw.from) * f;
        ScenarioConfig c = sw.base;
        double t = c.time_is_T ? T : c.time_value;
        if (sw.variable == "delta") {
            const double shift = 0.5 * (x - base_d.delta);
            c.state.source.omega_alpha += shift;
            c.state.source.omega_beta += shift;
        } else if (sw.variable == "Delta") {
            const double sa = base_src.omega_alpha >= c.atoms.omega1 ? 1.0 : -1.0;
            const double sb = base_src.omega_beta >= c.atoms.omega2 ? 1.0 : -1.0;
            c.state.source.omega_alpha = c.atoms.omega1 + sa * x;
            c.state.source.omega_beta = c.atoms.omega2 + sb * x;
        } else if (sw.variable == "width_alpha") {
            c.state.source.width_alpha = x;
        } else if (sw.variable == "width_beta") {
            c.state.source.width_beta = x;
        } else if (sw.variable == "alpha_mag") {
            const double ph = std::arg(c.state.alpha);
            c.state.alpha = std::polar(x, ph);
            bool has_lift = false;
            for (const auto& tr : c.state.transforms) has_lift |= tr == "coherent_lift";
            if (!has_lift) throw ConfigError("alpha_mag sweep requires a coherent_lift");
        } else {  // t
            t = x;
        }
        const BiphotonState st = build_state(c.state, c.atoms, grid, c.threads);
        QuadratureOptions qo;
        qo.threads = c.threads;
        SweepRow row;
        row.value = x;
        row.closed = closed_value(c, st, t, T);
        row.quadrature = prob_quadrature(st, c.atoms, grid, t, qo).value;
        rows[static_cast<std::size_t>(i)] = row;
    }

    std::ostringstream os;
    write_sweep_csv(os, sw.variable, rows);
    emit(o.out.empty() ? sw.base.out_path : o.out, os.str());
    return 0;
}

int run_g2(const CommonOpts& o) {
    using namespace tp2a;
    CorrelationMap map;
    if (!o.preset.empty()) {
        map = presets::render_figure(presets::figure(o.preset), o.threads);
    } else if (!o.config_path.empty()) {
        const json j = load_json(o.config_path);
        ScenarioConfig c = cfg::parse_scenario(j);
        if (!j.contains("map") || !j["map"].is_object())
            throw ConfigError("g2 config: missing 'map' object");
        const json& m = j["map"];
        const std::string kind = m.value("kind", std::string("freq"));
        auto axis = [&](const char* key) {
            if (!m.contains(key)) throw ConfigError("g2 config: missing map axis");
            const json& ax = m[key];
            return linspace(cfg::need_num(ax, "from"), cfg::need_num(ax, "to"),
                            static_cast<std::size_t>(cfg::need_num(ax, "points")));
        };
        const FrequencyGrid grid = build_scenario_grid(c);
        const BiphotonState st = build_state(c.state, c.atoms, grid, o.threads);
        if (kind == "time")
            map = g2_time_map(st, axis("axis1"), axis("axis2"), o.threads);
        else if (kind == "freq")
            map = g2_freq_map(st, axis("axis1"), axis("axis2"), o.threads);
        else
            throw ConfigError("g2 config: map.kind must be time or freq");
    } else {
        throw ConfigError("one of --config/--preset is required");
    }

    std::ostringstream os;
    if (o.format == "json")
        os << map_envelope(map).dump(2) << '\n';
    else
        write_map_csv(os, map);
    emit(o.out, os.str());
    return 0;
}

int run_enhance(const CommonOpts& o) {
    using namespace tp2a;
    const ScenarioConfig cfg = resolve_scenario(o);
    if (!cfg.state.transforms.empty())
        throw ConfigError("enhance: a pure (untransformed) state is required");
    const FrequencyGrid grid = build_scenario_grid(cfg);
    const BiphotonState st = build_state(cfg.state, cfg.atoms, grid, cfg.threads);

    const GpResult gp = enhancement_gp(st, cfg.atoms);
    const double g12 = enhancement_g12(st, cfg.atoms, grid);
    const cplx c12 = st.amplitude(cfg.atoms.omega1, cfg.atoms.omega2);
    const cplx c21 = st.amplitude(cfg.atoms.omega2, cfg.atoms.omega1);
    const double lo = std::min(std::abs(c12), std::abs(c21));
    const double dominance = std::max(std::abs(c12), std::abs(c21)) / std::max(lo, 1e-300);

    const SourceParams& s = cfg.state.source;
    const double w = 8.0 * s.max_width();
    CorrelationMap fmap =
        g2_freq_map(st, linspace(s.omega_alpha - w, s.omega_alpha + w, 241),
                    linspace(s.omega_beta - w, s.omega_beta + w, 241), cfg.threads);
    const RidgeWidths widths = correlation_widths(fmap);

    json j;
    j["G_p"] = gp.value;
    j["G_p_degenerate"] = gp.degenerate;
    j["G_12"] = g12;
    j["dominance_ratio"] = dominance;
    j["antidiagonal_width"] = widths.antidiagonal_width;
    std::ostringstream os;
    os << j.dump(2) << '\n';
    emit(cfg.out_path, os.str());
    return 0;
}

tp2a::CausalTestFunction user_causal_fn(const json& j) {
    using namespace tp2a;
    const std::string form = j.value("form", std::string());
    const double g = cfg::num_or(j, "gamma", 1.0);
    if (form == "single_pole") {
        // f ~ 1/(w + i gamma): excluded from the admissible class
        CausalTestFunction fn;
        fn.name = "user:single_pole";
        fn.time_scale = 1.0 / g;
        fn.time_form = [g](double t) { return t < 0.0 ? 0.0 : std::exp(-g * t); };
        fn.freq_form = [g](double w) { return 1.0 / (kTwoPi * cplx(g, -w)); };
        fn.f_zero = cplx(1.0 / (kTwoPi * g), 0.0);
        return fn;
    }
    if (form == "poly_exp") {
        std::vector<double> coeffs;
        if (j.contains("coeffs"))
            for (const auto& c : j["coeffs"]) coeffs.push_back(c.get<double>());
        if (coeffs.empty()) coeffs = {0.0, 1.0};
        const double shift = cfg::num_or(j, "shift", 0.0);
        CausalTestFunction fn;
        fn.name = "user:poly_exp";
        fn.time_scale = 1.0 / g;
        fn.time_form = [g, coeffs, shift](double t) {
            const double u = t - shift;
            if (u < 0.0) return 0.0;
            double p = 0.0, uk = 1.0;
            for (double c : coeffs) {
                p += c * uk;
                uk *= u;
            }
            return p * std::exp(-g * u);
        };
        fn.freq_form = [g, coeffs, shift](double w) {
            cplx acc{};
            double fact = 1.0;
            const cplx d(g, -w);
            cplx dk = d;
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
                acc += coeffs[k] * fact / dk;
                fact *= static_cast<double>(k + 1);
                dk *= d;
            }
            return std::polar(1.0, w * shift) * acc / kTwoPi;
        };
        {
            cplx acc{};
            double fact = 1.0, gk = g;
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
                acc += coeffs[k] * fact / gk;
                fact *= static_cast<double>(k + 1);
                gk *= g;
            }
            fn.f_zero = acc / kTwoPi;
        }
        return fn;
    }
    throw ConfigError("validate: unknown delta_function form '" + form + "'");
}

int run_validate(const CommonOpts& o, const std::string& which) {
    using namespace tp2a;
    json out = json::array();
    bool all_pass = true;

    if (which == "delta" || which == "all") {
        std::vector<CausalTestFunction> fns;
        if (!o.config_path.empty()) {
            const json j = load_json(o.config_path);
            if (j.contains("delta_function")) fns.push_back(user_causal_fn(j["delta_function"]));
        }
        if (fns.empty()) fns = builtin_causal_functions(1.0);
        for (const auto& fn : fns) {
            double prev = -1.0;
            bool monotone = true;
            DeltaCheckResult last;
            for (double tg : {25.0, 50.0, 100.0, 200.0}) {
                last = delta_check(fn, tg * fn.time_scale);
                if (prev >= 0.0 && last.deviation > prev + 1e-3) monotone = false;
                prev = last.deviation;
            }
            json j = delta_check_json(fn.name, 200.0 * fn.time_scale, last, 0.01);
            j["monotone_decay"] = monotone;
            j["pass"] = j["pass"].get<bool>() && monotone;
            all_pass = all_pass && j["pass"].get<bool>();
            out.push_back(j);
        }
    }

    if (which == "energy" || which == "all") {
        std::vector<std::string> names;
        if (!o.preset.empty())
            names = {o.preset};
        else
            names = {"cascade-cert", "spdc-cert"};
        for (const auto& name : names) {
            const ScenarioConfig c = presets::scenario(name);
            const FrequencyGrid grid = build_scenario_grid(c);
            const BiphotonState st = build_state(c.state, c.atoms, grid, o.threads);
            EnergyFlowOptions eo;
            eo.threads = o.threads;
            Certificate cert =
                comparison_certificate(st, grid.mode_density_time(), 0.02, eo);
            all_pass = all_pass && cert.pass;
            out.push_back(certificate_json(cert));

            Certificate parseval;
            parseval.name = "parseval_closure[" + st.label() + "]";
            parseval.reference = 2.0;
            parseval.tolerance = 0.005;
            parseval.value =
                energy_flow(st, std::numeric_limits<double>::infinity(), eo);
            parseval.pass =
                std::abs(parseval.value - 2.0) <= parseval.tolerance * 2.0;
            parseval.detail = "energy_flow(state, inf) against 2 quanta";
            parseval.grid_provenance = grid_provenance(st.grid());
            all_pass = all_pass && parseval.pass;
            out.push_back(certificate_json(parseval));
        }
    }

    std::ostringstream os;
    os << out.dump(2) << '\n';
    emit(o.out, os.str());
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-photon two-atom excitation toolkit"};
    app.require_subcommand(1);

    CommonOpts prob_o, sweep_o, g2_o, enh_o, val_o;
    std::string which = "all";

    CLI::App* prob = app.add_subcommand("prob", "excitation probability for a scenario");
    add_common(prob, prob_o);
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
    add_common(sweep, sweep_o);
    CLI::App* g2 = app.add_subcommand("g2", "correlation map export");
    add_common(g2, g2_o);
    CLI::App* enh = app.add_subcommand("enhance", "enhancement indices report");
    add_common(enh, enh_o);
    CLI::App* val = app.add_subcommand("validate", "delta/energy certificates");
    add_common(val, val_o);
    val->add_option("--which", which, "delta | energy | all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (prob->parsed()) return run_prob(prob_o);
        if (sweep->parsed()) return run_sweep(sweep_o);
        if (g2->parsed()) return run_g2(g2_o);
        if (enh->parsed()) return run_enhance(enh_o);
        if (val->parsed()) return run_validate(val_o, which);
    } catch (const tp2a::RegimeError& e) {
        std::cerr << "regime violation: " << e.what() << '\n';
        return 4;
    } catch (const tp2a::BudgetError& e) {
        std::cerr << "resource refusal: " << e.what() << '\n';
        return 3;
    } catch (const tp2a::GridError& e) {
        std::cerr << "grid refusal: " << e.what() << '\n';
        return 3;
    } catch (const tp2a::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
