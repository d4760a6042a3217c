// presets.hpp — named scenario bundles shipped with the tool.  The fig*
// presets carry the reference parameter set of the correlation maps
// (gamma_alpha = sigma_alpha = 0.05, gamma_beta = sigma_beta = 0.5,
// omega_alpha = 1.5, omega_beta = 3.5, t0 = 30, all in the internal angular
// unit); the enhance/cert presets use wider frequency separations so that a
// single swap component of the amplitude dominates.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "tp2a/config.hpp"
#include "tp2a/correlations.hpp"

namespace tp2a {

struct FigurePreset {
    std::string name;
    StateSpec state;
    AtomPair atoms;      // grid anchoring only; maps do not involve the atoms
    double T = 0.0;
    double coverage = 20.0;
    bool time_map = true;
    double lo1 = 0.0, hi1 = 0.0, lo2 = 0.0, hi2 = 0.0;
    std::size_t res1 = 0, res2 = 0;
};

namespace presets {

inline SourceParams fig_source(double t0 = 0.0) {
    SourceParams s;
    s.omega_alpha = 1.5;
    s.omega_beta = 3.5;
    s.width_alpha = 0.05;
    s.width_beta = 0.5;
    s.t0 = t0;
    return s;
}

inline AtomPair fig_atoms() {
    // symmetric 2P2A-resonant placement around the fig sources, Delta = 0.5
    AtomPair a;
    a.omega1 = 1.0;
    a.omega2 = 4.0;
    return a;
}

inline ScenarioConfig scenario(const std::string& name) {
    ScenarioConfig c;
    c.grid.auto_grid = false;
    c.grid.T = kTwoPi / 0.01;  // spacing 0.01 = width_alpha/5 for the fig widths
    c.grid.coverage = 40.0;
    c.atoms = fig_atoms();

    if (name == "uncorrelated-default") {
        c.state.kind = "uncorrelated";
        c.state.source = fig_source();
        return c;
    }
    if (name == "cascade-default") {
        c.state.kind = "cascade";
        c.state.source = fig_source();
        return c;
    }
    if (name == "spdc-default") {
        c.state.kind = "spdc";
        c.state.source = fig_source(30.0);
        return c;
    }
    if (name == "cascade-enhance" || name == "spdc-enhance") {
        // wide separation: the c12 component dominates and G_p stays near 1
        c.state.source.omega_alpha = 50.0;
        c.state.source.omega_beta = 150.0;
        c.state.source.width_alpha = 0.05;
        c.state.source.width_beta = 0.5;
        if (name == "cascade-enhance") {
            c.state.kind = "cascade";
            c.atoms.omega1 = 47.5;  // Delta = 2.5 = 5 * width_beta
            c.atoms.omega2 = 152.5;
        } else {
            c.state.kind = "spdc";
            c.state.source.t0 = 30.0;
            c.atoms.omega1 = 49.0;  // Delta = 1 = 2 * sigma_beta
            c.atoms.omega2 = 151.0;
        }
        return c;
    }
    if (name == "cascade-cert") {
        c.state.kind = "cascade";
        c.state.source.omega_alpha = 20.0;
        c.state.source.omega_beta = 24.0;
        c.state.source.width_alpha = 0.5;
        c.state.source.width_beta = 1.5;
        c.atoms.omega1 = 19.0;
        c.atoms.omega2 = 25.0;
        c.grid.T = 64.0;  // T * width_alpha = 32: the pulse dies well inside [0, T]
        return c;
    }
    if (name == "spdc-cert" || name == "spdc-cert-late") {
        c.state.kind = "spdc";
        c.state.source.omega_alpha = 20.0;
        c.state.source.omega_beta = 24.0;
        c.state.source.width_alpha = 0.25;
        c.state.source.width_beta = 1.25;
        c.atoms.omega1 = 19.0;
        c.atoms.omega2 = 25.0;
        c.grid.T = kTwoPi / 0.05;
        c.grid.coverage = 12.0;
        // pass case: pulse centered inside [0, T]; fail case: t0 = 2T
        c.state.source.t0 = name == "spdc-cert" ? 15.0 : 2.0 * c.grid.T;
        return c;
    }
    if (name == "toy-symmetric" || name == "toy-product") {
        c.state.kind = name == "toy-symmetric" ? "toy_symmetric" : "toy_product";
        c.state.source = fig_source();
        c.state.source.width_alpha = 0.1;
        c.state.source.width_beta = 0.1;
        c.grid.T = kTwoPi / 0.02;
        c.grid.coverage = 40.0;
        return c;
    }
    throw ConfigError("unknown scenario preset '" + name + "'");
}

inline SweepConfig sweep(const std::string& name) {
    SweepConfig s;
    if (name == "sweep-cascade-delta") {
        s.base = scenario("cascade-default");
        s.base.grid.coverage = 25.0;
        s.variable = "delta";
        s.from = -0.2;  // +-4 gamma_alpha around exact 2P2A resonance
        s.to = 0.2;
        s.steps = 81;
        return s;
    }
    if (name == "sweep-spdc-delta") {
        s.base = scenario("spdc-default");
        s.base.grid.coverage = 10.0;
        s.variable = "delta";
        s.from = -0.1;  // +-2 sigma_alpha
        s.to = 0.1;
        s.steps = 41;
        return s;
    }
    if (name == "sweep-uncorrelated-delta") {
        s.base = scenario("uncorrelated-default");
        // matched widths and equal mismatches: the leading delta-variation of
        // the single-photon wings cancels and the sweep is flat
        s.base.state.source.omega_alpha = 11.5;
        s.base.state.source.omega_beta = 13.5;
        s.base.state.source.width_alpha = 0.5;
        s.base.state.source.width_beta = 0.5;
        s.base.atoms.omega1 = 9.5;
        s.base.atoms.omega2 = 15.5;
        s.base.grid.T = 80.0;
        s.variable = "delta";
        s.from = -0.2;
        s.to = 0.2;
        s.steps = 41;
        return s;
    }
    if (name == "sweep-rho1-t") {
        // matched-width wavepacket pair: t*gamma >= 75 across the whole range,
        // so the quadratic law is clean at the stated tolerance
        s.base = scenario("uncorrelated-default");
        s.base.state.source.omega_alpha = 11.5;
        s.base.state.source.omega_beta = 13.5;
        s.base.state.source.width_alpha = 0.5;
        s.base.state.source.width_beta = 0.5;
        s.base.atoms.omega1 = 9.5;
        s.base.atoms.omega2 = 15.5;
        s.base.state.transforms = {"disentangle"};
        s.base.grid.T = 450.0;
        s.variable = "t";
        s.from = 150.0;
        s.to = 375.0;
        s.steps = 10;
        s.log_scale = true;
        return s;
    }
    throw ConfigError("unknown sweep preset '" + name + "'");
}

inline FigurePreset figure(const std::string& name) {
    FigurePreset f;
    f.name = name;
    f.atoms = fig_atoms();
    f.T = kTwoPi / 0.01;
    if (name == "fig1-cascade" || name == "fig1-spdc") {
        f.time_map = true;
        f.state.kind = name == "fig1-cascade" ? "cascade" : "spdc";
        f.state.source = fig_source(name == "fig1-spdc" ? 30.0 : 0.0);
        f.lo1 = -10.0;
        f.hi1 = 60.0;
        f.lo2 = -10.0;
        f.hi2 = 60.0;
        f.res1 = f.res2 = 141;  // step 0.5, resolves the pi-period fringes
        return f;
    }
    if (name == "fig2-a" || name == "fig2-b" || name == "fig2-c" || name == "fig2-d") {
        f.time_map = false;
        const bool spdc = name == "fig2-c" || name == "fig2-d";
        const bool fact = name == "fig2-b" || name == "fig2-d";
        f.state.kind = spdc ? "spdc" : "cascade";
        f.state.source = fig_source(spdc ? 30.0 : 0.0);
        if (fact) f.state.transforms = {"factorize"};
        f.lo1 = f.lo2 = 0.0;
        f.hi1 = f.hi2 = 5.0;
        f.res1 = f.res2 = 201;
        return f;
    }
    throw ConfigError("unknown figure preset '" + name + "'");
}

inline std::vector<std::string> scenario_names() {
    return {"uncorrelated-default", "cascade-default", "spdc-default",
            "cascade-enhance",      "spdc-enhance",    "cascade-cert",
            "spdc-cert",            "spdc-cert-late",  "toy-symmetric",
            "toy-product"};
}
inline std::vector<std::string> sweep_names() {
    return {"sweep-cascade-delta", "sweep-spdc-delta", "sweep-uncorrelated-delta",
            "sweep-rho1-t"};
}
inline std::vector<std::string> figure_names() {
    return {"fig1-cascade", "fig1-spdc", "fig2-a", "fig2-b", "fig2-c", "fig2-d"};
}

inline CorrelationMap render_figure(const FigurePreset& f, int threads = 1) {
    const FrequencyGrid g = make_grid(f.state.source, f.atoms, f.T, f.coverage);
    const BiphotonState st = build_state(f.state, f.atoms, g, threads);
    if (f.time_map)
        return g2_time_map(st, linspace(f.lo1, f.hi1, f.res1),
                           linspace(f.lo2, f.hi2, f.res2), threads);
    return g2_freq_map(st, linspace(f.lo1, f.hi1, f.res1),
                       linspace(f.lo2, f.hi2, f.res2), threads);
}

}  // namespace presets
}  // namespace tp2a
