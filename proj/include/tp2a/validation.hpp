// validation.hpp — numerical certification of the two analytic devices the
// probability formulas rest on: the restricted delta-function approximation
// (for functions whose time form vanishes for t < 0) and the t = T energy-flow
// equalization between pulsed and c.w. states.

#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tp2a/core.hpp"
#include "tp2a/fft.hpp"
#include "tp2a/reduction.hpp"
#include "tp2a/states.hpp"

namespace tp2a {

// ---------------------------------------------------------------------------
// Causal test functions.

struct CausalTestFunction {
    std::string name;
    std::function<double(double)> time_form;  // F(t), zero for t < 0
    std::function<cplx(double)> freq_form;    // f(w) = (1/2pi) int F e^{iwt} dt
    cplx f_zero;                              // analytic f(0)
    double time_scale = 1.0;                  // 1/gamma
};

// Three members of the admissible class with analytic transforms.
inline std::vector<CausalTestFunction> builtin_causal_functions(double gamma) {
    const double g = gamma;
    std::vector<CausalTestFunction> v;
    v.push_back({"ramp_decay",
                 [g](double t) { return t < 0.0 ? 0.0 : g * g * t * std::exp(-g * t); },
                 [g](double w) {
                     const cplx d(g, -w);
                     return g * g / (kTwoPi * d * d);
                 },
                 cplx(1.0 / kTwoPi, 0.0), 1.0 / g});
    v.push_back({"quad_decay",
                 [g](double t) { return t < 0.0 ? 0.0 : g * g * g * t * t * std::exp(-g * t); },
                 [g](double w) {
                     const cplx d(g, -w);
                     return 2.0 * g * g * g / (kTwoPi * d * d * d);
                 },
                 cplx(1.0 / kPi, 0.0), 1.0 / g});
    v.push_back({"rise_decay",
                 [g](double t) {
                     return t < 0.0 ? 0.0 : (1.0 - std::exp(-g * t)) * std::exp(-2.0 * g * t);
                 },
                 [g](double w) {
                     return (1.0 / (cplx(2.0 * g, -w)) - 1.0 / (cplx(3.0 * g, -w))) / kTwoPi;
                 },
                 cplx(1.0 / (12.0 * kPi * gamma), 0.0), 1.0 / g});
    return v;
}

namespace detail {

inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      std::size_t n) {
    if (n % 2 == 1) ++n;
    const double h = (hi - lo) / static_cast<double>(n);
    double acc = f(lo) + f(hi);
    for (std::size_t i = 1; i < n; ++i)
        acc += f(lo + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace detail

// Rejects members outside the admissible class: the time form must vanish on
// t < 0 and the transform must be absolutely integrable (a 1/(w + i gamma)
// style single pole grows logarithmically and is refused).
inline void screen_causal(const CausalTestFunction& fn) {
    double fmax = 0.0;
    for (int i = 1; i <= 100; ++i)
        fmax = std::max(fmax, std::abs(fn.time_form(0.05 * fn.time_scale * i)));
    for (int i = 1; i <= 100; ++i) {
        const double t = -0.1 * fn.time_scale * i;
        if (std::abs(fn.time_form(t)) > 1e-10 * std::max(fmax, 1e-30))
            throw ConfigError("causal screen: time form is nonzero at t = " +
                              std::to_string(t));
    }
    auto absf = [&](double w) { return std::abs(fn.freq_form(w)); };
    const double w1 = 100.0 / fn.time_scale;
    const double i1 = detail::simpson(absf, -w1, w1, 4000);
    const double i2 = detail::simpson(absf, -2.0 * w1, 2.0 * w1, 8000);
    if (!(i2 < std::numeric_limits<double>::infinity()) ||
        (i2 - i1) > 0.02 * std::max(i1, 1e-300))
        throw ConfigError("causal screen: |f| is not absolutely integrable on the window");
}

struct DeltaCheckResult {
    cplx integral{};
    cplx target{};
    double deviation = 0.0;
};

// I(t) = int [(e^{-iwt} - 1)/w] f(w) dw against the limit 2 pi i f(0).
inline DeltaCheckResult delta_check(const CausalTestFunction& fn, double t,
                                    double window_half_width = 0.0) {
    screen_causal(fn);
    const double W =
        window_half_width > 0.0 ? window_half_width : 60.0 / fn.time_scale;
    const double h = std::min(kTwoPi / std::max(t, 1e-12) / 12.0, 1.0 / (20.0 * fn.time_scale));
    auto n = static_cast<std::size_t>(std::ceil(2.0 * W / h));
    if (n % 2 == 1) ++n;
    const double step = 2.0 * W / static_cast<double>(n);

    auto integrand = [&](double w) -> cplx {
        const double th = w * t;
        // (e^{-i th} - 1) = -2 sin^2(th/2) - i sin(th); /w -> -i t at w = 0
        if (std::abs(w) < 1e-300) return cplx(0.0, -t) * fn.freq_form(w);
        const double s = std::sin(0.5 * th);
        return cplx(-2.0 * s * s, -std::sin(th)) / w * fn.freq_form(w);
    };
    cplx acc = integrand(-W) + integrand(W);
    for (std::size_t i = 1; i < n; ++i)
        acc += integrand(-W + step * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);

    DeltaCheckResult r;
    r.integral = acc * (step / 3.0);
    // limit of the displayed integral for causal transforms: the sinc part
    // contributes -i pi f(0) and the Hilbert part another -i pi f(0) (f is
    // analytic in the upper half plane), so I -> -2 pi i f(0)
    r.target = -kTwoPi * cplx(0.0, 1.0) * fn.f_zero;
    const double tn = std::abs(r.target);
    r.deviation = tn > 0.0 ? std::abs(r.integral - r.target) / tn : std::abs(r.integral);
    return r;
}

// ---------------------------------------------------------------------------
// Energy flow, in photon quanta (units of hbar * mean frequency).

struct EnergyFlowOptions {
    double oversample = 3.0;   // extended-comb period as a multiple of T
    double tau_step_widths = 8.0;  // time samples per 1/max_width
    int threads = 1;
};

namespace detail {

struct DArray {
    std::vector<double> v;
    DArray& operator+=(const DArray& o) {
        if (v.empty()) {
            v = o.v;
            return *this;
        }
        if (!o.v.empty())
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
};

// Row/column intensity accumulation on the extended comb via per-row DFTs.
inline std::vector<double> pulse_intensity(const BiphotonState& st, double period,
                                           std::size_t m, const EnergyFlowOptions& opt) {
    const FrequencyGrid& g = st.grid();
    const double dw = kTwoPi / period;
    const auto n = static_cast<std::size_t>(
                       std::ceil((g.omega_max() - g.omega_min()) / dw)) + 1;
    if (n > m)
        throw BudgetError("energy_flow: extended comb larger than the transform size");
    const double w0 = g.omega_min();
    const double mu = dw * g.mode_density_time() / kTwoPi;

    auto side = [&](bool transpose) {
        DArray acc = parallel_rows_sum<DArray>(n, opt.threads, [&](std::size_t r) {
            const double wr = w0 + dw * static_cast<double>(r);
            std::vector<cplx> row(m, cplx{});
            for (std::size_t c = 0; c < n; ++c) {
                const double wc = w0 + dw * static_cast<double>(c);
                row[c] = transpose ? st.amplitude(wc, wr) : st.amplitude(wr, wc);
            }
            fft_pow2(row);
            DArray out;
            out.v.resize(m);
            for (std::size_t j = 0; j < m; ++j) out.v[j] = std::norm(row[j]);
            return out;
        });
        if (acc.v.empty()) acc.v.assign(m, 0.0);
        return acc.v;
    };

    std::vector<double> intensity = side(false);
    const std::vector<double> other = side(true);
    const double mu3 = mu * mu * mu;
    for (std::size_t j = 0; j < m; ++j)
        intensity[j] = mu3 * (intensity[j] + other[j]);
    return intensity;
}

}  // namespace detail

// Cumulative energy flow through the detection plane at time t.  Diagonal
// density matrices are c.w.: exactly 2 t / T quanta.  Pure states integrate
// the two-channel intensity numerically on a comb extended by `oversample`
// (so the pulse position within [0, oversample*T) is physical, not wrapped);
// t = infinity evaluates the Parseval sum instead.
inline double energy_flow(const BiphotonState& st, double t,
                          const EnergyFlowOptions& opt = {}) {
    const double T = st.grid().mode_density_time();
    switch (st.kind()) {
        case StateKind::diagonal_mixed:
        case StateKind::factorized_mixed:
            return 2.0 * t / T;
        case StateKind::coherent_lift:
            return std::norm(st.alpha()) * energy_flow(st.base(), t, opt);
        default: break;
    }

    if (std::isinf(t)) {
        // Parseval closure: 2 * (T/2pi)^2 integral |c|^2 on a refined comb.
        const FrequencyGrid& g = st.grid();
        const double dw = g.spacing() / 2.0;
        const auto n = static_cast<std::size_t>(
                           std::ceil((g.omega_max() - g.omega_min()) / dw)) + 1;
        FrequencyGrid fine(g.omega_min(), 0, dw, n);
        return 2.0 * st.norm_integral_on(fine, opt.threads);
    }

    const double period = opt.oversample * T;
    if (!(t >= 0.0) || t > 0.98 * period)
        throw ConfigError("energy_flow: t outside [0, oversample*T)");
    const double max_w = st.source().max_width();
    const double dt_target = std::min(1.0 / (opt.tau_step_widths * max_w), T / 64.0);
    const std::size_t m = next_pow2(static_cast<std::size_t>(std::ceil(period / dt_target)));
    const std::vector<double> intensity = detail::pulse_intensity(st, period, m, opt);

    // trapezoid over tau in [0, t]
    const double dtau = period / static_cast<double>(m);
    const auto jmax = static_cast<std::size_t>(t / dtau);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 <= jmax && j + 1 < m; ++j)
        acc += 0.5 * (intensity[j] + intensity[j + 1]) * dtau;
    return acc / T;
}

// ---------------------------------------------------------------------------

struct Certificate {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    std::string detail;
    std::string grid_provenance;
};

inline std::string grid_provenance(const FrequencyGrid& g) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "T=%.6g spacing=%.6g modes=%zu span=[%.6g,%.6g]",
                  g.mode_density_time(), g.spacing(), g.size(), g.omega_min(),
                  g.omega_max());
    return buf;
}

// Energy-fair comparison certificate: the pulsed pure state and its
// disentangled c.w. analog must have delivered the same energy at t = T.
inline Certificate comparison_certificate(const BiphotonState& pure_state, double T,
                                          double tolerance = 0.02,
                                          const EnergyFlowOptions& opt = {}) {
    if (!is_pure(pure_state.kind()))
        throw StateError("comparison_certificate: pure state required");
    Certificate c;
    c.name = "energy_fair_comparison[" + pure_state.label() + "]";
    c.tolerance = tolerance;
    c.reference = 2.0;  // F_rho1(T) = 2 t/T at t = T, exact
    c.value = energy_flow(pure_state, T, opt);
    c.pass = std::abs(c.value - c.reference) <= tolerance * c.reference;
    c.detail = c.pass ? "pulse energy delivered within [0, T]"
                      : "pulse not contained in [0, T]";
    c.grid_provenance = grid_provenance(pure_state.grid());
    return c;
}

}  // namespace tp2a
