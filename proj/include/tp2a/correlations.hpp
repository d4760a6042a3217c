// correlations.hpp — cross second-order correlation functions in time and
// frequency for the state catalog, and the Fig. 1/2 style map grids.
//
// Conventions.  The time map is the two-time Fourier transform of the state,
//   g2(t, tau) = |sum_kq c_kq e^{-i wk tau - i wq t}|^2 / T^2,
// normalized so a pure state's map integrates to 1 over one box period in
// each time axis (two-photon arrival density).  Diagonal density matrices
// have no off-diagonal coherences, so their map is the constant sum_kq p / T^2.
// The frequency map is |c|^2 for pure states and the weight p for mixed ones,
// i.e. the mode-pair weight (scale 1/T^2, the paper's c^2/L^2).

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "tp2a/core.hpp"
#include "tp2a/reduction.hpp"
#include "tp2a/states.hpp"

namespace tp2a {

struct CorrelationMap {
    std::vector<double> axis1;   // tau (time maps) or omega
    std::vector<double> axis2;   // t (time maps) or omega'
    std::vector<double> values;  // row-major: values[i1 * axis2.size() + i2]
    std::string normalization_tag = "1/T^2";
    std::string state_tag;

    double at(std::size_t i1, std::size_t i2) const {
        return values[i1 * axis2.size() + i2];
    }
    double max_value() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }
};

struct MapBudget {
    std::size_t max_cells = 4'000'000;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
    return v;
}

// ---------------------------------------------------------------------------
// Time domain.

namespace detail {

// sum over the diagonal weights; equals 1 up to grid rounding.
inline double weight_total(const BiphotonState& st, int threads = 1) {
    return st.norm_integral_on(st.grid(), threads);
}

}  // namespace detail

// Single-point g2x(t, tau).  Pure states pay one O(N^2) column pass.
inline double g2_time(const BiphotonState& st, double t, double tau, int threads = 1) {
    const FrequencyGrid& g = st.grid();
    const double T = g.mode_density_time();
    switch (st.kind()) {
        case StateKind::coherent_lift: {
            const double a2 = std::norm(st.alpha());
            return a2 * a2 * g2_time(st.base(), t, tau, threads);
        }
        case StateKind::diagonal_mixed:
        case StateKind::factorized_mixed:
            // no temporal coherence: time-independent constant
            return detail::weight_total(st, threads) / (T * T);
        default: {
            const std::size_t n = g.size();
            const cplx acc = parallel_rows_sum<cplx>(n, threads, [&](std::size_t k) {
                const double wk = g.omega(k);
                cplx row{};
                for (std::size_t q = 0; q < n; ++q)
                    row += st.amplitude(wk, g.omega(q)) *
                           std::polar(1.0, -g.omega(q) * t);
                return row * std::polar(1.0, -wk * tau);
            });
            return std::norm(acc) / (T * T);
        }
    }
}

// Dense (tau, t) map; pure states evaluate one intermediate column transform
// per tau row, parallelized over rows with the output independent of the
// partitioning.
inline CorrelationMap g2_time_map(const BiphotonState& st, std::vector<double> tau_axis,
                                  std::vector<double> t_axis, int threads = 1,
                                  const MapBudget& budget = {}) {
    if (tau_axis.size() * t_axis.size() > budget.max_cells)
        throw BudgetError("g2_time_map: resolution exceeds the cell budget");
    CorrelationMap map;
    map.axis1 = std::move(tau_axis);
    map.axis2 = std::move(t_axis);
    map.state_tag = st.label();
    map.values.assign(map.axis1.size() * map.axis2.size(), 0.0);
    const FrequencyGrid& g = st.grid();
    const double T = g.mode_density_time();

    switch (st.kind()) {
        case StateKind::coherent_lift: {
            CorrelationMap base = g2_time_map(st.base(), map.axis1, map.axis2, threads, budget);
            const double a2 = std::norm(st.alpha());
            for (auto& v : base.values) v *= a2 * a2;
            base.state_tag = st.label();
            base.normalization_tag += " * |alpha|^4";
            return base;
        }
        case StateKind::diagonal_mixed:
        case StateKind::factorized_mixed: {
            const double c = detail::weight_total(st, threads) / (T * T);
            for (auto& v : map.values) v = c;
            return map;
        }
        default: break;
    }

    const std::size_t n = g.size();
    const std::size_t n1 = map.axis1.size();
    const std::size_t n2 = map.axis2.size();
    std::vector<double>& vals = map.values;
    const std::vector<double>& a1 = map.axis1;
    const std::vector<double>& a2v = map.axis2;

    // stage 1: partial transform V[i][q] = sum_k c_kq e^{-i wk tau_i}; each
    // amplitude is evaluated once, sequentially, so the accumulation order is
    // fixed regardless of the worker count.
    std::vector<cplx> vq(n1 * n, cplx{});
    std::vector<cplx> row(n);
    std::vector<cplx> phases(n1);
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = g.omega(k);
        bool live = false;
        for (std::size_t q = 0; q < n; ++q) {
            row[q] = st.amplitude(wk, g.omega(q));
            live |= row[q] != cplx{};
        }
        if (!live) continue;
        for (std::size_t i = 0; i < n1; ++i) phases[i] = std::polar(1.0, -wk * a1[i]);
        for (std::size_t i = 0; i < n1; ++i) {
            const cplx ph = phases[i];
            cplx* dst = vq.data() + i * n;
            for (std::size_t q = 0; q < n; ++q) dst[q] += row[q] * ph;
        }
    }

    // stage 2: finish the transform per output cell, parallel over tau rows;
    // the mode phases advance by recurrence on the uniform comb.
    parallel_rows_for(n1, threads, [&](std::size_t i) {
        const cplx* src = vq.data() + i * n;
        for (std::size_t j = 0; j < n2; ++j) {
            const double t = a2v[j];
            cplx ph = std::polar(1.0, -g.omega(0) * t);
            const cplx step = std::polar(1.0, -g.spacing() * t);
            cplx acc{};
            for (std::size_t q = 0; q < n; ++q) {
                acc += src[q] * ph;
                ph *= step;
            }
            vals[i * n2 + j] = std::norm(acc) / (T * T);
        }
    });
    return map;
}

// Closed-form cascade map: 4 ga gb theta(tau) theta(t-tau)
//   e^{-2 ga tau - 2 gb (t-tau)}  (units 1/T^2-free; integrates to 1).
inline double g2_time_cascade_closed(const SourceParams& s, double t, double tau) {
    if (tau < 0.0 || t < tau) return 0.0;
    const double ga = s.width_alpha, gb = s.width_beta;
    return 4.0 * ga * gb * std::exp(-2.0 * ga * tau - 2.0 * gb * (t - tau));
}

// Closed-form SPDC map with the two-process interference fringe.
inline double g2_time_spdc_closed(const SourceParams& s, double t, double tau) {
    const double sa = s.width_alpha, sb = s.width_beta;
    const double sa2 = sa * sa, sb2 = sb * sb;
    const double dtm = t - tau;
    const double mid = s.t0 - 0.5 * (t + tau);
    const double expo = -0.5 * sb2 * dtm * dtm - (2.0 * sa2 * sb2 / (sa2 + 2.0 * sb2)) * mid * mid;
    const double fringe =
        1.0 + std::cos((s.omega_beta - s.omega_alpha) * dtm + s.phase);
    const double pref = sa * sb2 / (kPi * std::sqrt(sa2 + 2.0 * sb2));
    return expo > shapes::kExpCutoff ? pref * fringe * std::exp(expo) : 0.0;
}

// ---------------------------------------------------------------------------
// Frequency domain.

inline double g2_freq(const BiphotonState& st, double w, double wp) {
    if (st.kind() == StateKind::coherent_lift) {
        const double a2 = std::norm(st.alpha());
        return a2 * a2 * g2_freq(st.base(), w, wp);
    }
    return st.weight(w, wp);
}

inline CorrelationMap g2_freq_map(const BiphotonState& st, std::vector<double> w_axis,
                                  std::vector<double> wp_axis, int threads = 1,
                                  const MapBudget& budget = {}) {
    if (w_axis.size() * wp_axis.size() > budget.max_cells)
        throw BudgetError("g2_freq_map: resolution exceeds the cell budget");
    CorrelationMap map;
    map.axis1 = std::move(w_axis);
    map.axis2 = std::move(wp_axis);
    map.state_tag = st.label();
    const std::size_t n2 = map.axis2.size();
    map.values.assign(map.axis1.size() * n2, 0.0);
    std::vector<double>& vals = map.values;
    const std::vector<double>& a1 = map.axis1;
    const std::vector<double>& a2 = map.axis2;
    parallel_rows_for(a1.size(), threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < n2; ++j) vals[i * n2 + j] = g2_freq(st, a1[i], a2[j]);
    });
    return map;
}

// ---------------------------------------------------------------------------
// Ridge widths.  Coordinates are rotated 45 degrees; profiles are the maxima
// over bins of the sum coordinate u = x + y and the difference coordinate
// w = y - x, and widths are interpolated FWHMs of those profiles.  Widths are
// reported in u/w units (no 1/sqrt(2) normalization), so a Lorentzian
// anti-diagonal ridge 1/(u^2 + ga^2) reports FWHM 2*ga.

struct RidgeWidths {
    double diagonal_width = 0.0;      // transverse extent of a diagonal ridge (w)
    double antidiagonal_width = 0.0;  // transverse extent of an anti-diagonal ridge (u)
};

namespace detail {

inline double profile_fwhm(const std::vector<double>& coord, const std::vector<double>& prof) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < prof.size(); ++i)
        if (prof[i] > prof[imax]) imax = i;
    const double half = 0.5 * prof[imax];
    double left = coord.front(), right = coord.back();
    for (std::size_t i = imax; i-- > 0;) {
        if (prof[i] <= half) {
            const double f = (half - prof[i]) / (prof[i + 1] - prof[i]);
            left = coord[i] + f * (coord[i + 1] - coord[i]);
            break;
        }
    }
    for (std::size_t i = imax + 1; i < prof.size(); ++i) {
        if (prof[i] <= half) {
            const double f = (prof[i - 1] - half) / (prof[i - 1] - prof[i]);
            right = coord[i - 1] + f * (coord[i] - coord[i - 1]);
            break;
        }
    }
    return right - left;
}

}  // namespace detail

inline RidgeWidths correlation_widths(const CorrelationMap& map) {
    const std::size_t n1 = map.axis1.size(), n2 = map.axis2.size();
    if (n1 < 3 || n2 < 3) throw StateError("correlation_widths: map too small");
    const double vmax = map.max_value();
    double vmin = vmax;
    for (double v : map.values) vmin = std::min(vmin, v);
    if (!(vmax > 0.0) || (vmax - vmin) <= 1e-9 * vmax)
        throw StateError("correlation_widths: no correlation structure (flat map)");

    const double s1 = n1 > 1 ? (map.axis1.back() - map.axis1.front()) / double(n1 - 1) : 1.0;
    const double s2 = n2 > 1 ? (map.axis2.back() - map.axis2.front()) / double(n2 - 1) : 1.0;
    const double h = std::max(std::abs(s1), std::abs(s2));

    const double u_lo = map.axis1.front() + map.axis2.front();
    const double u_hi = map.axis1.back() + map.axis2.back();
    const double w_lo = map.axis2.front() - map.axis1.back();
    const double w_hi = map.axis2.back() - map.axis1.front();
    const auto nu = static_cast<std::size_t>(std::floor((u_hi - u_lo) / h)) + 2;
    const auto nw = static_cast<std::size_t>(std::floor((w_hi - w_lo) / h)) + 2;
    std::vector<double> pu(nu, 0.0), pw(nw, 0.0), cu(nu), cw(nw);
    for (std::size_t b = 0; b < nu; ++b) cu[b] = u_lo + h * static_cast<double>(b);
    for (std::size_t b = 0; b < nw; ++b) cw[b] = w_lo + h * static_cast<double>(b);

    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            const double v = map.at(i, j);
            const double u = map.axis1[i] + map.axis2[j];
            const double w = map.axis2[j] - map.axis1[i];
            const auto bu = static_cast<std::size_t>(std::llround((u - u_lo) / h));
            const auto bw = static_cast<std::size_t>(std::llround((w - w_lo) / h));
            pu[std::min(bu, nu - 1)] = std::max(pu[std::min(bu, nu - 1)], v);
            pw[std::min(bw, nw - 1)] = std::max(pw[std::min(bw, nw - 1)], v);
        }

    RidgeWidths r;
    r.antidiagonal_width = detail::profile_fwhm(cu, pu);
    r.diagonal_width = detail::profile_fwhm(cw, pw);
    return r;
}

}  // namespace tp2a
