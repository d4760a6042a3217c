// states.hpp — the catalog of biphoton light states as spectral objects.
//
// A pure state is a complex joint spectral amplitude c(wk, wq) over the mode
// comb, normalized so that sum_{kq} |c|^2 = 1 on its construction grid (the
// discrete sum equals the continuum (T/2pi)^2 * integral because each comb
// index carries measure spacing*T/2pi = 1).  Mixed states are either the
// diagonal part of a pure state (weights p = |c|^2) or the product of its
// single-photon marginals.  States are immutable after construction and safe
// to sample from concurrent threads.
//
// Normalization constants are always computed numerically on the grid; the
// analytic prefactor relations are asserted in the test suite instead of
// being trusted here.

#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tp2a/core.hpp"
#include "tp2a/reduction.hpp"

namespace tp2a {

using cplx = std::complex<double>;

enum class StateKind {
    uncorrelated_pure,
    cascade_pure,
    spdc_pure,
    custom_pure,
    diagonal_mixed,
    factorized_mixed,
    coherent_lift,
};

inline const char* kind_name(StateKind k) {
    switch (k) {
        case StateKind::uncorrelated_pure: return "uncorrelated_pure";
        case StateKind::cascade_pure: return "cascade_pure";
        case StateKind::spdc_pure: return "spdc_pure";
        case StateKind::custom_pure: return "custom_pure";
        case StateKind::diagonal_mixed: return "diagonal_mixed";
        case StateKind::factorized_mixed: return "factorized_mixed";
        case StateKind::coherent_lift: return "coherent_lift";
    }
    return "?";
}

inline bool is_pure(StateKind k) {
    return k == StateKind::uncorrelated_pure || k == StateKind::cascade_pure ||
           k == StateKind::spdc_pure || k == StateKind::custom_pure;
}

// ---------------------------------------------------------------------------
// Unnormalized amplitude shapes.  Shared by the state evaluators and by the
// specialized quadrature loops in the engine; exponentials are cut off well
// above the underflow threshold so Gaussian tails flush to an exact zero.

namespace shapes {

inline constexpr double kExpCutoff = -745.0;

inline cplx uncorrelated_raw(const SourceParams& s, double wk, double wq) {
    const cplx da(wk - s.omega_alpha, s.width_alpha);
    const cplx db(wq - s.omega_beta, s.width_beta);
    return 1.0 / (da * db);
}

inline cplx cascade_raw(const SourceParams& s, double wk, double wq) {
    const cplx du(wk + wq - s.omega_alpha - s.omega_beta, s.width_alpha);
    const cplx db(wq - s.omega_beta, s.width_beta);
    return 1.0 / (du * db);
}

inline cplx spdc_raw(const SourceParams& s, double wk, double wq) {
    const double x = wk - s.omega_alpha;
    const double y = wq - s.omega_beta;
    const double xb = wk - s.omega_beta;
    const double yb = wq - s.omega_alpha;
    const double sa2 = 2.0 * s.width_alpha * s.width_alpha;
    const double sb2 = 2.0 * s.width_beta * s.width_beta;

    const double pump = -(x + y) * (x + y) / sa2;
    const double e1 = pump - (x * x + y * y) / sb2;
    const double e2 = pump - (xb * xb + yb * yb) / sb2;
    const double a1 = e1 > kExpCutoff ? std::exp(e1) : 0.0;
    const double a2 = e2 > kExpCutoff ? std::exp(e2) : 0.0;
    if (a1 == 0.0 && a2 == 0.0) return {0.0, 0.0};
    const cplx comb = a1 + std::polar(a2, s.phase);
    return std::polar(1.0, (x + y) * s.t0) * comb;
}

// Analytic prefactors; used as test oracles against the numeric constants.
inline double uncorrelated_prefactor(const SourceParams& s, double T) {
    return 2.0 * std::sqrt(s.width_alpha * s.width_beta) / T;
}
inline double spdc_prefactor(const SourceParams& s, double T) {
    const double sa = s.width_alpha, sb = s.width_beta;
    const double n2 = (kTwoPi / T) * (kTwoPi / T) * std::sqrt(sa * sa + 2.0 * sb * sb) /
                      (kTwoPi * sa * sb * sb);
    return std::sqrt(n2);
}

}  // namespace shapes

// ---------------------------------------------------------------------------

class BiphotonState {
  public:
    using Amplitude = std::function<cplx(double, double)>;

    StateKind kind() const { return kind_; }
    const SourceParams& source() const { return source_; }
    const FrequencyGrid& grid() const { return grid_; }
    double norm_const() const { return norm_; }
    const std::string& label() const { return label_; }
    cplx alpha() const { return alpha_; }
    const BiphotonState& base() const {
        if (!base_) throw StateError("state has no base");
        return *base_;
    }

    // Joint spectral amplitude (pure kinds only).
    cplx amplitude(double wk, double wq) const {
        switch (kind_) {
            case StateKind::uncorrelated_pure:
                return norm_ * shapes::uncorrelated_raw(source_, wk, wq);
            case StateKind::cascade_pure:
                return norm_ * shapes::cascade_raw(source_, wk, wq);
            case StateKind::spdc_pure:
                return norm_ * shapes::spdc_raw(source_, wk, wq);
            case StateKind::custom_pure:
                return norm_ * custom_(wk, wq);
            default:
                throw StateError(std::string("amplitude() on non-pure state ") +
                                 kind_name(kind_));
        }
    }

    // Mixed-state weight at a frequency pair (diagonal / factorized); for a
    // pure state this is |c|^2, which is what the frequency correlation map
    // reports anyway.
    double weight(double wk, double wq) const {
        switch (kind_) {
            case StateKind::diagonal_mixed: {
                const double m = std::abs(base_->amplitude(wk, wq));
                return m * m;
            }
            case StateKind::factorized_mixed:
                return base_->marginal_k(wk) * base_->marginal_q(wq);
            case StateKind::coherent_lift:
                throw StateError("weight() on coherent lift: unwrap base first");
            default: {
                const double m = std::abs(amplitude(wk, wq));
                return m * m;
            }
        }
    }

    // Grid-indexed weight (hot path; factorized uses the cached marginals).
    double weight_at(std::size_t i, std::size_t j) const {
        if (kind_ == StateKind::factorized_mixed) return mk_[i] * mq_[j];
        return weight(grid_.omega(i), grid_.omega(j));
    }

    // Single-photon spectra: discrete row/column sums of |c|^2 (or weights).
    // These agree pointwise across a pure state and its disentangled and
    // factorized descendants.
    double marginal_k(double w) const {
        if (kind_ == StateKind::factorized_mixed) return base_->marginal_k(w);
        if (kind_ == StateKind::coherent_lift) return base_->marginal_k(w);
        double acc = 0.0;
        const BiphotonState& src = kind_ == StateKind::diagonal_mixed ? *base_ : *this;
        for (std::size_t j = 0; j < grid_.size(); ++j) {
            const double m = std::abs(src.amplitude(w, grid_.omega(j)));
            acc += m * m;
        }
        return acc;
    }
    double marginal_q(double w) const {
        if (kind_ == StateKind::factorized_mixed) return base_->marginal_q(w);
        if (kind_ == StateKind::coherent_lift) return base_->marginal_q(w);
        double acc = 0.0;
        const BiphotonState& src = kind_ == StateKind::diagonal_mixed ? *base_ : *this;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double m = std::abs(src.amplitude(grid_.omega(i), w));
            acc += m * m;
        }
        return acc;
    }
    double marginal_k_at(std::size_t i) const {
        return mk_.empty() ? marginal_k(grid_.omega(i)) : mk_[i];
    }
    double marginal_q_at(std::size_t j) const {
        return mq_.empty() ? marginal_q(grid_.omega(j)) : mq_[j];
    }

    // sum_{kq} |c|^2 (or weights) evaluated on an arbitrary comb; equals the
    // continuum (T/2pi)^2 double integral via the measure (spacing*T/2pi)^2
    // carried per index.
    double norm_integral_on(const FrequencyGrid& g, int threads = 1) const;

    // --- factories ----------------------------------------------------------

    static BiphotonState uncorrelated(const SourceParams& s, const FrequencyGrid& g,
                                      int threads = 1);
    static BiphotonState cascade(const SourceParams& s, const FrequencyGrid& g,
                                 int threads = 1);
    static BiphotonState spdc(const SourceParams& s, const FrequencyGrid& g,
                              int threads = 1);
    static BiphotonState custom_pure(Amplitude raw, const SourceParams& s,
                                     const FrequencyGrid& g, std::string label,
                                     int threads = 1);

    friend BiphotonState disentangle(const BiphotonState&);
    friend BiphotonState factorize(const BiphotonState&, int threads);
    friend BiphotonState coherent_lift(const BiphotonState&, cplx alpha);

  private:
    BiphotonState() = default;

    static void check_resolution(const SourceParams& s, const FrequencyGrid& g) {
        if (g.spacing() > s.min_width() / 5.0)
            throw GridError("state construction: grid under-resolves a spectral width");
    }

    StateKind kind_ = StateKind::custom_pure;
    SourceParams source_;
    FrequencyGrid grid_;
    double norm_ = 1.0;
    std::string label_;
    Amplitude custom_;
    cplx alpha_{1.0, 0.0};
    std::shared_ptr<const BiphotonState> base_;
    std::vector<double> mk_, mq_;  // factorized marginals on the grid
};

// ---------------------------------------------------------------------------
// Normalization sums.  Kind-specific groupings keep the cost O(N) or clipped
// O(N^2); each grouping is a fixed, documented summation order.

namespace detail {

inline double uncorrelated_norm_sum(const SourceParams& s, const FrequencyGrid& g) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = g.omega(i);
        const double xa = w - s.omega_alpha;
        const double xb = w - s.omega_beta;
        sa += 1.0 / (xa * xa + s.width_alpha * s.width_alpha);
        sb += 1.0 / (xb * xb + s.width_beta * s.width_beta);
    }
    return sa * sb;
}

// sum_{mn} 1/((u_{m+n}^2+ga^2)(v_n^2+gb^2)) grouped over the sum index.
inline double cascade_norm_sum(const SourceParams& s, const FrequencyGrid& g) {
    const std::size_t n = g.size();
    const double ga = s.width_alpha, gb = s.width_beta;
    const double sum0 = 2.0 * g.omega(0);
    const double dw = g.spacing();
    std::vector<double> prefix(2 * n, 0.0);
    double acc = 0.0;
    for (std::size_t sidx = 0; sidx < 2 * n - 1; ++sidx) {
        const double u = sum0 + static_cast<double>(sidx) * dw - s.omega_alpha - s.omega_beta;
        acc += 1.0 / (u * u + ga * ga);
        prefix[sidx + 1] = acc;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = g.omega(j) - s.omega_beta;
        total += (prefix[j + n] - prefix[j]) / (v * v + gb * gb);
    }
    return total;
}

inline double spdc_norm_sum(const SourceParams& s, const FrequencyGrid& g, int threads) {
    const std::size_t n = g.size();
    const double sb2 = 2.0 * s.width_beta * s.width_beta;
    return parallel_rows_sum<double>(n, threads, [&](std::size_t i) {
        const double wk = g.omega(i);
        const double x = wk - s.omega_alpha;
        const double xb = wk - s.omega_beta;
        if (std::min(x * x, xb * xb) / sb2 > 750.0) return 0.0;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double m = std::abs(shapes::spdc_raw(s, wk, g.omega(j)));
            row += m * m;
        }
        return row;
    });
}

template <class F>
double generic_norm_sum(const F& raw, const FrequencyGrid& g, int threads) {
    const std::size_t n = g.size();
    return parallel_rows_sum<double>(n, threads, [&](std::size_t i) {
        const double wk = g.omega(i);
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double m = std::abs(raw(wk, g.omega(j)));
            row += m * m;
        }
        return row;
    });
}

}  // namespace detail

inline double BiphotonState::norm_integral_on(const FrequencyGrid& g, int threads) const {
    // measure per index relative to the state's own comb (1 when g is the
    // construction grid)
    const double mu = g.spacing() * grid_.mode_density_time() / kTwoPi;
    const double mu2 = mu * mu;
    const double n2 = norm_ * norm_;
    switch (kind_) {
        case StateKind::coherent_lift:
        case StateKind::diagonal_mixed:
            return base_->norm_integral_on(g, threads);
        case StateKind::factorized_mixed: {
            double a = 0.0, b = 0.0;
            const bool own_grid = g.size() == grid_.size() &&
                                  g.spacing() == grid_.spacing() &&
                                  g.omega_min() == grid_.omega_min();
            for (std::size_t i = 0; i < g.size(); ++i) {
                a += own_grid ? mk_[i] : base_->marginal_k(g.omega(i));
                b += own_grid ? mq_[i] : base_->marginal_q(g.omega(i));
            }
            return mu2 * a * b;
        }
        case StateKind::uncorrelated_pure:
            return mu2 * n2 * detail::uncorrelated_norm_sum(source_, g);
        case StateKind::cascade_pure:
            return mu2 * n2 * detail::cascade_norm_sum(source_, g);
        case StateKind::spdc_pure:
            return mu2 * n2 * detail::spdc_norm_sum(source_, g, threads);
        case StateKind::custom_pure:
        default:
            return mu2 * n2 * detail::generic_norm_sum(custom_, g, threads);
    }
}

inline BiphotonState BiphotonState::uncorrelated(const SourceParams& s,
                                                 const FrequencyGrid& g, int threads) {
    (void)threads;
    s.validate();
    check_resolution(s, g);
    BiphotonState st;
    st.kind_ = StateKind::uncorrelated_pure;
    st.source_ = s;
    st.grid_ = g;
    st.label_ = "uncorrelated";
    st.norm_ = 1.0 / std::sqrt(detail::uncorrelated_norm_sum(s, g));
    return st;
}

inline BiphotonState BiphotonState::cascade(const SourceParams& s,
                                            const FrequencyGrid& g, int threads) {
    (void)threads;
    s.validate();
    check_resolution(s, g);
    BiphotonState st;
    st.kind_ = StateKind::cascade_pure;
    st.source_ = s;
    st.grid_ = g;
    st.label_ = "cascade";
    st.norm_ = 1.0 / std::sqrt(detail::cascade_norm_sum(s, g));
    return st;
}

inline BiphotonState BiphotonState::spdc(const SourceParams& s, const FrequencyGrid& g,
                                         int threads) {
    s.validate();
    check_resolution(s, g);
    if (!(s.t0 >= 0.0)) throw ConfigError("spdc: t0 must be >= 0");
    BiphotonState st;
    st.kind_ = StateKind::spdc_pure;
    st.source_ = s;
    st.grid_ = g;
    st.label_ = "spdc";
    st.norm_ = 1.0 / std::sqrt(detail::spdc_norm_sum(s, g, threads));
    return st;
}

inline BiphotonState BiphotonState::custom_pure(Amplitude raw, const SourceParams& s,
                                                const FrequencyGrid& g, std::string label,
                                                int threads) {
    BiphotonState st;
    st.kind_ = StateKind::custom_pure;
    st.source_ = s;
    st.grid_ = g;
    st.label_ = std::move(label);
    st.custom_ = std::move(raw);
    const double sum = detail::generic_norm_sum(st.custom_, g, threads);
    if (!(sum > 0.0)) throw StateError("custom_pure: amplitude has zero norm");
    st.norm_ = 1.0 / std::sqrt(sum);
    return st;
}

// Diagonal part of the pure density matrix: p(wk, wq) = |c(wk, wq)|^2.  The
// correlated-separable state of the catalog.
inline BiphotonState disentangle(const BiphotonState& s) {
    if (!is_pure(s.kind()))
        throw StateError("disentangle: input must be a pure state");
    BiphotonState st;
    st.kind_ = StateKind::diagonal_mixed;
    st.source_ = s.source();
    st.grid_ = s.grid();
    st.norm_ = s.norm_const();
    st.label_ = s.label() + "+disentangle";
    st.base_ = std::make_shared<BiphotonState>(s);
    return st;
}

// Product of the single-photon marginals: same spectrum, no correlations.
inline BiphotonState factorize(const BiphotonState& s, int threads = 1) {
    if (!is_pure(s.kind()))
        throw StateError("factorize: input must be a pure state");
    BiphotonState st;
    st.kind_ = StateKind::factorized_mixed;
    st.source_ = s.source();
    st.grid_ = s.grid();
    st.norm_ = s.norm_const();
    st.label_ = s.label() + "+factorize";
    st.base_ = std::make_shared<BiphotonState>(s);

    const std::size_t n = s.grid().size();
    st.mk_.assign(n, 0.0);
    st.mq_.assign(n, 0.0);
    std::vector<double>& mk = st.mk_;
    std::vector<double>& mq = st.mq_;
    parallel_rows_for(n, threads, [&](std::size_t i) {
        mk[i] = s.marginal_k(s.grid().omega(i));
        mq[i] = s.marginal_q(s.grid().omega(i));
    });
    return st;
}

// Two-mode coherent superposition carrying the same joint spectrum; the 2P2A
// probability scales as |alpha|^4 relative to the base biphoton state.
inline BiphotonState coherent_lift(const BiphotonState& base, cplx alpha) {
    if (!is_pure(base.kind()))
        throw StateError("coherent_lift: base must be a pure state");
    BiphotonState st;
    st.kind_ = StateKind::coherent_lift;
    st.source_ = base.source();
    st.grid_ = base.grid();
    st.norm_ = base.norm_const();
    st.alpha_ = alpha;
    st.label_ = base.label() + "+coherent";
    st.base_ = std::make_shared<BiphotonState>(base);
    return st;
}

// Convenience factories mirroring the operation signatures: the state builds
// its own source-window comb from the quantization time.
inline BiphotonState make_uncorrelated(const SourceParams& s, double T,
                                       double coverage = 40.0, int threads = 1) {
    return BiphotonState::uncorrelated(s, source_window_grid(s, T, coverage), threads);
}
inline BiphotonState make_cascade(const SourceParams& s, double T,
                                  double coverage = 40.0, int threads = 1) {
    return BiphotonState::cascade(s, source_window_grid(s, T, coverage), threads);
}
inline BiphotonState make_spdc(const SourceParams& s, double T, double coverage = 40.0,
                               int threads = 1) {
    return BiphotonState::spdc(s, source_window_grid(s, T, coverage), threads);
}

}  // namespace tp2a
