// core.hpp — units convention, physical parameter bundles, frequency grids and
// result containers shared by the whole library.
//
// Units: every frequency in the library is an *angular* frequency expressed in
// rad/us; times are in us (1/unit frequency).  The speed of light is set to 1,
// so the quantization length L enters only through the quantization time
// T = L/c.  The mode comb of the quantization box has spacing 2*pi/T, and a
// FrequencyGrid *is* that comb: spacing * T == 2*pi exactly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tp2a {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Errors.  The CLI maps these onto exit codes (config 2, grid/budget 3,
// strict-regime 4).

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};
struct GridError : std::runtime_error {
    explicit GridError(const std::string& m) : std::runtime_error(m) {}
};
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& m) : std::runtime_error(m) {}
};
struct StateError : std::runtime_error {
    explicit StateError(const std::string& m) : std::runtime_error(m) {}
};
struct RegimeError : std::runtime_error {
    explicit RegimeError(const std::string& m) : std::runtime_error(m) {}
};

// ---------------------------------------------------------------------------

// Fixed internal conventions; kept as a value type so configs can carry it.
struct UnitsConvention {
    std::string frequency_unit = "rad/us";  // angular frequency
    std::string time_unit = "us";
    double speed_of_light = 1.0;  // L enters only through T = L/c
};

// Detecting-atom pair.  gamma1/gamma2 enter the physics only through the
// coupling scale p0; with p0 = 1 every probability is reported in units of p0.
struct AtomPair {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double gamma1 = 1e-3;
    double gamma2 = 1e-3;
    double p0 = 1.0;

    void validate() const {
        if (!(omega1 > 0.0) || !(omega2 > 0.0))
            throw ConfigError("AtomPair: transition frequencies must be > 0");
        if (omega1 == omega2)
            throw ConfigError("AtomPair: omega1 and omega2 must differ");
        if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
            throw ConfigError("AtomPair: atomic widths must be > 0");
        if (!(p0 > 0.0)) throw ConfigError("AtomPair: p0 must be > 0");
    }

    // p0 = 36*pi^2*gamma1*gamma2*c^4 / (omega1^2*omega2^2*S^2), c = 1.
    static AtomPair with_derived_p0(double w1, double w2, double g1, double g2,
                                    double beam_section) {
        AtomPair a{w1, w2, g1, g2, 1.0};
        a.p0 = 36.0 * kPi * kPi * g1 * g2 /
               (w1 * w1 * w2 * w2 * beam_section * beam_section);
        a.validate();
        return a;
    }
};

// Emitting-source parameters.  width_* are the Lorentzian gammas for the
// wavepacket/cascade states and the Gaussian sigmas for the SPDC state.
struct SourceParams {
    double omega_alpha = 0.0;
    double omega_beta = 0.0;
    double width_alpha = 0.0;
    double width_beta = 0.0;
    double t0 = 0.0;            // SPDC pump-pulse arrival time
    double phase = kPi / 2.0;   // relative phase of the two SPDC components

    void validate() const {
        if (!(width_alpha > 0.0) || !(width_beta > 0.0))
            throw ConfigError("SourceParams: spectral widths must be > 0");
    }
    double max_width() const { return std::max(width_alpha, width_beta); }
    double min_width() const { return std::min(width_alpha, width_beta); }
};

// 2P2A detuning delta and single-photon mismatch Delta.
struct Detunings {
    double delta = 0.0;
    double Delta = 0.0;

    static Detunings from(const SourceParams& s, const AtomPair& a) {
        Detunings d;
        d.delta = s.omega_alpha + s.omega_beta - a.omega1 - a.omega2;
        d.Delta = std::min(std::abs(s.omega_alpha - a.omega1),
                           std::abs(a.omega2 - s.omega_beta));
        return d;
    }

    // In the paper's symmetric convention the two single-photon mismatches
    // are equal in magnitude.
    static bool symmetric_convention(const SourceParams& s, const AtomPair& a,
                                     double rel_tol = 1e-9) {
        const double m1 = std::abs(s.omega_alpha - a.omega1);
        const double m2 = std::abs(a.omega2 - s.omega_beta);
        return std::abs(m1 - m2) <= rel_tol * std::max(m1, m2);
    }
};

// The paper writes ">>" without numbers; the thresholds are configurable.
struct RegimeThresholds {
    double long_time = 20.0;         // t * width >= 20
    double scale_separation = 20.0;  // Delta / width >= 20
    double coherent_alpha = 10.0;    // |alpha| >= 10 for the coherent lift
    double switched_on_t0 = 3.0;     // t0 >= 3 * (1/wa + 1/wb) for SPDC
};

struct RegimeFlags {
    bool long_time = false;
    bool scale_separation = false;
    bool small_detuning = false;

    std::vector<std::string> to_strings() const {
        std::vector<std::string> v;
        if (long_time) v.push_back("long_time");
        if (scale_separation) v.push_back("scale_separation");
        if (small_detuning) v.push_back("small_2p2a_detuning");
        return v;
    }
};

// Which of the paper's asymptotic conditions hold at time t.
inline RegimeFlags regime_flags(const SourceParams& s, const AtomPair& a,
                                const Detunings& d, double t,
                                const RegimeThresholds& th = {}) {
    (void)a;
    RegimeFlags f;
    f.long_time = t * s.min_width() >= th.long_time;
    f.scale_separation = d.Delta / s.max_width() >= th.scale_separation;
    f.small_detuning = std::abs(d.delta) <= s.width_alpha;
    return f;
}

// ---------------------------------------------------------------------------

struct GridBudget {
    std::size_t max_points = 200000;        // per-axis mode count
    double resolve_factor = 5.0;            // spacing <= min(width)/resolve_factor
};

// Uniform mode comb of the quantization box.  The comb is anchored on the
// detecting-atom frequencies: omega1 lies exactly on a grid point and the
// spacing is snapped so that omega2 does too (T is honored to the nearest
// mode count).  At t = T the discrete kernel then collapses onto the atomic
// modes exactly, which is the finite-box analog of the delta-function limit.
class FrequencyGrid {
  public:
    FrequencyGrid() = default;
    FrequencyGrid(double anchor, std::ptrdiff_t anchor_index, double spacing,
                  std::size_t n)
        : anchor_(anchor), anchor_index_(anchor_index), spacing_(spacing), n_(n) {
        T_ = kTwoPi / spacing_;
    }

    double omega(std::size_t i) const {
        return anchor_ +
               (static_cast<double>(static_cast<std::ptrdiff_t>(i) - anchor_index_)) *
                   spacing_;
    }
    std::size_t size() const { return n_; }
    double spacing() const { return spacing_; }
    double mode_density_time() const { return T_; }  // T, with spacing*T = 2*pi
    double omega_min() const { return omega(0); }
    double omega_max() const { return omega(n_ - 1); }

    std::size_t nearest_index(double w) const {
        const double x = (w - omega_min()) / spacing_;
        const auto i = static_cast<std::ptrdiff_t>(std::llround(x));
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            i, 0, static_cast<std::ptrdiff_t>(n_) - 1));
    }
    bool contains(double w) const {
        return w >= omega_min() - 0.5 * spacing_ && w <= omega_max() + 0.5 * spacing_;
    }

    // Starting parity for an every-second-mode subsample that keeps the
    // anchor (omega1) on the subsampled comb; used for quadrature-convergence
    // estimates.
    std::size_t half_resolution_offset() const {
        return static_cast<std::size_t>(((anchor_index_ % 2) + 2) % 2);
    }

  private:
    double anchor_ = 0.0;
    std::ptrdiff_t anchor_index_ = 0;
    double spacing_ = 1.0;
    std::size_t n_ = 0;
    double T_ = kTwoPi;
};

// Build the mode comb for a scenario: spans both source central frequencies
// +- coverage*max(width) and both atomic frequencies, spacing 2*pi/T snapped
// so both atomic frequencies sit on the comb.
inline FrequencyGrid make_grid(const SourceParams& s, const AtomPair& a, double T,
                               double coverage = 40.0, const GridBudget& budget = {}) {
    s.validate();
    a.validate();
    if (!(T > 0.0)) throw GridError("make_grid: T must be > 0");
    if (coverage < 10.0) throw GridError("make_grid: coverage must be >= 10");

    const double dw_req = kTwoPi / T;
    if (dw_req > s.min_width() / budget.resolve_factor)
        throw GridError("make_grid: under-resolved lineshape: spacing " +
                        std::to_string(dw_req) + " exceeds min(width)/" +
                        std::to_string(budget.resolve_factor) + " = " +
                        std::to_string(s.min_width() / budget.resolve_factor) +
                        " (increase T)");

    // Snap the comb to both atomic frequencies.
    const double lo_atom = std::min(a.omega1, a.omega2);
    const double hi_atom = std::max(a.omega1, a.omega2);
    const auto k = std::max<std::int64_t>(1, std::llround((hi_atom - lo_atom) / dw_req));
    const double dw = (hi_atom - lo_atom) / static_cast<double>(k);

    const double margin = coverage * s.max_width();
    double lo = std::min(s.omega_alpha, s.omega_beta) - margin;
    double hi = std::max(s.omega_alpha, s.omega_beta) + margin;
    lo = std::min(lo, lo_atom - 0.25 * margin);
    hi = std::max(hi, hi_atom + 0.25 * margin);

    const auto below = static_cast<std::int64_t>(std::ceil((a.omega1 - lo) / dw));
    const auto above = static_cast<std::int64_t>(std::ceil((hi - a.omega1) / dw));
    const std::int64_t n = below + above + 1;
    if (n <= 1) throw GridError("make_grid: degenerate frequency window");
    if (static_cast<std::size_t>(n) > budget.max_points)
        throw BudgetError("make_grid: " + std::to_string(n) +
                          " modes exceed the per-axis budget of " +
                          std::to_string(budget.max_points));

    return FrequencyGrid(a.omega1, below, dw, static_cast<std::size_t>(n));
}

// Source-window comb used when a state is built without reference to a
// detecting-atom pair (spacing is exactly 2*pi/T, no snapping).
inline FrequencyGrid source_window_grid(const SourceParams& s, double T,
                                        double coverage = 40.0,
                                        const GridBudget& budget = {}) {
    s.validate();
    if (!(T > 0.0)) throw GridError("source_window_grid: T must be > 0");
    if (coverage < 10.0) throw GridError("source_window_grid: coverage must be >= 10");
    const double dw = kTwoPi / T;
    if (dw > s.min_width() / budget.resolve_factor)
        throw GridError("source_window_grid: under-resolved lineshape");
    const double margin = coverage * s.max_width();
    const double lo = std::min(s.omega_alpha, s.omega_beta) - margin;
    const double hi = std::max(s.omega_alpha, s.omega_beta) + margin;
    const auto n = static_cast<std::int64_t>(std::ceil((hi - lo) / dw)) + 1;
    if (static_cast<std::size_t>(n) > budget.max_points)
        throw BudgetError("source_window_grid: mode budget exceeded");
    return FrequencyGrid(lo, 0, dw, static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------------------

enum class Method { closed_form, quadrature, delta_limit };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::closed_form: return "closed_form";
        case Method::quadrature: return "quadrature";
        case Method::delta_limit: return "delta_limit";
    }
    return "?";
}

struct ProbabilityResult {
    double value = 0.0;
    Method method = Method::closed_form;
    double time = 0.0;
    std::vector<std::string> regime_flags;
    std::optional<double> error_estimate;  // present iff method == quadrature

    void check_invariants() const {
        if (value < 0.0) throw StateError("ProbabilityResult: negative probability");
        if ((method == Method::quadrature) != error_estimate.has_value())
            throw StateError("ProbabilityResult: error_estimate iff quadrature");
    }
};

}  // namespace tp2a
