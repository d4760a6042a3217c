#include <doctest.h>

#include <complex>

#include "oracle.hpp"
#include "tp2a/states.hpp"

using namespace tp2a;

namespace {

SourceParams fig_source(double t0 = 0.0) {
    SourceParams s;
    s.omega_alpha = 1.5;
    s.omega_beta = 3.5;
    s.width_alpha = 0.05;
    s.width_beta = 0.5;
    s.t0 = t0;
    return s;
}

FrequencyGrid fig_grid(double coverage = 40.0) {
    return source_window_grid(fig_source(), kTwoPi / 0.01, coverage);
}

}  // namespace

// ---------------------------------------------------------------------------
// uncorrelated wavepackets

TEST_CASE("uncorrelated: peak amplitude against the analytic prefactor") {
    const SourceParams s = fig_source();
    // 2/(T sqrt(ga gb)); numeric normalization converges to it as the window
    // widens (Lorentzian tails go as 2/(pi W) per axis)
    auto peak = [&](double coverage) {
        const FrequencyGrid g = fig_grid(coverage);
        const BiphotonState st = BiphotonState::uncorrelated(s, g);
        const double analytic =
            2.0 / (g.mode_density_time() * std::sqrt(s.width_alpha * s.width_beta));
        return std::abs(st.amplitude(s.omega_alpha, s.omega_beta)) / analytic;
    };
    CHECK(peak(40.0) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(peak(400.0) == doctest::Approx(1.0).epsilon(0.002));
}

TEST_CASE("uncorrelated: marginal is a Lorentzian of width gamma_alpha") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState st = BiphotonState::uncorrelated(s, g);
    const double m0 = st.marginal_k(s.omega_alpha);
    // half value one HWHM away, quarter value two HWHMs away
    CHECK(st.marginal_k(s.omega_alpha + s.width_alpha) / m0 ==
          doctest::Approx(0.5).epsilon(1e-6));
    CHECK(st.marginal_k(s.omega_alpha + 2.0 * s.width_alpha) / m0 ==
          doctest::Approx(0.2).epsilon(1e-6));
    CHECK(st.marginal_q(s.omega_beta + s.width_beta) / st.marginal_q(s.omega_beta) ==
          doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("normalization integral equals one and is checked by an independent oracle") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState st = BiphotonState::uncorrelated(s, g);
    CHECK(st.norm_integral_on(g) == doctest::Approx(1.0).epsilon(1e-9));

    // independent adaptive quadrature of |c|^2 over the same window
    const double T = g.mode_density_time();
    const double mode_density = T / kTwoPi;
    auto c2 = [&](double wk, double wq) { return std::norm(st.amplitude(wk, wq)); };
    const double integral = mode_density * mode_density *
                            oracle::integrate2d(c2, g.omega_min(), g.omega_max(),
                                                g.omega_min(), g.omega_max(), 1e-9);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("normalization is stable under 2x grid refinement") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid(200.0);
    const BiphotonState st = BiphotonState::uncorrelated(s, g);
    const auto n2 = 2 * g.size() - 1;
    const FrequencyGrid fine(g.omega_min(), 0, 0.5 * g.spacing(), n2);
    CHECK(std::abs(st.norm_integral_on(fine) - 1.0) < 1e-6);
}

// ---------------------------------------------------------------------------
// cascade

TEST_CASE("cascade: anti-correlated ridge and conditional width") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState st = BiphotonState::cascade(s, g);
    const double sum = s.omega_alpha + s.omega_beta;

    // |c|^2 is maximal on wk + wq = sum with anti-diagonal Lorentzian width ga;
    // move wk at fixed wq so only the sum coordinate varies
    auto ridge = [&](double u) {
        return std::norm(st.amplitude(sum - s.omega_beta + u, s.omega_beta));
    };
    CHECK(ridge(s.width_alpha) / ridge(0.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(ridge(2.0 * s.width_alpha) / ridge(0.0) == doctest::Approx(0.2).epsilon(1e-9));

    // conditional width in wq at fixed sum is gb
    auto cond = [&](double v) {
        return std::norm(st.amplitude(sum - (s.omega_beta + v), s.omega_beta + v));
    };
    CHECK(cond(s.width_beta) / cond(0.0) == doctest::Approx(0.5).epsilon(1e-9));

    CHECK(st.norm_integral_on(g) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cascade: numeric prefactor approaches 2 sqrt(ga gb)/T") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid(400.0);
    const BiphotonState st = BiphotonState::cascade(s, g);
    const double analytic = shapes::uncorrelated_prefactor(s, g.mode_density_time());
    CHECK(st.norm_const() / analytic == doctest::Approx(1.0).epsilon(0.002));
}

TEST_CASE("cascade: time ordering leaves all wq poles in one half plane") {
    // the inverse Fourier transform over wq vanishes for negative delay
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState st = BiphotonState::cascade(s, g);
    auto ft_tau = [&](double tau) {
        cplx acc{};
        for (std::size_t j = 0; j < g.size(); ++j)
            acc += st.amplitude(s.omega_alpha, g.omega(j)) *
                   std::polar(1.0, -g.omega(j) * tau);
        return std::abs(acc);
    };
    const double forward = ft_tau(1.0 / s.width_beta);
    CHECK(ft_tau(-1.0) < 5e-3 * forward);
    CHECK(ft_tau(-5.0) < 5e-3 * forward);
}

// ---------------------------------------------------------------------------
// spdc

TEST_CASE("spdc: numeric normalization matches the closed N relation") {
    const SourceParams s = fig_source(30.0);
    const FrequencyGrid g = fig_grid();
    const BiphotonState st = BiphotonState::spdc(s, g);
    const double closed = shapes::spdc_prefactor(s, g.mode_density_time());
    CHECK(st.norm_const() / closed == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("spdc: two anti-diagonal bright spots") {
    const SourceParams s = fig_source(30.0);
    const FrequencyGrid g = fig_grid();
    const BiphotonState st = BiphotonState::spdc(s, g);
    const double bright1 = std::norm(st.amplitude(s.omega_alpha, s.omega_beta));
    const double bright2 = std::norm(st.amplitude(s.omega_beta, s.omega_alpha));
    const double dark = std::norm(st.amplitude(s.omega_alpha, s.omega_alpha));
    CHECK(bright1 == doctest::Approx(bright2).epsilon(1e-9));
    CHECK(dark < 1e-6 * bright1);
}

TEST_CASE("spdc: |c|^2 symmetric under (wk <-> wq) at phase pi/2") {
    SourceParams s = fig_source(30.0);
    s.width_beta = s.width_alpha;  // sigma_beta -> sigma_alpha
    const FrequencyGrid g = source_window_grid(s, kTwoPi / 0.01, 40.0);
    const BiphotonState st = BiphotonState::spdc(s, g);
    for (double dk : {-0.04, 0.01, 0.07})
        for (double dq : {-0.03, 0.02, 0.05}) {
            const double a = std::norm(st.amplitude(1.5 + dk, 3.5 + dq));
            const double b = std::norm(st.amplitude(1.5 + dq, 3.5 + dk));
            // swap within the same bright spot maps component 1 onto 2
            const double c = std::norm(st.amplitude(3.5 + dq, 1.5 + dk));
            CHECK(a == doctest::Approx(c).epsilon(1e-9));
            (void)b;
        }
}

TEST_CASE("spdc: factorized marginal carries the zeta width rescaling") {
    const SourceParams s = fig_source(30.0);
    const FrequencyGrid g = fig_grid();
    const BiphotonState f = factorize(BiphotonState::spdc(s, g));
    // zeta = 1 + sb^2/(sa^2+sb^2) = 1.990099...; the marginal near each peak
    // is exp(-zeta x^2 / sb^2)
    const double zeta_expected = 1.0 + 0.25 / 0.2525;
    const double x = 0.1;
    const double ratio = f.marginal_k(s.omega_alpha) / f.marginal_k(s.omega_alpha + x);
    const double zeta_est =
        s.width_beta * s.width_beta * std::log(ratio) / (x * x);
    CHECK(zeta_est == doctest::Approx(zeta_expected).epsilon(1e-3));
    CHECK(zeta_expected == doctest::Approx(1.990099).epsilon(1e-6));
}

// ---------------------------------------------------------------------------
// transforms

TEST_CASE("disentangle: weights equal |c|^2 and match the double-Lorentzian form") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState pure = BiphotonState::cascade(s, g);
    const BiphotonState rho1 = disentangle(pure);

    double ratio_min = 1e300, ratio_max = 0.0;
    for (double wk : {1.2, 1.5, 1.9})
        for (double wq : {3.1, 3.5, 4.0}) {
            CHECK(rho1.weight(wk, wq) ==
                  doctest::Approx(std::norm(pure.amplitude(wk, wq))).epsilon(1e-12));
            // shape of the correlated-separable cascade state: ratio to the
            // double Lorentzian is a constant (the squared prefactor)
            const double u = wk + wq - s.omega_alpha - s.omega_beta;
            const double v = wq - s.omega_beta;
            const double lor = 1.0 / ((u * u + s.width_alpha * s.width_alpha) *
                                      (v * v + s.width_beta * s.width_beta));
            const double r = rho1.weight(wk, wq) / lor;
            ratio_min = std::min(ratio_min, r);
            ratio_max = std::max(ratio_max, r);
        }
    CHECK(ratio_max / ratio_min == doctest::Approx(1.0).epsilon(1e-12));
    // and the constant is the (2 sqrt(ga gb)/T)^2 prefactor up to window tails
    const double pref2 = std::pow(
        shapes::uncorrelated_prefactor(s, g.mode_density_time()), 2);
    CHECK(ratio_max == doctest::Approx(pref2).epsilon(0.04));

    CHECK(rho1.norm_integral_on(g) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(disentangle(rho1), StateError);
}

TEST_CASE("factorize: marginals are the row/column sums; cascade widths add") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState pure = BiphotonState::cascade(s, g);
    const BiphotonState rho2 = factorize(pure);

    // product structure is exact
    for (double wk : {1.3, 1.6})
        for (double wq : {3.2, 3.9})
            CHECK(rho2.weight(wk, wq) ==
                  doctest::Approx(rho2.marginal_k(wk) * rho2.marginal_q(wq))
                      .epsilon(1e-12));

    // first marginal: Lorentzian of width ga+gb centered on omega_alpha
    const double w = s.width_alpha + s.width_beta;
    CHECK(rho2.marginal_k(s.omega_alpha + w) / rho2.marginal_k(s.omega_alpha) ==
          doctest::Approx(0.5).epsilon(2e-3));
    // second marginal: width gb around omega_beta
    CHECK(rho2.marginal_q(s.omega_beta + s.width_beta) /
              rho2.marginal_q(s.omega_beta) ==
          doctest::Approx(0.5).epsilon(2e-3));

    CHECK(rho2.norm_integral_on(g) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(factorize(rho2), StateError);
}

TEST_CASE("spectrum preservation across the transform family") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState pure = BiphotonState::cascade(s, g);
    const BiphotonState rho1 = disentangle(pure);
    const BiphotonState rho2 = factorize(pure);
    for (std::size_t i : {std::size_t(100), std::size_t(2000), std::size_t(4100)}) {
        const double w = g.omega(i);
        const double m = pure.marginal_k(w);
        CHECK(std::abs(rho1.marginal_k(w) - m) <= 1e-10 * m + 1e-300);
        CHECK(std::abs(rho2.marginal_k(w) - m) <= 1e-10 * m + 1e-300);
        const double mq = pure.marginal_q(w);
        CHECK(std::abs(rho1.marginal_q(w) - mq) <= 1e-10 * mq + 1e-300);
        CHECK(std::abs(rho2.marginal_q(w) - mq) <= 1e-10 * mq + 1e-300);
    }
}

TEST_CASE("mixed weights are real and nonnegative everywhere") {
    const SourceParams s = fig_source(30.0);
    const FrequencyGrid g = fig_grid();
    for (const BiphotonState& st :
         {disentangle(BiphotonState::spdc(s, g)), factorize(BiphotonState::spdc(s, g))}) {
        for (std::size_t i = 0; i < g.size(); i += 97)
            for (std::size_t j = 0; j < g.size(); j += 131)
                CHECK(st.weight_at(i, j) >= 0.0);
    }
}

TEST_CASE("coherent lift wraps a pure state and records alpha") {
    const SourceParams s = fig_source();
    const FrequencyGrid g = fig_grid();
    const BiphotonState base = BiphotonState::uncorrelated(s, g);
    const BiphotonState lift = coherent_lift(base, cplx(1.0, 1.0));
    CHECK(lift.kind() == StateKind::coherent_lift);
    CHECK(lift.alpha() == cplx(1.0, 1.0));
    CHECK(lift.base().kind() == StateKind::uncorrelated_pure);
    CHECK_THROWS_AS(coherent_lift(disentangle(base), 1.0), StateError);
}

TEST_CASE("construction refusals") {
    const SourceParams s = fig_source();
    // grid that under-resolves width_alpha
    const FrequencyGrid coarse(0.0, 0, 0.02, 500);
    CHECK_THROWS_AS(BiphotonState::uncorrelated(s, coarse), GridError);
    // zero-norm custom amplitude
    const FrequencyGrid g = fig_grid();
    CHECK_THROWS_AS(BiphotonState::custom_pure(
                        [](double, double) { return cplx{}; }, s, g, "zero"),
                    StateError);
}
