#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "repqec/analysis.hpp"
#include "repqec/errors.hpp"

using namespace repqec;

namespace {

std::vector<PlPoint> synthetic_ansatz(double a, double b, double nu, double p_th,
                                      double noise_scale, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<PlPoint> data;
    for (int n : {5, 7, 9, 11, 13}) {
        for (int i = 0; i < 7; ++i) {
            double p = p_th * (0.85 + 0.3 * i / 6.0);
            double pl = a + b * (p - p_th) * std::pow(n, 1.0 / nu);
            double sigma = 3e-3;
            data.push_back({p, n, pl + noise_scale * sigma * gauss(rng), sigma});
        }
    }
    return data;
}

}  // namespace

TEST_CASE("fit recovers exact-ansatz parameters") {
    auto data = synthetic_ansatz(0.2, 1.0, 1.5, 0.10, 0.0, 4);
    ThresholdFit fit = fit_threshold(data, 0);
    CHECK(fit.p_th == doctest::Approx(0.10).epsilon(1e-6));
    CHECK(fit.a == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(fit.b == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(fit.nu == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(fit.residual < 1e-10);
}

TEST_CASE("fit recovers parameters under noise") {
    auto data = synthetic_ansatz(0.2, 1.0, 1.5, 0.10, 1.0, 99);
    ThresholdFit fit = fit_threshold(data, 100, 7);
    CHECK(std::abs(fit.p_th - 0.10) < 1e-3);
    CHECK(fit.p_th_err > 0.0);
    CHECK(fit.p_th_err < 5e-3);
    CHECK(fit.residual < 3.0);
}

TEST_CASE("fit is invariant under row order and stderr rescaling") {
    auto data = synthetic_ansatz(0.15, 0.8, 1.3, 0.08, 1.0, 21);
    ThresholdFit base = fit_threshold(data, 0);

    std::vector<PlPoint> reversed(data.rbegin(), data.rend());
    ThresholdFit rev = fit_threshold(reversed, 0);
    CHECK(base.p_th == doctest::Approx(rev.p_th).epsilon(1e-10));

    std::vector<PlPoint> scaled = data;
    for (auto& d : scaled) d.stderr_ *= 7.5;
    ThresholdFit sc = fit_threshold(scaled, 0);
    CHECK(base.p_th == doctest::Approx(sc.p_th).epsilon(1e-10));
}

TEST_CASE("fit diverges when no crossing lies in range") {
    // p_th far outside the sampled p interval
    std::vector<PlPoint> data;
    for (int n : {5, 9, 13})
        for (int i = 0; i < 7; ++i) {
            double p = 0.01 + 0.005 * i;
            double pl = 0.2 + 1.0 * (p - 0.5) * std::pow(n, 1.0 / 1.5);
            data.push_back({p, n, pl, 1e-3});
        }
    CHECK_THROWS_AS(fit_threshold(data, 0), FitDiverged);
}

TEST_CASE("windowed fit narrows to the crossing region") {
    auto data = synthetic_ansatz(0.2, 1.0, 1.5, 0.10, 1.0, 5);
    // contaminate far-away rows so the window matters
    for (auto& d : data)
        if (std::abs(d.p - 0.10) > 0.012) d.p_l += 0.01 * (d.p - 0.10) / 0.01;
    ThresholdFit fit = fit_threshold_windowed(data, 0.12, 0);
    CHECK(std::abs(fit.p_th - 0.10) < 2e-3);
}

TEST_CASE("decay_rate") {
    CHECK(decay_rate(0.3, 0.3) == doctest::Approx(1.0));
    CHECK_THROWS_AS(decay_rate(0.0, 0.1), std::invalid_argument);
    // exact-ansatz inputs give exactly p / p_th
    double p = 0.05, p_th = 0.1;
    auto pl = [&](int d) { return 0.37 * std::pow(p / p_th, d / 2.0); };
    CHECK(decay_rate(pl(5), pl(7)) == doctest::Approx(p / p_th).epsilon(1e-12));
}

TEST_CASE("ansatz_threshold") {
    CHECK(ansatz_threshold(0.1034, 0.0) == doctest::Approx(0.1034));
    CHECK(ansatz_threshold(0.03243, 1.0) == doctest::Approx(0.011446).epsilon(1e-3));
    CHECK(ansatz_threshold(0.2, 0.5) == doctest::Approx(0.2 / (1.0 + 11.0 / 24.0)).epsilon(1e-12));
    CHECK_THROWS_AS(ansatz_threshold(0.9, 0.0), std::invalid_argument);
}

TEST_CASE("estimate_peff basics") {
    CircuitConfig cfg = CircuitConfig::make(CircuitModel::CircuitBased, 3, 3,
                                            NoiseModel::make(0.0, 0.0));
    PeffEstimate zero = estimate_peff(cfg, 0, 1, 200, 3);
    CHECK(zero.p_eff == 0.0);

    CircuitConfig phen = CircuitConfig::make(CircuitModel::Phenomenological, 3, 3,
                                             NoiseModel::make(0.01, 0.0));
    CHECK_THROWS_AS(estimate_peff(phen, 0, 1, 10, 3), std::invalid_argument);
    CHECK_THROWS_AS(estimate_peff(cfg, 0, 0, 10, 3), std::invalid_argument);

    // coarse slope sanity: p_eff ~ (8/3) p at c = 0 for small p
    CircuitConfig cb = CircuitConfig::make(CircuitModel::CircuitBased, 3, 3,
                                           NoiseModel::make(0.004, 0.0));
    PeffEstimate est = estimate_peff(cb, 0, 1, 60000, 11);
    double expected = 8.0 / 3.0 * 0.004;
    CHECK(std::abs(est.p_eff - expected) < std::max(4 * est.stderr_, 0.25 * expected));
}

TEST_CASE("estimate_peff is nondecreasing in coherence") {
    const double p = 0.01;
    double prev = -1.0, prev_err = 0.0;
    for (double c : {0.0, 0.5, 1.0}) {
        CircuitConfig cfg = CircuitConfig::make(CircuitModel::CircuitBased, 3, 3,
                                                NoiseModel::make(p, c));
        PeffEstimate est = estimate_peff(cfg, 0, 1, 40000, 17);
        if (prev >= 0.0)
            CHECK(est.p_eff + 3 * (est.stderr_ + prev_err) >= prev);
        prev = est.p_eff;
        prev_err = est.stderr_;
    }
}
