#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "frisk/calibration.hpp"
#include "frisk/models.hpp"
#include "frisk/rng.hpp"
#include "frisk/timeseries.hpp"
#include "support/oracles.hpp"

using namespace frisk;

namespace {

ReturnSeries gaussian_series(double sigma2, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    ReturnSeries r;
    r.kind = ReturnKind::centered_log;
    r.dt = default_dt;
    const double s = std::sqrt(sigma2 * default_dt);
    r.values.resize(n);
    for (auto& v : r.values) v = s * rng.normal() - 0.5 * sigma2 * default_dt;
    return r;
}

ReturnSeries tld_series(const TldParams& p, std::size_t n, std::uint64_t seed) {
    TldModel model(p, 0.0);
    oracles::CurveSampler sampler(model, default_dt, nu_default(model, default_dt));
    Rng rng(seed);
    ReturnSeries r;
    r.kind = ReturnKind::centered_log;
    r.dt = default_dt;
    r.values.resize(n);
    for (auto& v : r.values) v = sampler.draw(rng);
    return r;
}

} // namespace

TEST(Calibration, GammaIsTwoForGaussianReturns) {
    const ReturnSeries r = gaussian_series(0.05, 120000, 7);
    const GammaFit gf = fit_gamma(r);
    // Gaussian scaling: p(0) ~ t^{-1/2}, so the estimator must sit at (or be
    // clamped to) the diffusive value gamma = 2
    EXPECT_NEAR(gf.gamma, 2.0, std::max(3.0 * gf.gamma_err, 0.05));
}

TEST(Calibration, GammaRecoveredFromLevyDraws) {
    const TldParams truth{0.05, 1.5, 10.0, 0.0};
    const ReturnSeries r = tld_series(truth, 150000, 11);
    const GammaFit gf = fit_gamma(r);
    // the zero-return density of a truncated flight scales as t^{-1/gamma}
    // only below the crossover time; with lambda = 10 the short horizons
    // dominate the weighted fit
    EXPECT_NEAR(gf.gamma, truth.gamma, 0.25);
}

TEST(Calibration, TldRoundTrip) {
    const TldParams truth{0.05, 1.5, 10.0, -0.4};
    const ReturnSeries r = tld_series(truth, 200000, 13);
    const TldFit fit = fit_tld(r);
    EXPECT_NEAR(fit.params.sigma2, truth.sigma2,
                std::max(4.0 * fit.errors.sigma2, 0.02 * truth.sigma2));
    EXPECT_NEAR(fit.params.gamma, truth.gamma, 0.25);
    EXPECT_NEAR(fit.params.lambda, truth.lambda, 0.30 * truth.lambda);
    EXPECT_LT(fit.params.beta, 0.0); // skew direction must be recovered
    EXPECT_NEAR(fit.params.beta, truth.beta, 0.35 * std::abs(truth.beta) + 0.05);
    ASSERT_EQ(fit.scalings.size(), 4u);
    for (const auto& sc : fit.scalings) {
        EXPECT_EQ(sc.t.size(), 10u);
        EXPECT_EQ(sc.t.size(), sc.y.size());
        EXPECT_EQ(sc.t.size(), sc.e.size());
    }
}

TEST(Calibration, TldSymmetricDataGivesSmallBeta) {
    const TldParams truth{0.05, 1.5, 10.0, 0.0};
    const ReturnSeries r = tld_series(truth, 150000, 17);
    const TldFit fit = fit_tld(r);
    EXPECT_NEAR(fit.params.beta, 0.0, 0.15);
}

TEST(Calibration, HestonObjectiveVanishesAtTruth) {
    const HestonParams truth{0.04, 10.0, 1.0, -0.5, 0.0};
    const HestonModel model(truth);
    std::vector<CumulantEstimates> cums;
    for (int j = 1; j <= 10; ++j) {
        const CumulantSet c = model.cumulants(j * default_dt);
        CumulantEstimates e;
        e.j = j;
        e.k[0] = c.k1; e.k[1] = c.k2; e.k[2] = c.k3; e.k[3] = c.k4;
        for (double& x : e.eps) x = 1e-9;
        cums.push_back(e);
    }
    EXPECT_NEAR(heston_objective(truth, cums, default_dt), 0.0, 1e-10);
    HestonParams off = truth;
    off.alpha = 12.0;
    EXPECT_GT(heston_objective(off, cums, default_dt), 1.0);
}

TEST(Calibration, HestonRoundTrip) {
    // fast mean reversion (variance decorrelates within ~1 day) keeps the
    // fixed-initial-variance cumulant formulas close to the stationary
    // statistics a long simulated path actually delivers; at desk-scale
    // sample sizes the residual short-horizon kurtosis gap stays well
    // inside the fitted uncertainties
    const HestonParams truth{0.0388, 287.0, 8.82, -0.12, 0.0};
    const std::vector<double> daily =
        oracles::heston_euler_series(truth, default_dt, 16, 5000, 3);
    ReturnSeries r;
    r.kind = ReturnKind::centered_log;
    r.dt = default_dt;
    r.values = daily;
    const HestonFit fit = fit_heston(r);
    EXPECT_NEAR(fit.params.sigma2, truth.sigma2, 3.0 * fit.errors.sigma2);
    EXPECT_NEAR(fit.params.rho, truth.rho, 3.0 * fit.errors.rho);
    EXPECT_NEAR(fit.params.alpha, truth.alpha, 3.0 * fit.errors.alpha);
    EXPECT_NEAR(fit.params.k, truth.k, 3.0 * fit.errors.k);
    EXPECT_EQ(fit.starts.size(), 8u);
    EXPECT_EQ(fit.residuals.size(), 30u); // 10 horizons x cumulants 2..4
    double obj = 0.0;
    for (double rres : fit.residuals) obj += rres * rres;
    EXPECT_NEAR(obj, fit.objective, 1e-9 * std::max(1.0, fit.objective));
}

TEST(Calibration, HestonMultiStartConsistency) {
    // with clean synthetic data the best objective must beat every recorded
    // start's own record (it is their minimum)
    const HestonParams truth{0.0471, 86.0, 4.67, -0.17, 0.0};
    const std::vector<double> daily =
        oracles::heston_euler_series(truth, default_dt, 16, 60000, 23);
    ReturnSeries r;
    r.kind = ReturnKind::centered_log;
    r.dt = default_dt;
    r.values = daily;
    const HestonFit fit = fit_heston(r);
    for (const auto& s : fit.starts)
        EXPECT_LE(fit.objective, s.objective + 1e-6 * std::abs(s.objective));
}

TEST(Calibration, InputValidation) {
    // too short for 30 points at j_max = 10
    ReturnSeries shorty = gaussian_series(0.05, 200, 3);
    EXPECT_THROW(fit_tld(shorty), std::invalid_argument);
    EXPECT_THROW(fit_heston(shorty), std::invalid_argument);
    // degenerate series
    ReturnSeries flat;
    flat.kind = ReturnKind::centered_log;
    flat.values.assign(5000, 0.0);
    EXPECT_THROW(fit_tld(flat), std::exception);
}
