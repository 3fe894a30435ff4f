#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "frisk/fourier.hpp"
#include "frisk/models.hpp"
#include "support/oracles.hpp"

using namespace frisk;

namespace {

const TldParams dax_tld{0.0464, 1.77, 10.74, -0.38};
const HestonParams dax_heston{0.0471, 86.0, 4.67, -0.17, 0.1102};

} // namespace

TEST(Fourier, GaussianMatchesClosedForm) {
    GaussianModel g(0.0464, 0.1102);
    for (double t : {3.98e-3, 3.98e-2}) {
        const RiskCurve curve = var_es_curve(g, t, 1.0);
        for (double p : {0.01, 0.05}) {
            const RiskPoint rp = risk_from_curve(curve, p);
            const oracles::GaussRisk ref = oracles::gaussian_risk(0.0464, 0.1102, t, p);
            EXPECT_NEAR(rp.lstar, ref.lstar, 1e-8) << "t=" << t << " p=" << p;
            EXPECT_NEAR(rp.lambda_star, ref.lambda_star, 1e-8);
            EXPECT_NEAR(rp.estar, ref.estar, 1e-8);
        }
    }
}

TEST(Fourier, QuadratureMatchesClosedForm) {
    GaussianModel g(0.0464, 0.1102);
    const double t = 3.98e-3;
    const RiskPoint rp = risk_quadrature(g, t, 1.0, 0.01);
    const oracles::GaussRisk ref = oracles::gaussian_risk(0.0464, 0.1102, t, 0.01);
    EXPECT_NEAR(rp.lstar, ref.lstar, 1e-8);
    EXPECT_NEAR(rp.estar, ref.estar, 1e-8);
}

TEST(Fourier, CrossMethodAgreement) {
    // FFT interpolation and direct quadrature agree on all models
    GaussianModel g(0.0464, 0.1102);
    TldModel tld(dax_tld, 0.1102);
    HestonModel hes(dax_heston);
    for (const EcfModel* m : std::vector<const EcfModel*>{&g, &tld, &hes}) {
        const double t = 3.98e-3;
        const double nu = nu_default(*m, t);
        const RiskCurve curve = var_es_curve(*m, t, nu);
        for (double p : {0.01, 0.05}) {
            const RiskPoint a = risk_from_curve(curve, p);
            const RiskPoint b = risk_quadrature(*m, t, nu, p);
            EXPECT_NEAR(a.lambda_star, b.lambda_star, 1e-6) << m->name() << " p=" << p;
            EXPECT_NEAR(a.estar, b.estar, 1e-6) << m->name() << " p=" << p;
        }
    }
}

TEST(Fourier, ContourInvariance) {
    // results independent of the damping contour nu
    TldModel tld(dax_tld, 0.1102);
    HestonModel hes(dax_heston);
    for (const EcfModel* m : std::vector<const EcfModel*>{&tld, &hes}) {
        const double t = 3.98e-3;
        RiskPoint base{};
        bool first = true;
        for (double nu : {0.5, 1.0, 1.5}) {
            const RiskPoint rp = risk_from_curve(var_es_curve(*m, t, nu), 0.01);
            if (first) { base = rp; first = false; continue; }
            EXPECT_NEAR(rp.lambda_star, base.lambda_star, 1e-6) << m->name() << " nu=" << nu;
            EXPECT_NEAR(rp.estar, base.estar, 1e-6) << m->name() << " nu=" << nu;
        }
    }
}

TEST(Fourier, GridDoublingStability) {
    HestonModel hes(dax_heston);
    TldModel tld(dax_tld, 0.1102);
    for (const EcfModel* m : std::vector<const EcfModel*>{&hes, &tld}) {
        for (double t : {3.98e-3, 3.98e-2}) {
            FourierGrid g1;
            g1.n_points = 1u << 18;
            FourierGrid g2;
            g2.n_points = 1u << 19;
            const RiskPoint a = risk_from_curve(var_es_curve(*m, t, 1.0, g1), 0.01);
            const RiskPoint b = risk_from_curve(var_es_curve(*m, t, 1.0, g2), 0.01);
            EXPECT_NEAR(a.lambda_star, b.lambda_star, 1e-7) << m->name() << " t=" << t;
            EXPECT_NEAR(a.estar, b.estar, 1e-7) << m->name() << " t=" << t;
        }
    }
}

TEST(Fourier, CurveShapeInvariants) {
    HestonModel hes(dax_heston);
    const double t = 3.98e-3;
    const RiskCurve c = var_es_curve(hes, t, 1.0);
    ASSERT_GE(c.pstar.size(), 100u);
    const double growth = std::exp(c.mu * c.t);
    for (std::size_t i = 0; i < c.pstar.size(); ++i) {
        EXPECT_GT(c.pstar[i], 0.0);
        EXPECT_LE(c.pstar[i], 0.5 + 1e-12);
        if (i > 0) {
            EXPECT_LT(c.pstar[i], c.pstar[i - 1]); // P* strictly decreasing in L
            EXPECT_GT(c.lstar[i], c.lstar[i - 1]);
        }
        // Lambda* is the stated deterministic function of L*
        EXPECT_NEAR(c.lambda_star[i], 1.0 - growth * std::exp(-c.lstar[i]), 1e-14);
        // expected shortfall dominates VaR
        EXPECT_GE(c.estar[i], c.lambda_star[i] - 1e-12);
    }
    // trimmed window spans at least [1e-4, 0.1]
    EXPECT_LE(c.pstar.back(), 1e-4 * 1.05);
    EXPECT_GE(c.pstar.front(), 0.1);
}

TEST(Fourier, EsDominatesVarAtPoints) {
    TldModel tld(dax_tld, 0.1102);
    for (double t : {3.98e-3, 3.98e-2}) {
        const RiskCurve c = var_es_curve(tld, t, 1.0);
        for (double p : {0.001, 0.01, 0.05, 0.1}) {
            const RiskPoint rp = risk_from_curve(c, p);
            EXPECT_GT(rp.estar, rp.lambda_star) << "t=" << t << " p=" << p;
        }
    }
}

TEST(Fourier, VarMonotoneInSignificance) {
    HestonModel hes(dax_heston);
    const RiskCurve c = var_es_curve(hes, 3.98e-3, 1.0);
    double prev = 1e9;
    for (double p : {0.001, 0.005, 0.01, 0.05, 0.1}) {
        const double v = risk_from_curve(c, p).lambda_star;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Fourier, HorizonMonotonicity) {
    HestonModel hes(dax_heston);
    double prev = 0.0;
    for (int j : {1, 2, 5, 10}) {
        const double t = j * 3.98e-3;
        const double v = risk_from_curve(var_es_curve(hes, t, 1.0), 0.01).lambda_star;
        EXPECT_GT(v, prev) << "j=" << j;
        prev = v;
    }
}

TEST(Fourier, InputValidation) {
    GaussianModel g(0.04, 0.0);
    EXPECT_THROW(var_es_curve(g, 0.01, -1.0), std::invalid_argument);
    FourierGrid bad;
    bad.n_points = 1000; // not a power of two
    EXPECT_THROW(var_es_curve(g, 0.01, 1.0, bad), std::invalid_argument);
    const RiskCurve c = var_es_curve(g, 0.01, 1.0);
    EXPECT_THROW(risk_from_curve(c, 0.99), std::invalid_argument);
    EXPECT_THROW(risk_from_curve(c, 1e-9), std::invalid_argument);
    EXPECT_THROW(risk_quadrature(g, 0.01, 1.0, 0.0), std::invalid_argument);
    TldModel narrow({0.05, 1.5, 0.8, 0.0}, 0.0);
    EXPECT_THROW(var_es_curve(narrow, 0.01, 1.0), std::invalid_argument); // nu outside strip
}

TEST(Fourier, SinglePointIntegralMatchesGaussianQuantile) {
    // P*(L) from i_nu at the closed-form quantile equals the requested pstar
    GaussianModel g(0.0464, 0.0);
    const double t = 3.98e-3;
    for (double p : {0.01, 0.05}) {
        const oracles::GaussRisk ref = oracles::gaussian_risk(0.0464, 0.0, t, p);
        const double pi = 3.141592653589793238462643383280;
        const double val = i_nu(g, t, 1.0, 1.0, ref.lstar) / pi;
        EXPECT_NEAR(val, p, 1e-9);
    }
}

TEST(Fourier, RiskAtDispatch) {
    GaussianModel g(0.0464, 0.0);
    const RiskPoint a = risk_at(g, 3.98e-3, 1.0, 0.01, RiskMode::fft);
    const RiskPoint b = risk_at(g, 3.98e-3, 1.0, 0.01, RiskMode::quadrature);
    EXPECT_EQ(a.method, RiskMode::fft);
    EXPECT_EQ(b.method, RiskMode::quadrature);
    EXPECT_NEAR(a.lambda_star, b.lambda_star, 1e-7);
}
