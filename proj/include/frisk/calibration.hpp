#pragma once

// Model calibration from the time scaling of empirical cumulants:
// step-by-step scaling fits for the truncated Levy parameters, and
// cumulant-matching minimization for Heston.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "models.hpp"
#include "numerics.hpp"
#include "optim.hpp"
#include "timeseries.hpp"

namespace frisk {

struct ScalingSeries {
    std::vector<double> t;  // horizons j*dt
    std::vector<double> y;  // observable
    std::vector<double> e;  // errors
    std::string transform;  // "log-log" or "linear"
    std::string label;
};

struct MultiStartEntry {
    std::vector<double> start;
    std::vector<double> solution;
    double objective;
    bool converged;
};

struct TldFit {
    TldParams params;
    TldParams errors; // per-parameter standard errors (same fields)
    double mu = 0.0;
    std::vector<ScalingSeries> scalings;
    std::vector<std::string> warnings;
};

struct HestonFit {
    HestonParams params;
    HestonParams errors;
    double objective = 0.0;
    std::vector<MultiStartEntry> starts;
    std::vector<double> residuals; // per-(horizon, cumulant) at the optimum
    std::vector<ScalingSeries> scalings;
    std::vector<std::string> warnings;
};

// ------------------------------------------------------------ gamma fit

struct GammaFit {
    double gamma;
    double gamma_err;
    ScalingSeries scaling;
    bool clamped = false;
};

// gamma from the log-log time scaling of the zero-return density:
// log p(0) vs log t has slope -1/gamma.
inline GammaFit fit_gamma(const ReturnSeries& returns, int j_max = 10) {
    std::vector<double> lx, ly, le;
    GammaFit out;
    out.scaling.transform = "log-log";
    out.scaling.label = "zero_return_density";
    for (int j = 1; j <= j_max; ++j) {
        const ReturnSeries agg = (j == 1) ? returns : aggregate(returns, j);
        const ZeroDensity z = zero_return_density(agg);
        lx.push_back(std::log(j * returns.dt));
        ly.push_back(std::log(z.value));
        le.push_back(z.std_error / z.value);
        out.scaling.t.push_back(j * returns.dt);
        out.scaling.y.push_back(z.value);
        out.scaling.e.push_back(z.std_error);
    }
    const LineFit fit = weighted_linear_fit(lx, ly, le);
    if (!(fit.slope < 0))
        throw std::runtime_error("fit_gamma: non-negative scaling slope, no Levy-like scaling");
    double gamma = -1.0 / fit.slope;
    // reduced-chi^2 scaling: the pure power law only holds below the
    // crossover time, so the statistical slope error alone understates the
    // uncertainty whenever the points show curvature beyond their error bars
    const double dof = std::max<std::size_t>(1, lx.size() - 2);
    const double scale = std::sqrt(std::max(1.0, fit.chi2 / dof));
    out.gamma_err = fit.slope_err * scale / (fit.slope * fit.slope);
    if (gamma > 2.0) { gamma = 2.0; out.clamped = true; }
    out.gamma = gamma;
    return out;
}

// -------------------------------------------------------------- TLD fit

// One-parameter-at-a-time scaling fits:
//   gamma  : zero-return density slope
//   Sigma2 : k2(t) = Sigma2 * t, through the origin
//   lambda : log kappa(t) vs log t, slope pinned to -1, intercept
//            = log[(2-gamma)(3-gamma)/(lambda^2 Sigma2)]
//   beta   : log|zeta(t)| vs log t, slope pinned to -1/2, intercept
//            = log[|beta|(2-gamma)/(lambda Sigma)], sign from median zeta
inline TldFit fit_tld(const ReturnSeries& returns, int j_max = 10) {
    const auto cums = empirical_cumulants(returns, j_max);
    TldFit out;
    out.mu = returns.mu;

    const GammaFit gf = fit_gamma(returns, j_max);
    out.params.gamma = gf.gamma;
    out.errors.gamma = gf.gamma_err;
    out.scalings.push_back(gf.scaling);
    if (gf.clamped) out.warnings.push_back("gamma clamped to 2 (Gaussian-like scaling)");

    // Sigma2: k2 vs t through the origin
    {
        std::vector<double> t, y, e;
        ScalingSeries sc{ {}, {}, {}, "linear", "k2" };
        for (const auto& c : cums) {
            t.push_back(c.j * returns.dt);
            y.push_back(c.k[1]);
            e.push_back(c.eps[1]);
            sc.t.push_back(c.j * returns.dt);
            sc.y.push_back(c.k[1]);
            sc.e.push_back(c.eps[1]);
        }
        const auto [slope, err] = weighted_fit_through_origin(t, y, e);
        if (!(slope > 0)) throw std::runtime_error("fit_tld: non-positive variance slope");
        out.params.sigma2 = slope;
        // the aggregated variances are near-deterministic multiples of the
        // one-day sample variance, not independent observations, so the
        // naive through-origin error is inflated back by sqrt(#points)
        out.errors.sigma2 = err * std::sqrt(static_cast<double>(t.size()));
        out.scalings.push_back(std::move(sc));
    }

    const double g = out.params.gamma;
    const double S2 = out.params.sigma2;
    const double Sig = std::sqrt(S2);

    // lambda: fixed-slope (-1) intercept of log kappa vs log t
    {
        std::vector<double> c0, w;
        ScalingSeries sc{ {}, {}, {}, "log-log", "kappa" };
        for (const auto& c : cums) {
            const double t = c.j * returns.dt;
            const double k2 = c.k[1], k4 = c.k[3];
            const double kap = c.kappa;
            const double eps_kap = std::sqrt(std::pow(c.eps[3] / (k2 * k2), 2)
                                           + std::pow(2.0 * k4 * c.eps[1] / (k2 * k2 * k2), 2));
            sc.t.push_back(t); sc.y.push_back(kap); sc.e.push_back(eps_kap);
            if (!(kap > 0)) continue; // log undefined; skipped, reported below
            const double el = eps_kap / kap; // error of log kappa
            c0.push_back(std::log(kap) + std::log(t));
            w.push_back(el);
        }
        if (c0.size() < 2)
            throw std::runtime_error("fit_tld: too few positive-kurtosis horizons for the lambda fit");
        if (c0.size() < sc.t.size())
            out.warnings.push_back("non-positive kurtosis at some horizons, dropped from lambda fit");
        double num = 0, den = 0;
        for (std::size_t i = 0; i < c0.size(); ++i) {
            const double wt = 1.0 / (w[i] * w[i]);
            num += wt * c0[i]; den += wt;
        }
        const double intercept = num / den;
        double chi2 = 0;
        for (std::size_t i = 0; i < c0.size(); ++i)
            chi2 += std::pow((c0[i] - intercept) / w[i], 2);
        // reduced-chi^2 scaling: the pinned -1 slope is asymptotic, so real
        // scatter of the per-horizon intercepts dominates the naive error
        const double idof = std::max<std::size_t>(1, c0.size() - 1);
        const double ierr = std::sqrt(1.0 / den)
                          * std::sqrt(std::max(1.0, chi2 / idof));
        const double rhs = (2.0 - g) * (3.0 - g) / S2; // = lambda^2 e^{intercept}
        const double lam2 = rhs / std::exp(intercept);
        if (!(lam2 > 0)) throw std::runtime_error("fit_tld: lambda unidentifiable (Gaussian-like data)");
        out.params.lambda = std::sqrt(lam2);
        // propagate gamma and Sigma2 uncertainties through
        // lambda^2 = (2-g)(3-g)/(Sigma2 e^I); the 1/(2-gamma) factor
        // dominates near the Gaussian limit
        const double dg = (1.0 / (2.0 - g) + 1.0 / (3.0 - g)) * out.errors.gamma;
        const double ds = out.errors.sigma2 / S2;
        out.errors.lambda = 0.5 * out.params.lambda
                          * std::sqrt(ierr * ierr + dg * dg + ds * ds);
        out.scalings.push_back(std::move(sc));
    }

    // beta: fixed-slope (-1/2) intercept of log|zeta| vs log t
    {
        std::vector<double> c0, w, signs;
        ScalingSeries sc{ {}, {}, {}, "log-log", "zeta" };
        for (const auto& c : cums) {
            const double t = c.j * returns.dt;
            const double k2 = c.k[1], k3 = c.k[2];
            const double zeta = c.zeta;
            const double eps_z = std::sqrt(std::pow(c.eps[2] / std::pow(k2, 1.5), 2)
                                         + std::pow(1.5 * k3 * c.eps[1] / std::pow(k2, 2.5), 2));
            sc.t.push_back(t); sc.y.push_back(zeta); sc.e.push_back(eps_z);
            signs.push_back(zeta);
            if (zeta == 0.0) continue;
            c0.push_back(std::log(std::abs(zeta)) + 0.5 * std::log(t));
            w.push_back(eps_z / std::abs(zeta));
        }
        if (c0.empty()) {
            out.params.beta = 0.0;
            out.errors.beta = 0.0;
            out.warnings.push_back("all skewness estimates zero; beta = 0");
        } else {
            double num = 0, den = 0;
            for (std::size_t i = 0; i < c0.size(); ++i) {
                const double wt = 1.0 / (w[i] * w[i]);
                num += wt * c0[i]; den += wt;
            }
            const double intercept = num / den;
            double chi2 = 0;
            for (std::size_t i = 0; i < c0.size(); ++i)
                chi2 += std::pow((c0[i] - intercept) / w[i], 2);
            const double idof = std::max<std::size_t>(1, c0.size() - 1);
            const double ierr = std::sqrt(1.0 / den)
                              * std::sqrt(std::max(1.0, chi2 / idof));
            double beta = std::exp(intercept) * out.params.lambda * Sig / (2.0 - g);
            std::sort(signs.begin(), signs.end());
            const double median = signs[signs.size() / 2];
            if (median < 0) beta = -beta;
            if (std::abs(beta) > 1.0) {
                out.warnings.push_back("beta clipped to [-1,1]");
                beta = beta > 0 ? 1.0 : -1.0;
            }
            out.params.beta = beta;
            // propagate lambda, Sigma2 and gamma uncertainties through
            // beta = e^I lambda Sigma / (2-gamma)
            const double dl = out.errors.lambda / out.params.lambda;
            const double ds = 0.5 * out.errors.sigma2 / S2;
            const double dg = out.errors.gamma / (2.0 - g);
            out.errors.beta = std::abs(beta)
                            * std::sqrt(ierr * ierr + dl * dl + ds * ds + dg * dg);
        }
        out.scalings.push_back(std::move(sc));
    }
    return out;
}

// ------------------------------------------------------------ Heston fit

// chi^2 objective: cumulants 2..4 over horizons 1..j_max, weighted by the
// empirical standard errors
inline double heston_objective(const HestonParams& p,
                               const std::vector<CumulantEstimates>& cums,
                               double dt, std::vector<double>* residuals = nullptr) {
    const HestonModel model(p);
    double obj = 0.0;
    if (residuals) residuals->clear();
    for (const auto& c : cums) {
        const CumulantSet m = model.cumulants(c.j * dt);
        const double mk[3] = {m.k2, m.k3, m.k4};
        for (int i = 0; i < 3; ++i) {
            const double r = (c.k[i + 1] - mk[i]) / c.eps[i + 1];
            obj += r * r;
            if (residuals) residuals->push_back(r);
        }
    }
    return obj;
}

// cov = 2 H^{-1}; writes sqrt(diag(cov)) into se, returns false if singular
inline bool invert_3x3_diag_sqrt(const double H[3][3], double se[3]) {
    const double a = H[0][0], b = H[0][1], c = H[0][2];
    const double d = H[1][1], e = H[1][2], f = H[2][2];
    const double det = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
    if (!(std::abs(det) > 0) || !std::isfinite(det)) return false;
    const double i00 = (d * f - e * e) / det;
    const double i11 = (a * f - c * c) / det;
    const double i22 = (a * d - b * b) / det;
    if (!(i00 > 0 && i11 > 0 && i22 > 0)) return false;
    se[0] = std::sqrt(2.0 * i00);
    se[1] = std::sqrt(2.0 * i11);
    se[2] = std::sqrt(2.0 * i22);
    return true;
}

inline HestonFit fit_heston(const ReturnSeries& returns, int j_max = 10) {
    const auto cums = empirical_cumulants(returns, j_max);
    HestonFit out;
    out.params.mu = returns.mu;
    out.errors.mu = 0.0;

    // sigma2 from the first-cumulant scaling: k1(t) = -sigma2 t / 2
    {
        std::vector<double> t, y, e;
        ScalingSeries sc{ {}, {}, {}, "linear", "k1" };
        for (const auto& c : cums) {
            t.push_back(c.j * returns.dt);
            y.push_back(c.k[0]);
            e.push_back(c.eps[0]);
            sc.t.push_back(c.j * returns.dt);
            sc.y.push_back(c.k[0]);
            sc.e.push_back(c.eps[0]);
        }
        const auto [slope, err] = weighted_fit_through_origin(t, y, e);
        out.scalings.push_back(std::move(sc));
        const double s2 = -2.0 * slope;
        if (!(s2 > 0))
            throw std::runtime_error("fit_heston: non-negative first-cumulant slope (sigma2 <= 0)");
        out.params.sigma2 = s2;
        // aggregated first-cumulant estimates at different horizons are
        // deterministic multiples of one sample mean, so the scaling fit's
        // independent-error assumption overstates precision by sqrt(#points)
        out.errors.sigma2 = 2.0 * err * std::sqrt(static_cast<double>(t.size()));
    }

    // (alpha, rho, k) by simplex on transformed coordinates
    const double s2 = out.params.sigma2, mu = out.params.mu, dt = returns.dt;
    auto unpack = [&](const std::vector<double>& u) {
        HestonParams p;
        p.sigma2 = s2; p.mu = mu;
        p.rho = std::tanh(u[0]);
        p.alpha = std::exp(u[1]);
        p.k = std::exp(u[2]);
        return p;
    };
    auto obj_u = [&](const std::vector<double>& u) {
        const HestonParams p = unpack(u);
        // tanh saturates to exactly +-1 for |u| >~ 19, outside the model domain
        if (!(p.alpha > 1e-8 && p.alpha < 1e8 && p.k > 1e-8 && p.k < 1e8 &&
              std::abs(p.rho) < 1.0))
            return 1e30;
        return heston_objective(p, cums, dt);
    };

    const double starts[8][3] = { // (rho, alpha, k)
        {0.0, 1.0, 1.0},    {0.0, 1000.0, 100.0}, {-0.5, 10.0, 3.0},
        {0.5, 10.0, 3.0},   {-0.5, 300.0, 10.0},  {0.5, 300.0, 10.0},
        {0.0, 31.6, 31.6},  {0.0, 100.0, 1.0}};
    NmResult best;
    for (const auto& s : starts) {
        const std::vector<double> u0 = {std::atanh(s[0]), std::log(s[1]), std::log(s[2])};
        NmResult r = nelder_mead(obj_u, u0, 0.8, 4000, 1e-14, 1e-9);
        const HestonParams p = unpack(r.x);
        MultiStartEntry entry{{s[0], s[1], s[2]}, {p.rho, p.alpha, p.k}, r.fval, r.converged};
        out.starts.push_back(entry);
        if (r.fval < best.fval) best = std::move(r);
    }
    if (!std::isfinite(best.fval) || best.fval >= 1e30)
        throw std::runtime_error("fit_heston: objective non-finite at all multi-starts");
    out.params = unpack(best.x);
    out.objective = heston_objective(out.params, cums, dt, &out.residuals);

    // uncertainties from the finite-difference Hessian of the chi^2
    // surface in (rho, alpha, k): cov = 2 H^{-1}
    {
        const double x[3] = {out.params.rho, out.params.alpha, out.params.k};
        const double h[3] = {std::max(1e-5, std::abs(x[0]) * 1e-4),
                             std::max(1e-5, std::abs(x[1]) * 1e-4),
                             std::max(1e-5, std::abs(x[2]) * 1e-4)};
        auto at = [&](double r, double a, double kk) {
            HestonParams p = out.params;
            p.rho = r; p.alpha = a; p.k = kk;
            if (std::abs(p.rho) >= 1.0 || p.alpha <= 0 || p.k <= 0) return 1e30;
            return heston_objective(p, cums, dt);
        };
        double H[3][3];
        const double f0 = out.objective;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                double v;
                if (i == j) {
                    double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
                    xp[i] += h[i]; xm[i] -= h[i];
                    v = (at(xp[0], xp[1], xp[2]) - 2.0 * f0 + at(xm[0], xm[1], xm[2]))
                      / (h[i] * h[i]);
                } else {
                    double pp[3] = {x[0], x[1], x[2]}, pm[3] = {x[0], x[1], x[2]};
                    double mp[3] = {x[0], x[1], x[2]}, mm[3] = {x[0], x[1], x[2]};
                    pp[i] += h[i]; pp[j] += h[j];
                    pm[i] += h[i]; pm[j] -= h[j];
                    mp[i] -= h[i]; mp[j] += h[j];
                    mm[i] -= h[i]; mm[j] -= h[j];
                    v = (at(pp[0], pp[1], pp[2]) - at(pm[0], pm[1], pm[2])
                       - at(mp[0], mp[1], mp[2]) + at(mm[0], mm[1], mm[2]))
                      / (4.0 * h[i] * h[j]);
                }
                H[i][j] = H[j][i] = v;
            }
        }
        double se[3];
        if (invert_3x3_diag_sqrt(H, se)) {
            // Marquardt-Levenberg convention: scale parameter errors by the
            // reduced chi^2 so lack of fit widens the reported uncertainty
            const double dof = std::max<std::size_t>(1, out.residuals.size() - 3);
            const double scale = std::sqrt(std::max(1.0, out.objective / dof));
            out.errors.rho = se[0] * scale;
            out.errors.alpha = se[1] * scale;
            out.errors.k = se[2] * scale;
        } else {
            out.warnings.push_back("singular Hessian at the optimum; parameter errors unavailable");
            out.errors.rho = out.errors.alpha = out.errors.k = 0.0;
        }
    }

    if (!HestonModel(out.params).feller_ok())
        out.warnings.push_back("Feller condition 2*alpha*sigma2 > k^2 violated (allowed)");
    return out;
}

} // namespace frisk
