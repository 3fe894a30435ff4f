#pragma once

// GARCH(1,1) bootstrap: Gaussian quasi-maximum-likelihood fit, innovation
// extraction, seeded resampling that preserves volatility clustering, and
// percentile confidence intervals over replica estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "optim.hpp"
#include "rng.hpp"
#include "timeseries.hpp"

namespace frisk {

// Y_t = C + sigma_t z_t,  sigma_t^2 = K + G sigma_{t-1}^2 + A (Y_{t-1} - C)^2
struct GarchParams {
    double C; // per-interval mean return
    double K; // variance intercept
    double G; // persistence
    double A; // innovation load
};

struct BootstrapDistribution {
    std::string label;
    std::vector<double> replicas; // successful replica estimates, by index order
    int failed = 0;
};

namespace detail {

inline double garch_negloglik(const GarchParams& p, const std::vector<double>& y,
                              double sigma0_sq) {
    const std::size_t n = y.size();
    double s2 = sigma0_sq;
    double nll = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            const double d = y[t - 1] - p.C;
            s2 = p.K + p.G * s2 + p.A * d * d;
        }
        if (!(s2 > 0) || !std::isfinite(s2)) return 1e30;
        const double z = y[t] - p.C;
        nll += 0.5 * (std::log(s2) + z * z / s2);
    }
    return std::isfinite(nll) ? nll : 1e30;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double q) { return std::log(q / (1.0 - q)); }

} // namespace detail

inline GarchParams fit_garch(const ReturnSeries& returns) {
    const std::vector<double>& y = returns.values;
    if (y.size() < 250)
        throw std::invalid_argument("fit_garch: need at least 250 returns");
    double mean = 0, var = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size());
    // relative threshold: a constant series can show variance ~1e-36 from
    // accumulated rounding alone, which must still count as degenerate
    if (!(var > 1e-12 * (mean * mean + 1e-300)))
        throw std::invalid_argument("fit_garch: degenerate (constant) series");

    // transforms enforce K > 0 and covariance stationarity G + A < 1:
    // s = sigmoid(u1) in (0,1) is the persistence total, split G = s q, A = s (1-q)
    auto unpack = [&](const std::vector<double>& u) {
        GarchParams p;
        p.C = u[0];
        p.K = std::exp(u[1]);
        const double s = detail::sigmoid(u[2]) * 0.999999;
        const double q = detail::sigmoid(u[3]);
        p.G = s * q;
        p.A = s * (1.0 - q);
        return p;
    };
    // start the variance recursion at the model-implied unconditional variance
    // K / (1 - G - A); seeding it with the sample variance instead creates a
    // flat ridge (G -> 1, K -> 0) that the optimizer can drift along on
    // constant-volatility data, yielding a near-zero unconditional variance
    auto obj = [&](const std::vector<double>& u) {
        const GarchParams p = unpack(u);
        return detail::garch_negloglik(p, y, p.K / (1.0 - p.G - p.A));
    };

    const double start_sq[6][2] = {{0.5, 0.5}, {0.9, 0.9}, {0.97, 0.93},
                                   {0.99, 0.95}, {0.8, 0.2}, {0.1, 0.5}};
    NmResult best;
    for (const auto& s : start_sq) {
        const double total = s[0], frac = s[1];
        const std::vector<double> u0 = {mean, std::log(var * (1.0 - total)),
                                        detail::logit(total), detail::logit(frac)};
        NmResult r = nelder_mead(obj, u0, 0.5, 4000, 1e-13, 1e-9);
        if (r.fval < best.fval) best = std::move(r);
    }
    if (!std::isfinite(best.fval) || best.fval >= 1e30)
        throw std::runtime_error("fit_garch: likelihood non-finite at all starts");
    return unpack(best.x);
}

inline std::vector<double> extract_innovations(const ReturnSeries& returns,
                                               const GarchParams& p) {
    const std::vector<double>& y = returns.values;
    const double denom = 1.0 - p.G - p.A;
    if (!(denom > 0))
        throw std::invalid_argument("extract_innovations: non-stationary parameters");
    std::vector<double> z(y.size());
    // presample variance: unconditional K / (1 - G - A), matching the fit and
    // the resampler so extracted innovations have unit scale under the model
    double s2 = p.K / denom;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (t > 0) {
            const double d = y[t - 1] - p.C;
            s2 = p.K + p.G * s2 + p.A * d * d;
        }
        if (!(s2 > 0)) throw std::runtime_error("extract_innovations: nonpositive variance");
        z[t] = (y[t] - p.C) / std::sqrt(s2);
    }
    return z;
}

// i.i.d. resample of the innovations pushed through the GARCH recursion,
// started from the unconditional variance
inline ReturnSeries resample_series(const GarchParams& p,
                                    const std::vector<double>& innovations,
                                    std::size_t length, std::uint64_t seed,
                                    double dt = default_dt) {
    if (innovations.empty())
        throw std::invalid_argument("resample_series: empty innovation pool");
    const double denom = 1.0 - p.G - p.A;
    if (!(denom > 0))
        throw std::invalid_argument("resample_series: non-stationary parameters");
    Rng rng(seed);
    ReturnSeries out;
    out.kind = ReturnKind::centered_log;
    out.dt = dt;
    out.values.resize(length);
    double s2 = p.K / denom;
    double prev_d = 0.0;
    double lin_sum = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        if (t > 0) s2 = p.K + p.G * s2 + p.A * prev_d * prev_d;
        const double z = innovations[rng.bounded(innovations.size())];
        prev_d = std::sqrt(s2) * z;
        out.values[t] = p.C + prev_d;
        lin_sum += std::exp(out.values[t]) - 1.0;
    }
    out.mu = lin_sum / static_cast<double>(length) / dt;
    // same convention as price-to-return preprocessing: re-estimate the
    // linear drift on the replica and center the log returns with it, so
    // downstream calibrations see the convention they were designed for
    for (double& v : out.values) v -= out.mu * dt;
    return out;
}

struct BootstrapCi {
    double lower;
    double upper;
    BootstrapDistribution dist;
};

// Percentile bootstrap: runs `estimator` on m_b seeded replicas; the CI is
// [alpha, 1-alpha] empirical quantiles (same interpolation convention as the
// historical estimator). Replicas are independent and run in parallel;
// per-replica seeds are derived from (base_seed, index) so results do not
// depend on scheduling.
inline BootstrapCi bootstrap_ci(
    const std::function<double(const ReturnSeries&)>& estimator,
    const GarchParams& garch, const std::vector<double>& innovations,
    std::size_t replica_length, int m_b, double alpha, std::uint64_t base_seed,
    double dt = default_dt, unsigned worker_budget = 8) {
    if (m_b < 100) throw std::invalid_argument("bootstrap_ci: M_B must be >= 100");
    if (!(alpha > 0 && alpha < 0.5)) throw std::invalid_argument("bootstrap_ci: alpha in (0, 0.5)");

    std::vector<double> values(static_cast<std::size_t>(m_b));
    std::vector<char> ok(static_cast<std::size_t>(m_b), 0);
    run_parallel(static_cast<std::size_t>(m_b), worker_budget, [&](std::size_t i) {
        const ReturnSeries replica = resample_series(
            garch, innovations, replica_length, derive_seed(base_seed, i), dt);
        try {
            values[i] = estimator(replica);
            ok[i] = 1;
        } catch (const std::exception&) {
            ok[i] = 0; // counted below
        }
    });

    BootstrapCi out;
    for (int i = 0; i < m_b; ++i) {
        if (ok[static_cast<std::size_t>(i)])
            out.dist.replicas.push_back(values[static_cast<std::size_t>(i)]);
        else
            ++out.dist.failed;
    }
    if (out.dist.failed * 20 > m_b)
        throw std::runtime_error("bootstrap_ci: more than 5% replica failures ("
                                 + std::to_string(out.dist.failed) + "/"
                                 + std::to_string(m_b) + ")");
    std::vector<double> sorted = out.dist.replicas;
    std::sort(sorted.begin(), sorted.end());
    out.lower = quantile_type7(sorted, alpha);
    out.upper = quantile_type7(sorted, 1.0 - alpha);
    return out;
}

} // namespace frisk
