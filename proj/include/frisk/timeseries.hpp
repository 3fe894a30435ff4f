#pragma once

// Price/return series handling: return construction, horizon aggregation,
// unbiased cumulant estimation (k-statistics) with jackknife errors,
// historical VaR/ES and the zero-return density estimator.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace frisk {

inline constexpr double default_dt = 3.98e-3; // one trading day, in years

struct PriceSeries {
    std::vector<std::string> dates;
    std::vector<double> closes;
};

enum class ReturnKind { linear, log, centered_log };

struct ReturnSeries {
    std::vector<double> values;
    ReturnKind kind = ReturnKind::log;
    double dt = default_dt; // base interval, years
    double mu = 0.0;        // annualized linear-return mean
};

struct CumulantEstimates {
    int j = 1;            // horizon index (horizon = j*dt)
    double k[4] = {};     // k1..k4
    double eps[4] = {};   // jackknife standard errors
    double zeta = 0.0;    // k3/k2^{3/2}
    double kappa = 0.0;   // k4/k2^2 (excess)
};

// ------------------------------------------------------------- returns

inline ReturnSeries to_returns(const PriceSeries& prices, ReturnKind kind,
                               double dt = default_dt) {
    const std::size_t n = prices.closes.size();
    if (n < 2) throw std::invalid_argument("to_returns: need at least 2 prices");
    if (!(dt > 0)) throw std::invalid_argument("to_returns: dt must be > 0");
    ReturnSeries out;
    out.kind = kind;
    out.dt = dt;
    out.values.reserve(n - 1);
    double lin_sum = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double ratio = prices.closes[i] / prices.closes[i - 1];
        lin_sum += ratio - 1.0;
        switch (kind) {
            case ReturnKind::linear: out.values.push_back(ratio - 1.0); break;
            default: out.values.push_back(std::log(ratio)); break;
        }
    }
    out.mu = lin_sum / static_cast<double>(n - 1) / dt;
    if (kind == ReturnKind::centered_log)
        for (double& v : out.values) v -= out.mu * dt;
    return out;
}

inline ReturnSeries aggregate(const ReturnSeries& r, int j) {
    if (j < 1) throw std::invalid_argument("aggregate: j must be >= 1");
    if (r.kind == ReturnKind::linear)
        throw std::invalid_argument("aggregate: returns must be additive (log or centered-log)");
    const std::size_t n = r.values.size();
    if (static_cast<std::size_t>(j) > n)
        throw std::invalid_argument("aggregate: j exceeds series length");
    ReturnSeries out;
    out.kind = r.kind;
    out.dt = r.dt * j;
    out.mu = r.mu;
    const std::size_t m = n / static_cast<std::size_t>(j);
    out.values.reserve(m);
    for (std::size_t b = 0; b < m; ++b) {
        double s = 0.0;
        for (int i = 0; i < j; ++i) s += r.values[b * j + i];
        out.values.push_back(s);
    }
    return out;
}

// converts a log (or centered-log) series to linear returns
inline ReturnSeries to_linear(const ReturnSeries& r) {
    if (r.kind == ReturnKind::linear) return r;
    ReturnSeries out = r;
    out.kind = ReturnKind::linear;
    for (double& v : out.values) {
        const double x = (r.kind == ReturnKind::centered_log) ? v + r.mu * r.dt : v;
        v = std::exp(x) - 1.0;
    }
    return out;
}

// ----------------------------------------------------------- cumulants

namespace detail {

// k-statistics from power sums of mean-shifted data
struct KStats {
    double k1, k2, k3, k4;
};

inline KStats kstats_from_central(double n, double mean,
                                  double m2, double m3, double m4) {
    KStats k;
    k.k1 = mean;
    k.k2 = n / (n - 1.0) * m2;
    k.k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    k.k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
         / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    return k;
}

} // namespace detail

// Unbiased cumulants (k-statistics) of one series with delete-1 jackknife
// standard errors, computed in O(n) via power-sum downdating.
inline CumulantEstimates cumulants_with_errors(const std::vector<double>& x, int j = 1) {
    const std::size_t n = x.size();
    if (n < 5)
        throw std::invalid_argument("cumulants_with_errors: need at least 5 points");
    const double nn = static_cast<double>(n);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / nn;
    // power sums of deviations d_i = x_i - mean
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
    for (double xi : x) {
        const double d = xi - mean;
        const double d2 = d * d;
        p1 += d; p2 += d2; p3 += d2 * d; p4 += d2 * d2;
    }
    const double m2 = p2 / nn, m3 = p3 / nn, m4 = p4 / nn;
    if (!(m2 > 0))
        throw std::invalid_argument("cumulants_with_errors: degenerate (zero-variance) series");
    const auto full = detail::kstats_from_central(nn, mean, m2, m3, m4);

    CumulantEstimates out;
    out.j = j;
    out.k[0] = full.k1; out.k[1] = full.k2; out.k[2] = full.k3; out.k[3] = full.k4;
    out.zeta = full.k3 / std::pow(full.k2, 1.5);
    out.kappa = full.k4 / (full.k2 * full.k2);

    // delete-1 jackknife
    const double nm1 = nn - 1.0;
    double s[4] = {0, 0, 0, 0}, ssq[4] = {0, 0, 0, 0};
    for (double xi : x) {
        const double d = xi - mean;
        const double q1 = p1 - d;
        const double q2 = p2 - d * d;
        const double q3 = p3 - d * d * d;
        const double q4 = p4 - d * d * d * d;
        const double delta = q1 / nm1; // leave-one-out mean shift (relative to `mean`)
        const double m2i = q2 / nm1 - delta * delta;
        const double m3i = q3 / nm1 - 3.0 * delta * q2 / nm1 + 2.0 * delta * delta * delta;
        const double m4i = q4 / nm1 - 4.0 * delta * q3 / nm1
                         + 6.0 * delta * delta * q2 / nm1
                         - 3.0 * delta * delta * delta * delta;
        const auto ki = detail::kstats_from_central(nm1, mean + delta, m2i, m3i, m4i);
        const double v[4] = {ki.k1, ki.k2, ki.k3, ki.k4};
        for (int c = 0; c < 4; ++c) { s[c] += v[c]; ssq[c] += v[c] * v[c]; }
    }
    for (int c = 0; c < 4; ++c) {
        const double mean_i = s[c] / nn;
        const double var_i = std::max(0.0, ssq[c] / nn - mean_i * mean_i);
        out.eps[c] = std::sqrt(nm1 * var_i); // (n-1)/n * sum (th_i - mean)^2
        if (!(out.eps[c] > 0)) out.eps[c] = 1e-300; // degenerate guard; callers check
    }
    return out;
}

inline std::vector<CumulantEstimates>
empirical_cumulants(const ReturnSeries& r, int j_max) {
    if (j_max < 1) throw std::invalid_argument("empirical_cumulants: j_max >= 1 required");
    if (r.values.size() / static_cast<std::size_t>(j_max) < 30)
        throw std::invalid_argument("empirical_cumulants: fewer than 30 points at j_max");
    std::vector<CumulantEstimates> out;
    out.reserve(j_max);
    for (int j = 1; j <= j_max; ++j) {
        const ReturnSeries agg = (j == 1) ? r : aggregate(r, j);
        out.push_back(cumulants_with_errors(agg.values, j));
    }
    return out;
}

// ----------------------------------------------------- historical risk

// order-statistics quantile with linear interpolation (type-7 convention)
inline double quantile_type7(std::vector<double> sorted_ascending, double p) {
    const std::size_t n = sorted_ascending.size();
    if (n == 0) throw std::invalid_argument("quantile: empty sample");
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("quantile: p outside [0,1]");
    const double h = (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted_ascending[n - 1];
    const double w = h - static_cast<double>(lo);
    return sorted_ascending[lo] * (1.0 - w) + sorted_ascending[lo + 1] * w;
}

struct HistoricalRisk {
    double lambda_star; // VaR as a fraction of notional
    double e_star;      // expected shortfall, same units
};

inline HistoricalRisk historical_var_es(const ReturnSeries& returns, double pstar) {
    if (!(pstar > 0 && pstar < 1))
        throw std::invalid_argument("historical_var_es: pstar must be in (0,1)");
    const ReturnSeries lin = to_linear(returns);
    const std::size_t n = lin.values.size();
    if (static_cast<double>(n) * pstar < 1.0)
        throw std::invalid_argument("historical_var_es: n*pstar < 1, tail not resolvable");
    std::vector<double> sorted = lin.values;
    std::sort(sorted.begin(), sorted.end());
    const double q = quantile_type7(sorted, pstar);
    HistoricalRisk out;
    out.lambda_star = -q;
    double tail_sum = 0.0;
    std::size_t tail_n = 0;
    for (double v : sorted) {
        if (v < q) { tail_sum += v; ++tail_n; } // strict: losses exceeding the threshold
        else break;
    }
    if (tail_n == 0)
        throw std::runtime_error("historical_var_es: empty tail below the VaR threshold");
    out.e_star = -tail_sum / static_cast<double>(tail_n);
    return out;
}

// ------------------------------------------------- zero-return density

struct ZeroDensity {
    double value;     // \hat p(0), 1/return units
    double std_error; // binomial
    double bandwidth;
    bool degenerate = false;
};

// \hat p(0) = #{|x| <= h} / (2 h n); default bandwidth h = 0.1 * sd.
inline ZeroDensity zero_return_density(const ReturnSeries& r, double bandwidth = 0.0) {
    const std::size_t n = r.values.size();
    if (n == 0) throw std::invalid_argument("zero_return_density: empty series");
    const double nn = static_cast<double>(n);
    double mean = 0, var = 0;
    for (double v : r.values) mean += v;
    mean /= nn;
    for (double v : r.values) var += (v - mean) * (v - mean);
    var /= nn;
    double h = bandwidth > 0 ? bandwidth : 0.1 * std::sqrt(var);
    ZeroDensity out;
    if (!(h > 0)) { // point-mass series
        out.degenerate = true;
        h = 1e-12;
    }
    std::size_t c = 0;
    for (double v : r.values) if (std::abs(v) <= h) ++c;
    if (c == 0)
        throw std::runtime_error("zero_return_density: zero counts in bin; widen bandwidth");
    const double q = static_cast<double>(c) / nn;
    out.value = q / (2.0 * h);
    out.std_error = std::sqrt(q * (1.0 - q) / nn) / (2.0 * h);
    if (out.std_error <= 0) out.std_error = std::sqrt(q / nn) / (2.0 * h);
    out.bandwidth = h;
    if (q >= 1.0) out.degenerate = true;
    return out;
}

} // namespace frisk
