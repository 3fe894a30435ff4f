#pragma once

// Generalized Fourier transform risk engine.
//
// For a damping contour Im(phi) = nu inside the model strip and theta in
// {nu, nu+1}:
//   G_nu(L, theta) = e^{-theta L} Int_0^inf f(w + i nu) / (theta - i w) e^{i w L} dw
//   P*(L)          = Re G_nu(L, nu) / pi
//   E*(L)          = 1 - e^{mu t} Re G_nu(L, nu+1) / Re G_nu(L, nu)
//   Lambda*(L)     = 1 - e^{mu t - L}
//
// FFT mode: both theta sweeps from one set of f samples (midpoint-offset
// quadrature mapped onto a radix-2 DFT). Quadrature mode: adaptive
// trapezoidal evaluation of the same integral for one L at a time.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "models.hpp"
#include "numerics.hpp"

namespace frisk {

struct FourierGrid {
    std::size_t n_points = 1u << 18;
    double omega_max = 0.0; // 1/return units
    double dl_div = 128.0;  // target L-step = sqrt(k2)/dl_div
    double span_min = 34.0; // minimum nu * (L-grid span), alias guard
    double decay_tol = 1e-13;
};

struct RiskCurve {
    double t = 0.0;
    double nu = 0.0;
    double mu = 0.0;
    std::vector<double> lstar;       // threshold log-levels L*
    std::vector<double> pstar;       // significance P*(L*)
    std::vector<double> lambda_star; // 1 - exp(mu t - L*)
    std::vector<double> estar;       // expected shortfall E*(L*)
    std::vector<double> gnum;        // Re G_nu(L*, nu+1), kept for interpolation
};

enum class RiskMode { fft, quadrature };

struct RiskPoint {
    double pstar;
    double lstar;
    double lambda_star;
    double estar;
    RiskMode method;
};

namespace detail {

// doubling scan for the integrand decay cutoff
inline double decay_omega(const EcfModel& model, double t, double nu, double tol) {
    double w = 16.0;
    while (w < 1e9) {
        const double mag = std::abs(model.evaluate(cplx(w, nu), t))
                         / std::abs(cplx(nu, -w));
        if (mag < tol) return w;
        w *= 2.0;
    }
    throw std::runtime_error("fourier: integrand has not decayed by omega = 1e9");
}

} // namespace detail

// Resolves omega_max (and hence dL) for one model/horizon/contour.
inline FourierGrid make_grid(const EcfModel& model, double t, double nu,
                             FourierGrid grid = {}) {
    if ((grid.n_points & (grid.n_points - 1)) != 0 || grid.n_points < (1u << 10))
        throw std::invalid_argument("make_grid: n_points must be a power of two >= 2^10");
    const double k2 = model.cumulants(t).k2;
    const double w_decay = detail::decay_omega(model, t, nu, grid.decay_tol);
    // target step: fine enough for interpolation, long enough in span for
    // alias suppression exp(-nu * n * dL)
    const double dl_target = std::max(std::sqrt(k2) / grid.dl_div,
                                      grid.span_min / (nu * static_cast<double>(grid.n_points)));
    grid.omega_max = std::max(w_decay, 2.0 * 3.141592653589793238462643383280 / dl_target);
    return grid;
}

// Full VaR/ES curve from two FFT sweeps sharing the f(w + i nu) samples.
inline RiskCurve var_es_curve(const EcfModel& model, double t, double nu,
                              FourierGrid grid = {},
                              double p_lo = 1e-4, double p_hi = 0.5) {
    const Strip strip = model.strip(t);
    if (!(nu > 0 && nu < strip.nu_plus))
        throw std::invalid_argument("var_es_curve: nu outside (0, nu_plus)");
    if (grid.omega_max <= 0.0) grid = make_grid(model, t, nu, grid);

    const std::size_t n = grid.n_points;
    const double pi = 3.141592653589793238462643383280;
    const double dw = grid.omega_max / static_cast<double>(n);
    const double dL = 2.0 * pi / grid.omega_max;
    const CumulantSet cums = model.cumulants(t);
    const double L0 = -cums.k1 - 0.5 * static_cast<double>(n) * dL;

    // f samples at midpoint-offset frequencies w_m = (m + 1/2) dw
    std::vector<cplx> f(n);
    for (std::size_t m = 0; m < n; ++m)
        f[m] = model.evaluate(cplx((m + 0.5) * dw, nu), t);
    const double tail = std::abs(f[n - 1]) / std::abs(cplx(nu, -(n - 0.5) * dw));
    if (tail > 1e3 * grid.decay_tol)
        throw std::runtime_error("var_es_curve: integrand not decayed at omega_max");

    // one positive-exponent DFT per theta
    std::vector<std::vector<double>> re_g(2);
    const double thetas[2] = {nu, nu + 1.0};
    for (int s = 0; s < 2; ++s) {
        const double theta = thetas[s];
        std::vector<cplx> a(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double wm = (m + 0.5) * dw;
            a[m] = dw * f[m] / cplx(theta, -wm) * std::polar(1.0, wm * L0);
        }
        fft(a, +1);
        re_g[s].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double Lk = L0 + static_cast<double>(k) * dL;
            const cplx phase = std::polar(1.0, pi * static_cast<double>(k)
                                               / static_cast<double>(n));
            re_g[s][k] = std::exp(-theta * Lk) * (phase * a[k]).real();
        }
    }

    // trim to a contiguous monotone window, scanning from the clean right
    // tail (left of center, exp(-theta L) amplifies FFT round-off)
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = re_g[0][k] / pi;
    std::size_t hi = n - 1;
    while (hi > 0 && p[hi] < p_lo) --hi;
    std::size_t lo = hi;
    while (lo > 0 && p[lo - 1] > p[lo] && p[lo - 1] <= p_hi) --lo;
    if (hi <= lo)
        throw std::runtime_error("var_es_curve: empty trimmed grid");

    RiskCurve curve;
    curve.t = t;
    curve.nu = nu;
    curve.mu = model.mu();
    const double growth = std::exp(model.mu() * t);
    curve.lstar.reserve(hi - lo + 1);
    for (std::size_t k = lo; k <= hi; ++k) {
        const double Lk = L0 + static_cast<double>(k) * dL;
        curve.lstar.push_back(Lk);
        curve.pstar.push_back(p[k]);
        curve.lambda_star.push_back(1.0 - growth * std::exp(-Lk));
        curve.gnum.push_back(re_g[1][k]);
        curve.estar.push_back(1.0 - growth * re_g[1][k] / (pi * p[k]));
    }
    return curve;
}

// Monotone interpolation of a curve at one significance level.
inline RiskPoint risk_from_curve(const RiskCurve& curve, double pstar) {
    const std::size_t n = curve.pstar.size();
    if (n < 4) throw std::runtime_error("risk_from_curve: curve too short");
    if (!(pstar >= curve.pstar.back() && pstar <= curve.pstar.front()))
        throw std::invalid_argument("risk_from_curve: pstar outside the curve range");
    // (log P*, L*): P decreasing in L, so reverse for increasing abscissa
    std::vector<double> logp(n), lrev(n), lfor(n), loggnum(n);
    for (std::size_t i = 0; i < n; ++i) {
        logp[i] = std::log(curve.pstar[n - 1 - i]);
        lrev[i] = curve.lstar[n - 1 - i];
        lfor[i] = curve.lstar[i];
        const double g = curve.gnum[i];
        if (!(g > 0)) throw std::runtime_error("risk_from_curve: nonpositive ES numerator on grid");
        loggnum[i] = std::log(g);
    }
    const Pchip l_of_logp(std::move(logp), std::move(lrev));
    const Pchip loggnum_of_l(std::move(lfor), std::move(loggnum));
    RiskPoint out;
    out.method = RiskMode::fft;
    out.pstar = pstar;
    out.lstar = l_of_logp(std::log(pstar));
    const double growth = std::exp(curve.mu * curve.t);
    out.lambda_star = 1.0 - growth * std::exp(-out.lstar);
    const double pi = 3.141592653589793238462643383280;
    out.estar = 1.0 - growth * std::exp(loggnum_of_l(out.lstar)) / (pi * pstar);
    return out;
}

// Single-point Re G_nu(L, theta) by adaptive trapezoidal quadrature.
inline double i_nu(const EcfModel& model, double t, double nu, double theta,
                   double lstar, double tol = 1e-9, double decay_tol = 1e-13) {
    const Strip strip = model.strip(t);
    if (!(nu > 0 && nu < strip.nu_plus))
        throw std::invalid_argument("i_nu: nu outside (0, nu_plus)");
    const double omega = detail::decay_omega(model, t, nu, decay_tol);
    auto integrand = [&](double w) {
        return (model.evaluate(cplx(w, nu), t) / cplx(theta, -w)
                * std::polar(1.0, w * lstar)).real();
    };
    // tolerance requested on e^{-theta L} * integral
    const double quad_tol = tol * std::exp(theta * lstar);
    const double integral = adaptive_trapezoid(integrand, 0.0, omega, quad_tol);
    return std::exp(-theta * lstar) * integral;
}

// Quadrature-mode risk point: bracketing root-find of P*(L) = pstar,
// then the ES ratio at the solved threshold.
inline RiskPoint risk_quadrature(const EcfModel& model, double t, double nu,
                                 double pstar, double root_tol = 1e-10,
                                 double quad_tol = 1e-9) {
    if (!(pstar > 0 && pstar < 1))
        throw std::invalid_argument("risk_quadrature: pstar must be in (0,1)");
    const double pi = 3.141592653589793238462643383280;
    auto p_of_l = [&](double L) {
        return i_nu(model, t, nu, nu, L, quad_tol) / pi - pstar;
    };
    // bracket around the cumulant-scale guess, expanding geometrically
    const CumulantSet c = model.cumulants(t);
    const double s = std::sqrt(c.k2);
    double a = -c.k1 - 2.0 * s, b = -c.k1 + 2.0 * s;
    double fa = p_of_l(a), fb = p_of_l(b);
    int guard = 0;
    while (fa < 0.0 && guard++ < 60) { a -= 4.0 * s; fa = p_of_l(a); } // P increases as L decreases
    guard = 0;
    while (fb > 0.0 && guard++ < 60) { b += 4.0 * s; fb = p_of_l(b); }
    if (fa < 0.0 || fb > 0.0)
        throw std::runtime_error("risk_quadrature: failed to bracket the threshold");
    RiskPoint out;
    out.method = RiskMode::quadrature;
    out.pstar = pstar;
    out.lstar = brent_root(p_of_l, a, b, root_tol * s);
    const double growth = std::exp(model.mu() * t);
    out.lambda_star = 1.0 - growth * std::exp(-out.lstar);
    out.estar = 1.0 - growth * i_nu(model, t, nu, nu + 1.0, out.lstar, quad_tol)
                      / (pi * pstar);
    return out;
}

// Mode-dispatching single-point interface.
inline RiskPoint risk_at(const EcfModel& model, double t, double nu,
                         double pstar, RiskMode mode, FourierGrid grid = {}) {
    if (mode == RiskMode::quadrature)
        return risk_quadrature(model, t, nu, pstar);
    return risk_from_curve(var_es_curve(model, t, nu, grid), pstar);
}

} // namespace frisk
