#pragma once

// Extended characteristic functions on their strips of regularity:
// Gaussian, exponentially truncated Levy flight, and Heston stochastic
// volatility, each with closed-form cumulants.

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

namespace frisk {

using cplx = std::complex<double>;

struct Strip {
    double nu_minus;
    double nu_plus;
};

struct CumulantSet {
    double k1, k2, k3, k4;
    double zeta() const { return k3 / std::pow(k2, 1.5); }
    double kappa() const { return k4 / (k2 * k2); }
};

// Model of the centered log-return x over horizon t (years): f(phi) = E[e^{i phi x}]
// extended to the strip; f(phi) = exp(H_t(phi)).
class EcfModel {
public:
    virtual ~EcfModel() = default;
    virtual cplx evaluate(cplx phi, double t) const = 0;
    virtual Strip strip(double t) const = 0;
    virtual CumulantSet cumulants(double t) const = 0;
    virtual double mu() const = 0; // annualized linear-return drift
    virtual std::string name() const = 0;
};

// ------------------------------------------------------------- Gaussian

class GaussianModel final : public EcfModel {
public:
    GaussianModel(double sigma2, double mu) : sigma2_(sigma2), mu_(mu) {
        if (!(sigma2 > 0)) throw std::invalid_argument("GaussianModel: sigma2 must be > 0");
    }
    cplx evaluate(cplx phi, double t) const override {
        return std::exp(-0.5 * sigma2_ * t * phi * phi
                        - cplx(0, 0.5) * sigma2_ * t * phi);
    }
    Strip strip(double) const override { return {-1e12, 1e12}; } // entire; capped
    CumulantSet cumulants(double t) const override {
        return {-0.5 * sigma2_ * t, sigma2_ * t, 0.0, 0.0};
    }
    double mu() const override { return mu_; }
    std::string name() const override { return "gaussian"; }
    double sigma2() const { return sigma2_; }

private:
    double sigma2_, mu_;
};

// -------------------------------------------------- truncated Levy (TLD)

struct TldParams {
    double sigma2; // variance per year
    double gamma;  // tail exponent in (0,2]
    double lambda; // exponential cutoff, 1/return units
    double beta;   // asymmetry in [-1,1]
};

class TldModel final : public EcfModel {
public:
    TldModel(TldParams p, double mu) : p_(p), mu_(mu) {
        if (!(p.sigma2 > 0)) throw std::invalid_argument("TldModel: Sigma2 must be > 0");
        if (!(p.gamma > 0 && p.gamma <= 2)) throw std::invalid_argument("TldModel: gamma must be in (0,2]");
        if (!(p.lambda > 0)) throw std::invalid_argument("TldModel: lambda must be > 0");
        if (!(std::abs(p.beta) <= 1)) throw std::invalid_argument("TldModel: |beta| must be <= 1");
    }

    // Per-year Hamiltonian, centered so that k1 = -Sigma2/2 per year; the
    // asymmetry sign convention is fixed so that beta < 0 gives negative skew
    // (k3 = -|...|), consistent with the closed-form cumulants below.
    cplx hamiltonian(cplx phi) const {
        const double g = p_.gamma, lam = p_.lambda, b = p_.beta;
        const cplx u = lam + cplx(0, 1) * phi;
        const cplx v = lam - cplx(0, 1) * phi;
        if (!(u.real() > 0) || !(v.real() > 0))
            throw std::invalid_argument("TldModel: phi outside the strip |Im phi| < lambda");
        const double A = 1.0 - b, B = 1.0 + b;
        cplx H;
        if (std::abs(g - 1.0) < 1e-6) {
            // removable singularity of the 1/(gamma(1-gamma)) prefactor
            const cplx dD = A * u * std::log(u) + B * v * std::log(v)
                          - 2.0 * lam * std::log(lam)
                          - cplx(0, 1) * phi * (1.0 + std::log(lam)) * (A - B);
            H = 0.5 * p_.sigma2 * std::pow(lam, 2.0 - g) * dD;
        } else {
            const double pre = -(p_.sigma2 / 2.0) * std::pow(lam, 2.0 - g) / (g * (1.0 - g));
            const cplx D = A * std::pow(u, g) + B * std::pow(v, g)
                         - 2.0 * std::pow(lam, g)
                         - cplx(0, 1) * phi * g * std::pow(lam, g - 1.0) * (A - B);
            H = pre * D;
        }
        return H - cplx(0, 0.5) * p_.sigma2 * phi; // centering: k1 = -Sigma2/2 per year
    }

    cplx evaluate(cplx phi, double t) const override {
        if (!(t > 0)) throw std::invalid_argument("TldModel: t must be > 0");
        return std::exp(t * hamiltonian(phi));
    }
    Strip strip(double) const override { return {-p_.lambda, p_.lambda}; }
    CumulantSet cumulants(double t) const override {
        const double g = p_.gamma, lam = p_.lambda;
        const double k2 = p_.sigma2 * t;
        const double zeta = p_.beta * (2.0 - g) / (lam * std::sqrt(k2));
        const double kappa = (2.0 - g) * (3.0 - g) / (lam * lam * k2);
        return {-0.5 * k2, k2, zeta * std::pow(k2, 1.5), kappa * k2 * k2};
    }
    double mu() const override { return mu_; }
    std::string name() const override { return "tld"; }
    const TldParams& params() const { return p_; }
    // E[e^x] (and therefore the expected-shortfall integral) diverges
    // unless the exponential cutoff exceeds 1
    bool es_finite() const { return p_.lambda > 1.0; }

private:
    TldParams p_;
    double mu_;
};

// --------------------------------------------------------------- Heston

struct HestonParams {
    double sigma2; // stationary variance level, per year
    double alpha;  // mean-reversion rate, 1/year
    double k;      // vol-of-vol
    double rho;    // correlation in (-1,1)
    double mu;     // annualized drift
};

class HestonModel final : public EcfModel {
public:
    explicit HestonModel(HestonParams p) : p_(p) {
        if (!(p.sigma2 > 0 && p.alpha > 0 && p.k > 0))
            throw std::invalid_argument("HestonModel: sigma2, alpha, k must be > 0");
        if (!(std::abs(p.rho) < 1))
            throw std::invalid_argument("HestonModel: rho must be in (-1,1)");
    }

    bool feller_ok() const { return 2.0 * p_.alpha * p_.sigma2 > p_.k * p_.k; }

    // stationary-start CGF in the numerically stable "minus" form
    cplx cgf(cplx phi, double t) const {
        const double al = p_.alpha, k = p_.k, rho = p_.rho, s2 = p_.sigma2;
        const cplx xi = al - cplx(0, 1) * rho * k * phi;
        const cplx eta = std::sqrt(xi * xi + k * k * phi * (cplx(0, 1) + phi));
        const cplx g = (xi - eta) / (xi + eta);
        const cplx e = std::exp(-eta * t);
        return (al * s2 / (k * k)) * ((xi - eta) * t - 2.0 * std::log((1.0 - g * e) / (1.0 - g)))
             + (s2 * (xi - eta) / (k * k)) * (1.0 - e) / (1.0 - g * e);
    }

    cplx evaluate(cplx phi, double t) const override {
        if (!(t > 0)) throw std::invalid_argument("HestonModel: t must be > 0");
        if (phi == cplx(0, 0)) return 1.0;
        return std::exp(cgf(phi, t));
    }

    // analytic strip bound from the parabola eta^2(i nu) =
    // alpha^2 + (2 alpha rho - k) k nu - k^2 (1-rho^2) nu^2
    double nu_plus_analytic() const {
        const double al = p_.alpha, k = p_.k, rho = p_.rho;
        const double b = 2.0 * al * rho - k;
        return (b + std::sqrt(b * b + 4.0 * al * al * (1.0 - rho * rho)))
             / (2.0 * k * (1.0 - rho * rho));
    }
    double nu_minus_analytic() const {
        const double al = p_.alpha, k = p_.k, rho = p_.rho;
        const double b = 2.0 * al * rho - k;
        return (b - std::sqrt(b * b + 4.0 * al * al * (1.0 - rho * rho)))
             / (2.0 * k * (1.0 - rho * rho));
    }

    Strip strip(double t) const override {
        return {refine_bound(nu_minus_analytic(), t),
                refine_bound(nu_plus_analytic(), t)};
    }

    // corrected closed-form cumulants of the stationary-start model,
    // validated against high-precision derivatives of the CGF
    CumulantSet cumulants(double t) const override {
        const double s2 = p_.sigma2, al = p_.alpha, k = p_.k, rho = p_.rho;
        const double e1 = std::exp(-al * t), e2 = e1 * e1, e3 = e2 * e1, e4 = e2 * e2;
        const double k_2 = k * k, k_3 = k_2 * k, k_4 = k_2 * k_2;
        const double al2 = al * al, al3 = al2 * al, al4 = al2 * al2;
        const double r2 = rho * rho;

        const double k1 = -0.5 * s2 * t;
        const double k2 = s2 / (8.0 * al3) *
            (-k_2 * e2 + 4.0 * k * e1 * (k - 2.0 * al * rho)
             + 2.0 * al * t * (4.0 * al2 + k_2 - 4.0 * al * k * rho)
             + k * (8.0 * al * rho - 3.0 * k));
        const double k3 = k * s2 / (8.0 * al4 * al) *
            (k_3 * e3
             - 3.0 * al * k * e2 * (-k * t * (k - 2.0 * al * rho) - 2.0 * (al - k * rho))
             - 3.0 * e1 * (2.0 * al * k * t * (k - 2.0 * al * rho) * (k - 2.0 * al * rho)
                           + 3.0 * k_3 - 8.0 * al3 * rho - 16.0 * al * k_2 * rho
                           + 8.0 * al2 * k * (1.0 + 2.0 * r2))
             + 3.0 * al * t * (-k_3 + 8.0 * al3 * rho + 6.0 * al * k_2 * rho
                               - 4.0 * al2 * k * (1.0 + 2.0 * r2))
             + 8.0 * k_3 - 24.0 * al3 * rho - 42.0 * al * k_2 * rho
             + 6.0 * al2 * k * (3.0 + 8.0 * r2));
        const double c1 = k - 2.0 * al * rho;
        const double k4 = 3.0 * k_2 * s2 / (64.0 * al4 * al3) *
            (-3.0 * k_4 * e4
             - 8.0 * k_2 * e3 * (2.0 * al * k * t * c1 + 4.0 * al2 + k_2 - 6.0 * al * k * rho)
             - 4.0 * e2 * (4.0 * al2 * k_2 * t * t * c1 * c1
                           + 2.0 * al * k * t * (k_3 - 16.0 * al3 * rho - 12.0 * al * k_2 * rho
                                                 + 4.0 * al2 * k * (3.0 + 4.0 * r2))
                           + 8.0 * al4 - 3.0 * k_4 - 32.0 * al3 * k * rho
                           + 8.0 * al * k_3 * rho + 16.0 * al2 * k_2 * r2)
             - 8.0 * e1 * (-2.0 * al2 * k * t * t * c1 * c1 * c1
                           - 8.0 * al * t * (k_4 - 7.0 * al * k_3 * rho + 4.0 * al4 * r2
                                             - 8.0 * al3 * k * rho * (1.0 + r2)
                                             + al2 * k_2 * (3.0 + 14.0 * r2))
                           - 9.0 * k_4 + 70.0 * al * k_3 * rho
                           + 32.0 * al3 * k * rho * (4.0 + 3.0 * r2)
                           - 16.0 * al4 * (1.0 + 4.0 * r2)
                           - 4.0 * al2 * k_2 * (9.0 + 40.0 * r2))
             + 4.0 * al * t * (5.0 * k_4 - 40.0 * al * k_3 * rho
                               - 32.0 * al3 * k * rho * (3.0 + 2.0 * r2)
                               + 16.0 * al4 * (1.0 + 4.0 * r2)
                               + 24.0 * al2 * k_2 * (1.0 + 4.0 * r2))
             - 73.0 * k_4 + 544.0 * al * k_3 * rho
             + 128.0 * al3 * k * rho * (7.0 + 6.0 * r2)
             - 32.0 * al4 * (3.0 + 16.0 * r2)
             - 64.0 * al2 * k_2 * (4.0 + 19.0 * r2));
        return {k1, k2, k3, k4};
    }

    double mu() const override { return p_.mu; }
    std::string name() const override { return "heston"; }
    const HestonParams& params() const { return p_; }

private:
    // scan (0, bound) [or (bound, 0)] for zeros of 1 - g(i nu) e^{-eta(i nu) t};
    // the first crossing tightens the analytic bound (moment explosion)
    double refine_bound(double analytic, double t) const {
        const int n_scan = 1024;
        auto h = [&](double nu) {
            const cplx v = indicator(nu, t);
            return v.real();
        };
        const double eps = std::abs(analytic) * 1e-9;
        double prev_nu = 0.0;
        double prev_h = 1.0; // at nu=0: g=0 -> h=1
        for (int i = 1; i <= n_scan; ++i) {
            const double nu = analytic * (static_cast<double>(i) / n_scan)
                            - ((analytic > 0) ? eps : -eps) * (i == n_scan);
            const double hv = h(nu);
            if (std::isfinite(hv) && hv <= 0.0) {
                double lo = prev_nu, hi = nu;
                for (int b = 0; b < 100; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    if (h(mid) > 0.0) lo = mid; else hi = mid;
                }
                return 0.5 * (lo + hi);
            }
            prev_nu = nu;
            prev_h = hv;
            (void)prev_h;
        }
        return analytic;
    }
    cplx indicator(double nu, double t) const {
        const double al = p_.alpha, k = p_.k, rho = p_.rho;
        const cplx phi(0.0, nu);
        const cplx xi = al - cplx(0, 1) * rho * k * phi;
        const cplx eta = std::sqrt(xi * xi + k * k * phi * (cplx(0, 1) + phi));
        const cplx g = (xi - eta) / (xi + eta);
        return 1.0 - g * std::exp(-eta * t);
    }

    HestonParams p_;
};

// damping contour choice: 1 when comfortably inside the strip, else midway
inline double nu_default(const EcfModel& model, double t, double margin = 0.05) {
    const Strip s = model.strip(t);
    if (!(s.nu_plus > 0))
        throw std::invalid_argument("nu_default: invalid strip (nu_plus <= 0)");
    return (s.nu_plus > 1.0 + margin) ? 1.0 : 0.5 * s.nu_plus;
}

} // namespace frisk
