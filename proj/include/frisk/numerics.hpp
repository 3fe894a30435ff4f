#pragma once

// Numerical building blocks: radix-2 FFT, monotone cubic (Fritsch-Carlson)
// interpolation, Brent root finding, adaptive trapezoidal quadrature with
// Richardson acceleration, weighted linear least squares.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace frisk {

using cplx = std::complex<double>;

// ---------------------------------------------------------------- FFT

// In-place radix-2 DFT, power-of-two length.
// sign=+1: X_k = sum_m x_m exp(+2*pi*i*m*k/N); sign=-1 the conjugate kernel.
// No 1/N normalization is applied.
inline void fft(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // per-call twiddle table: w[j] = exp(sign*2*pi*i*j/n), j < n/2
    std::vector<cplx> w(n / 2);
    const double base = sign * 6.283185307179586476925286766559 / static_cast<double>(n);
    for (std::size_t j = 0; j < n / 2; ++j)
        w[j] = std::polar(1.0, base * static_cast<double>(j));
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1, stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + half] * w[j * stride];
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
}

// ------------------------------------------------- monotone cubic (PCHIP)

// Fritsch-Carlson shape-preserving cubic Hermite interpolant.
// Requires strictly increasing x; preserves monotonicity of y.
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("Pchip: need >= 2 aligned points");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("Pchip: x must be strictly increasing");
        d_.resize(n);
        if (n == 2) {
            d_[0] = d_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        std::vector<double> h(n - 1), s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] * s[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
        d_[0] = edge_slope(h[0], h[1], s[0], s[1]);
        d_[n - 1] = edge_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    }

    double operator()(double xq) const {
        // out-of-range queries extrapolate with the boundary cubic
        std::size_t i = segment(xq);
        const double h = x_[i + 1] - x_[i];
        const double u = (xq - x_[i]) / h;
        const double u2 = u * u, u3 = u2 * u;
        const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
        const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    static double edge_slope(double h0, double h1, double s0, double s1) {
        // one-sided three-point estimate, limited for shape preservation
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) return 0.0;
        if (s0 * s1 <= 0.0 && std::abs(d) > 3.0 * std::abs(s0)) return 3.0 * s0;
        return d;
    }
    std::size_t segment(double xq) const {
        if (xq <= x_.front()) return 0;
        if (xq >= x_.back()) return x_.size() - 2;
        auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        return static_cast<std::size_t>(it - x_.begin()) - 1;
    }
    std::vector<double> x_, y_, d_;
};

// ---------------------------------------------------------- root finding

// Brent's method on [a,b]; f(a), f(b) must bracket a root.
inline double brent_root(const std::function<double(double)>& f,
                         double a, double b,
                         double xtol = 1e-14, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw std::invalid_argument("brent_root: endpoints do not bracket a root");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m; // bisection
        } else {
            double p, q, r, s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                q = fa / fc; r = fb / fc;
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) { c = a; fc = fa; d = e = b - a; }
    }
    return b;
}

// ------------------------------------------------- adaptive quadrature

namespace detail {
inline double adapt_trap(const std::function<double(double)>& f,
                         double a, double b, double fa, double fb,
                         double whole, double tol, int depth, long& budget) {
    if (--budget < 0)
        throw std::runtime_error("adaptive_trapezoid: panel budget exhausted");
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double left = 0.25 * (b - a) * (fa + fm);
    const double right = 0.25 * (b - a) * (fm + fb);
    const double refined = left + right;
    // Richardson: trapezoid error contracts by 4 per halving
    if (depth <= 0 || std::abs(refined - whole) <= 3.0 * tol)
        return refined + (refined - whole) / 3.0;
    return adapt_trap(f, a, m, fa, fm, left, 0.5 * tol, depth - 1, budget)
         + adapt_trap(f, m, b, fm, fb, right, 0.5 * tol, depth - 1, budget);
}
} // namespace detail

// Adaptive trapezoidal integration of f over [a,b] to absolute tolerance tol.
// Starts from n0 equal panels so oscillatory integrands are seen before the
// first convergence test.
inline double adaptive_trapezoid(const std::function<double(double)>& f,
                                 double a, double b, double tol,
                                 int n0 = 256, int max_depth = 40,
                                 long budget = 4'000'000) {
    if (!(b > a)) throw std::invalid_argument("adaptive_trapezoid: need b > a");
    const double h = (b - a) / n0;
    double total = 0.0;
    double x0 = a, f0 = f(a);
    for (int i = 0; i < n0; ++i) {
        const double x1 = (i + 1 == n0) ? b : a + (i + 1) * h;
        const double f1 = f(x1);
        const double whole = 0.5 * (x1 - x0) * (f0 + f1);
        total += detail::adapt_trap(f, x0, x1, f0, f1, whole, tol / n0,
                                    max_depth, budget);
        x0 = x1; f0 = f1;
    }
    return total;
}

// ----------------------------------------------- weighted least squares

struct LineFit {
    double slope = 0, intercept = 0;
    double slope_err = 0, intercept_err = 0;
    double chi2 = 0;
};

// Minimizes sum ((y - a - b*x)/e)^2; closed-form normal equations.
inline LineFit weighted_linear_fit(const std::vector<double>& x,
                                   const std::vector<double>& y,
                                   const std::vector<double>& e) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n || e.size() != n)
        throw std::invalid_argument("weighted_linear_fit: need >= 2 aligned points");
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(e[i] > 0)) throw std::invalid_argument("weighted_linear_fit: errors must be > 0");
        const double w = 1.0 / (e[i] * e[i]);
        S += w; Sx += w * x[i]; Sy += w * y[i];
        Sxx += w * x[i] * x[i]; Sxy += w * x[i] * y[i];
    }
    const double det = S * Sxx - Sx * Sx;
    if (!(std::abs(det) > 0))
        throw std::invalid_argument("weighted_linear_fit: degenerate x");
    LineFit r;
    r.slope = (S * Sxy - Sx * Sy) / det;
    r.intercept = (Sxx * Sy - Sx * Sxy) / det;
    r.slope_err = std::sqrt(S / det);
    r.intercept_err = std::sqrt(Sxx / det);
    for (std::size_t i = 0; i < n; ++i) {
        const double res = (y[i] - r.intercept - r.slope * x[i]) / e[i];
        r.chi2 += res * res;
    }
    return r;
}

// Fixed-zero-intercept weighted fit of y = b*x.
inline std::pair<double, double>
weighted_fit_through_origin(const std::vector<double>& x,
                            const std::vector<double>& y,
                            const std::vector<double>& e) {
    double num = 0, den = 0;
    if (x.size() != y.size() || x.size() != e.size() || x.empty())
        throw std::invalid_argument("weighted_fit_through_origin: aligned nonempty inputs required");
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / (e[i] * e[i]);
        num += w * x[i] * y[i];
        den += w * x[i] * x[i];
    }
    if (!(den > 0)) throw std::invalid_argument("weighted_fit_through_origin: degenerate x");
    return {num / den, std::sqrt(1.0 / den)};
}

// --------------------------------------------------- bounded parallelism

// Runs fn(i) for i in [0, n) on at most `budget` worker threads.
// Deterministic result placement is the caller's job (index-addressed output).
inline void run_parallel(std::size_t n, unsigned budget,
                         const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = std::max(1u, std::min({budget, hw ? hw : 1u,
                                              static_cast<unsigned>(n)}));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mtx;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace frisk
