#pragma once

// Derivative-free simplex (Nelder-Mead) minimizer.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace frisk {

struct NmResult {
    std::vector<double> x;
    double fval = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

inline NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                            std::vector<double> x0,
                            double step = 0.5,
                            int max_iter = 2000,
                            double ftol = 1e-12,
                            double xtol = 1e-10) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

    std::vector<std::vector<double>> s(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        s[i + 1][i] += (x0[i] != 0.0 ? std::abs(x0[i]) * step : step);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]);

    NmResult res;
    std::vector<std::size_t> ord(n + 1);
    auto resort = [&] {
        for (std::size_t i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    for (int it = 0; it < max_iter; ++it) {
        resort();
        res.iterations = it;
        const std::size_t best = ord[0], worst = ord[n], second = ord[n - 1];
        // convergence: function spread and simplex size
        double xspread = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            xspread = std::max(xspread, std::abs(s[worst][i] - s[best][i]));
        if (std::abs(fv[worst] - fv[best])
                <= ftol * (std::abs(fv[best]) + ftol) && xspread <= xtol) {
            res.converged = true;
            break;
        }
        // centroid of all but worst
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) c[d] += s[i][d];
        }
        for (double& v : c) v /= static_cast<double>(n);

        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = c[d] + coef * (s[worst][d] - c[d]);
            return p;
        };
        std::vector<double> xr = point(-1.0);
        const double fr = f(xr);
        if (fr < fv[ord[0]]) {
            std::vector<double> xe = point(-2.0);
            const double fe = f(xe);
            if (fe < fr) { s[worst] = std::move(xe); fv[worst] = fe; }
            else         { s[worst] = std::move(xr); fv[worst] = fr; }
        } else if (fr < fv[second]) {
            s[worst] = std::move(xr); fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            std::vector<double> xc = point(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[worst])) {
                s[worst] = std::move(xc); fv[worst] = fc;
            } else { // shrink toward best
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        s[i][d] = s[best][d] + 0.5 * (s[i][d] - s[best][d]);
                    fv[i] = f(s[i]);
                }
            }
        }
    }
    resort();
    res.x = s[ord[0]];
    res.fval = fv[ord[0]];
    return res;
}

} // namespace frisk
