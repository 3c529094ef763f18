#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace hep {

struct GlRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;  // weights
};

// Gauss-Legendre rule of order n on [-1,1], computed once and cached.
inline const GlRule& gl_rule(int n) {
    if (n < 1) throw std::invalid_argument("gl_rule: order must be positive");
    static std::map<int, GlRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev-based initial guess.
        long double x = std::cos(M_PI * (i + 0.75L) / (n + 0.5L));
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1.0L, p1 = x;
            for (int k = 2; k <= n; ++k) {
                long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
            long double dx = p1 / dp;
            x -= dx;
            if (std::fabs((double)dx) < 1e-17) break;
        }
        long double p0 = 1.0L, p1 = x;
        for (int k = 2; k <= n; ++k) {
            long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
        r.x[n - 1 - i] = (double)x;
        r.w[n - 1 - i] = (double)(2.0L / ((1.0L - x * x) * dp * dp));
    }
    return cache.emplace(n, std::move(r)).first->second;
}

// Nodes/weights of a composite rule on [a,b] with the given panel count.
inline void gl_panels(double a, double b, int panels, int order,
                      std::vector<double>& xs, std::vector<double>& ws) {
    const GlRule& r = gl_rule(order);
    xs.clear();
    ws.clear();
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h;
        for (int i = 0; i < order; ++i) {
            xs.push_back(c + 0.5 * h * r.x[i]);
            ws.push_back(0.5 * h * r.w[i]);
        }
    }
}

}  // namespace hep
