#ifndef TREELIKE_STATS_HPP
#define TREELIKE_STATS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace treelike::stats {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double r_squared = 0.0;
    double residual_sum_squares = 0.0;
};

/// Ordinary (optionally weighted) least squares y = intercept + slope x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w = {})
{
    const std::size_t n = x.size();
    if (n != y.size() || (!w.empty() && w.size() != n)) throw std::invalid_argument("fit_line: size mismatch");
    if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
    auto weight = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };

    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += weight(i);
        sx += weight(i) * x[i];
        sy += weight(i) * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += weight(i) * (x[i] - mx) * (x[i] - mx);
        sxy += weight(i) * (x[i] - mx) * (y[i] - my);
        syy += weight(i) * (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");

    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        f.residual_sum_squares += weight(i) * r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - f.residual_sum_squares / syy : 1.0;
    if (n > 2) {
        const double sigma2 = f.residual_sum_squares / static_cast<double>(n - 2);
        f.slope_stderr = std::sqrt(sigma2 / sxx);
        f.intercept_stderr = std::sqrt(sigma2 * (1.0 / sw + mx * mx / sxx));
    }
    return f;
}

inline double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: need matching samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

/// Kolmogorov-Smirnov distance sup |F_emp - F| of a sample to a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

}  // namespace treelike::stats

#endif
