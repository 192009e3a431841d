#ifndef TREELIKE_LIGHTCONE_HPP
#define TREELIKE_LIGHTCONE_HPP

// Polynomial lower bounds a d^b <= t_eps and polylog upper bounds
// t_eps <= a_u d^{b_u} (log d)^{c_u} on single-magnon threshold times.

#include <treelike/geometry.hpp>
#include <treelike/magnon.hpp>
#include <treelike/stats.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace treelike {

enum class DistanceKind { Physical, Monna };

inline std::string to_string(DistanceKind k) { return k == DistanceKind::Physical ? "physical" : "monna"; }

/// Monna distance for s > 0, physical distance otherwise.
inline DistanceKind natural_distance_kind(double s) { return s > 0.0 ? DistanceKind::Monna : DistanceKind::Physical; }

struct DistancePoint {
    double distance;
    double t_eps;
};

/// One point per reached site j != source, at d = |i - j| or d_M = M(d).
struct ThresholdProfile {
    std::vector<DistancePoint> points;
    std::size_t unreached = 0;
};

inline ThresholdProfile threshold_profile(const CouplingModel& model, std::size_t source, const ThresholdTimes& times,
                                          DistanceKind kind)
{
    ThresholdProfile prof;
    for (std::size_t j = 0; j < model.n_sites(); ++j) {
        if (j == source) continue;
        if (!times.reached(j)) {
            ++prof.unreached;
            continue;
        }
        std::size_t d = model.archimedean_distance(source, j);
        if (kind == DistanceKind::Monna) d = monna_map(model.n_sites(), d);
        prof.points.push_back({static_cast<double>(d), times.t_eps[j]});
    }
    return prof;
}

/// Minimum t_eps at each power-of-two distance.
inline std::vector<DistancePoint> fastest_points(const std::vector<DistancePoint>& points)
{
    std::map<double, double> best;
    for (const auto& p : points) {
        const auto d = static_cast<std::uint64_t>(p.distance);
        if (static_cast<double>(d) != p.distance || !is_power_of_two(d)) continue;
        auto [it, inserted] = best.try_emplace(p.distance, p.t_eps);
        if (!inserted) it->second = std::min(it->second, p.t_eps);
    }
    std::vector<DistancePoint> out;
    for (const auto& [d, t] : best) out.push_back({d, t});
    return out;
}

/// Maximum t_eps in each bin d in [2^n, 2^{n+1}) for n >= 1.  The bin at
/// d = 1 is dropped since (log d)^c vanishes there.
inline std::vector<DistancePoint> slowest_points(const std::vector<DistancePoint>& points)
{
    std::map<int, DistancePoint> worst;
    for (const auto& p : points) {
        if (p.distance < 2.0) continue;
        const int bin = static_cast<int>(std::floor(std::log2(p.distance)));
        auto [it, inserted] = worst.try_emplace(bin, p);
        if (!inserted && p.t_eps > it->second.t_eps) it->second = p;
    }
    std::vector<DistancePoint> out;
    for (const auto& [bin, p] : worst) out.push_back(p);
    return out;
}

struct LowerFit {
    double a = 0.0;
    double b = 0.0;
    /// Unclamped log-log slope.
    double raw_slope = 0.0;
    double residual = 0.0;
};

/// Least squares in log-log space for the exponent (clamped at 0), then the
/// largest prefactor that keeps a d^b at or below every point.
inline LowerFit fit_lower(const std::vector<DistancePoint>& points)
{
    if (points.size() < 3) throw std::invalid_argument("fit_lower: need at least 3 points");
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (!(p.distance >= 1.0) || !(p.t_eps > 0.0)) throw std::invalid_argument("fit_lower: need d >= 1 and t > 0");
        x.push_back(std::log(p.distance));
        y.push_back(std::log(p.t_eps));
    }
    const auto line = stats::fit_line(x, y);
    LowerFit f;
    f.raw_slope = line.slope;
    f.b = std::max(0.0, line.slope);
    double log_a = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) log_a = std::min(log_a, y[k] - f.b * x[k]);
    f.a = std::exp(log_a);
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - log_a - f.b * x[k];
        f.residual += r * r;
    }
    return f;
}

struct UpperFit {
    double a_u = 0.0;
    double b_u = 0.0;
    double c_u = 0.0;
    double residual = 0.0;
    bool feasible = false;
};

struct UpperFitOptions {
    double tolerance = 1e-12;
    int max_sweeps = 200000;
    std::vector<double> penalties{1.0, 1e2, 1e4, 1e6, 1e8};
};

namespace detail {

// Exact minimizer of the convex piecewise quadratic
//   g(x) = sum_k (u_k + v_k x)^2 + mu sum_k max(0, -(u_k + v_k x))^2
// over x >= lower, where u_k + v_k x is the log-space gap curve - point.
inline double minimize_coordinate(const std::vector<double>& u, const std::vector<double>& v, double mu, double lower)
{
    auto derivative = [&](double x) {
        double g = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double r = u[k] + v[k] * x;
            g += 2.0 * v[k] * r * (r < 0.0 ? 1.0 + mu : 1.0);
        }
        return g;
    };
    std::vector<double> breaks;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (v[k] != 0.0) breaks.push_back(-u[k] / v[k]);
    }
    std::sort(breaks.begin(), breaks.end());

    // derivative is nondecreasing and linear between breakpoints
    double lo = -std::numeric_limits<double>::infinity();
    for (double bp : breaks) {
        if (derivative(bp) >= 0.0) break;
        lo = bp;
    }
    // solve on the linear piece beyond `lo`: pick a probe point inside it
    double hi = lo;
    for (double bp : breaks) {
        if (bp > lo) {
            hi = bp;
            break;
        }
    }
    double probe;
    if (std::isinf(lo) && hi == lo) {
        probe = 0.0;
    } else if (std::isinf(lo)) {
        probe = hi - 1.0;
    } else if (hi == lo) {
        probe = lo + 1.0;
    } else {
        probe = 0.5 * (lo + hi);
    }
    double slope = 0.0, offset = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double r = u[k] + v[k] * probe;
        const double w = 2.0 * (r < 0.0 ? 1.0 + mu : 1.0);
        slope += w * v[k] * v[k];
        offset += w * v[k] * u[k];
    }
    const double x = slope > 0.0 ? -offset / slope : probe;
    return std::max(x, lower);
}

}  // namespace detail

/// Minimizes sum_k (log f(d_k) - log t_k)^2 over (log a_u, b_u, c_u) subject to
/// f(d_k) >= t_k, a_u >= a, b_u >= b and all coefficients >= 0.
///
/// Multi-start coordinate descent with an exterior penalty of increasing
/// weight; the final curve is lifted by the largest remaining violation so
/// that it dominates every point exactly.
inline UpperFit fit_upper(const std::vector<DistancePoint>& slowest, const LowerFit& lower,
                          const UpperFitOptions& opt = {})
{
    if (slowest.empty()) throw std::invalid_argument("fit_upper: no slowest points (empty bins)");
    const std::size_t n = slowest.size();
    std::vector<std::array<double, 3>> features(n);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(slowest[k].distance > 1.0) || !(slowest[k].t_eps > 0.0))
            throw std::invalid_argument("fit_upper: need d > 1 and t > 0");
        const double ld = std::log(slowest[k].distance);
        features[k] = {1.0, ld, std::log(ld)};
        y[k] = std::log(slowest[k].t_eps);
    }
    const std::array<double, 3> bounds{std::log(std::max(lower.a, std::numeric_limits<double>::min())),
                                       std::max(0.0, lower.b), 0.0};
    auto gap = [&](const std::array<double, 3>& th, std::size_t k) {
        return th[0] * features[k][0] + th[1] * features[k][1] + th[2] * features[k][2] - y[k];
    };
    auto lift = [&](std::array<double, 3>& th) {
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, -gap(th, k));
        th[0] += worst;
    };
    auto objective = [&](const std::array<double, 3>& th) {
        double r = 0.0;
        for (std::size_t k = 0; k < n; ++k) r += gap(th, k) * gap(th, k);
        return r;
    };

    UpperFit best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (double b0 : {bounds[1], bounds[1] + 1.0, bounds[1] + 2.0}) {
        for (double c0 : {0.0, 1.0, 2.0, 4.0}) {
            std::array<double, 3> th{bounds[0], b0, c0};
            lift(th);
            std::vector<double> u(n), v(n);
            for (double mu : opt.penalties) {
                for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
                    double change = 0.0;
                    for (int c = 0; c < 3; ++c) {
                        for (std::size_t k = 0; k < n; ++k) {
                            v[k] = features[k][static_cast<std::size_t>(c)];
                            u[k] = gap(th, k) - v[k] * th[static_cast<std::size_t>(c)];
                        }
                        const double next = detail::minimize_coordinate(u, v, mu, bounds[static_cast<std::size_t>(c)]);
                        change = std::max(change, std::abs(next - th[static_cast<std::size_t>(c)]));
                        th[static_cast<std::size_t>(c)] = next;
                    }
                    if (change < opt.tolerance) break;
                }
            }
            lift(th);
            const double obj = objective(th);
            if (obj < best_obj) {
                best_obj = obj;
                best.a_u = std::exp(th[0]);
                best.b_u = th[1];
                best.c_u = th[2];
                best.residual = obj;
            }
        }
    }
    best.feasible = std::isfinite(best_obj) && best.a_u >= lower.a * (1.0 - 1e-12) && best.b_u >= lower.b &&
                    best.c_u >= 0.0;
    return best;
}

inline double upper_bound_curve(const UpperFit& f, double d)
{
    return f.a_u * std::pow(d, f.b_u) * std::pow(std::log(d), f.c_u);
}

inline double lower_bound_curve(const LowerFit& f, double d) { return f.a * std::pow(d, f.b); }

struct BoundFit {
    double s = 0.0;
    DistanceKind distance_kind = DistanceKind::Physical;
    double a = 0.0, b = 0.0;
    double a_u = 0.0, b_u = 0.0, c_u = 0.0;
    double lower_residual = 0.0;
    double upper_residual = 0.0;
    bool feasible = false;
    std::size_t unreached = 0;
    std::vector<DistancePoint> fastest;
    std::vector<DistancePoint> slowest;

    double residual() const { return lower_residual + upper_residual; }
};

inline BoundFit fit_bounds(const ThresholdProfile& profile, double s, DistanceKind kind,
                           const UpperFitOptions& opt = {})
{
    BoundFit f;
    f.s = s;
    f.distance_kind = kind;
    f.unreached = profile.unreached;
    f.fastest = fastest_points(profile.points);
    f.slowest = slowest_points(profile.points);
    const LowerFit lo = fit_lower(f.fastest);
    f.a = lo.a;
    f.b = lo.b;
    f.lower_residual = lo.residual;
    const UpperFit up = fit_upper(f.slowest, lo, opt);
    f.a_u = up.a_u;
    f.b_u = up.b_u;
    f.c_u = up.c_u;
    f.upper_residual = up.residual;
    f.feasible = up.feasible;
    return f;
}

struct LightconeOptions {
    double dt = 0.02;
    double tmax = 50.0;
    /// Threshold; <= 0 selects 1/N^2.
    double epsilon = 0.0;
};

/// Threshold times for a magnon released at N/2.
inline ThresholdTimes simulate_thresholds(const CouplingModel& model, const LightconeOptions& opt = {})
{
    const std::size_t source = model.n_sites() / 2;
    const double eps = opt.epsilon > 0.0 ? opt.epsilon : 1.0 / static_cast<double>(model.n_sites() * model.n_sites());
    const auto ev = evolve_magnon(model, source, make_time_grid(opt.tmax, opt.dt));
    return threshold_times(model, ev, eps);
}

inline BoundFit lightcone_fit(const CouplingModel& model, DistanceKind kind, const LightconeOptions& opt = {})
{
    const auto times = simulate_thresholds(model, opt);
    return fit_bounds(threshold_profile(model, model.n_sites() / 2, times, kind), model.s(), kind);
}

}  // namespace treelike

#endif
