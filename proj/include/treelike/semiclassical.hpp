#ifndef TREELIKE_SEMICLASSICAL_HPP
#define TREELIKE_SEMICLASSICAL_HPP

// Large-S limit of the flip-flop model: unit vectors x_i precess in the
// field h_i = sum_j h_ij (x_j^x, x_j^y, 0),
//   dx_i/dt = h_i x x_i,   E = sum_{i<j} h_ij (x_i^x x_j^x + x_i^y x_j^y),
// with h_ij the bond hopping of the spin-1/2 Hamiltonian, so that time is
// measured in the same units as the quantum dynamics.

#include <treelike/geometry.hpp>
#include <treelike/parallel.hpp>
#include <treelike/stats.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace treelike {

/// N unit vectors stored component-wise.
struct SpinField {
    std::vector<double> x, y, z;

    SpinField() = default;
    explicit SpinField(std::size_t n) : x(n, 0.0), y(n, 0.0), z(n, 0.0) {}

    std::size_t size() const { return x.size(); }
};

/// Spins along independent uniformly random directions in the xy-plane.
template <typename Rng>
SpinField random_planar_spins(std::size_t n, Rng& rng)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    SpinField s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = angle(rng);
        s.x[i] = std::cos(a);
        s.y[i] = std::sin(a);
    }
    return s;
}

/// Rotates spin `site` by `phi` about the z axis.
inline void rotate_about_z(SpinField& s, std::size_t site, double phi)
{
    const double c = std::cos(phi), sn = std::sin(phi);
    const double x = s.x[site], y = s.y[site];
    s.x[site] = c * x - sn * y;
    s.y[site] = sn * x + c * y;
}

class ClassicalDynamics {
public:
    explicit ClassicalDynamics(const CouplingModel& model) : n_(model.n_sites()), offsets_(n_ + 1, 0)
    {
        for (std::size_t i = 0; i < n_; ++i) {
            for (const auto& nb : model.neighbors(i)) {
                sites_.push_back(static_cast<std::uint32_t>(nb.site));
                hopping_.push_back(nb.hopping);
            }
            offsets_[i + 1] = sites_.size();
        }
        scale_ = model.total_bond_strength();
        work_ = {SpinField(n_), SpinField(n_), SpinField(n_), SpinField(n_), SpinField(n_)};
    }

    std::size_t n_sites() const { return n_; }
    /// Sum of bond hoppings, the natural energy scale.
    double energy_scale() const { return scale_; }

    void rhs(const SpinField& s, SpinField& out) const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            double hx = 0.0, hy = 0.0;
            for (std::size_t q = offsets_[i]; q < offsets_[i + 1]; ++q) {
                hx += hopping_[q] * s.x[sites_[q]];
                hy += hopping_[q] * s.y[sites_[q]];
            }
            out.x[i] = hy * s.z[i];
            out.y[i] = -hx * s.z[i];
            out.z[i] = hx * s.y[i] - hy * s.x[i];
        }
    }

    double energy(const SpinField& s) const
    {
        double e = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t q = offsets_[i]; q < offsets_[i + 1]; ++q) {
                const std::size_t j = sites_[q];
                e += hopping_[q] * (s.x[i] * s.x[j] + s.y[i] * s.y[j]);
            }
        }
        return 0.5 * e;
    }

    static double magnetization(const SpinField& s)
    {
        double m = 0.0;
        for (double v : s.z) m += v;
        return m;
    }

    /// One classical RK4 step followed by renormalization.  Returns the
    /// largest deviation of |x_i| from 1 before renormalizing.
    double step(SpinField& s, double dt)
    {
        auto& [k1, k2, k3, k4, tmp] = work_;
        rhs(s, k1);
        stage(s, k1, 0.5 * dt, tmp);
        rhs(tmp, k2);
        stage(s, k2, 0.5 * dt, tmp);
        rhs(tmp, k3);
        stage(s, k3, dt, tmp);
        rhs(tmp, k4);
        const double w = dt / 6.0;
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double x = s.x[i] + w * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
            double y = s.y[i] + w * (k1.y[i] + 2.0 * k2.y[i] + 2.0 * k3.y[i] + k4.y[i]);
            double z = s.z[i] + w * (k1.z[i] + 2.0 * k2.z[i] + 2.0 * k3.z[i] + k4.z[i]);
            const double norm = std::sqrt(x * x + y * y + z * z);
            if (!std::isfinite(norm) || norm == 0.0) throw std::runtime_error("ClassicalDynamics: integration diverged");
            worst = std::max(worst, std::abs(norm - 1.0));
            s.x[i] = x / norm;
            s.y[i] = y / norm;
            s.z[i] = z / norm;
        }
        return worst;
    }

private:
    void stage(const SpinField& s, const SpinField& k, double h, SpinField& out) const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            out.x[i] = s.x[i] + h * k.x[i];
            out.y[i] = s.y[i] + h * k.y[i];
            out.z[i] = s.z[i] + h * k.z[i];
        }
    }

    std::size_t n_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> sites_;
    std::vector<double> hopping_;
    double scale_ = 0.0;
    std::array<SpinField, 5> work_;
};

struct SensitivityOptions {
    std::size_t trajectories = 256;
    double phi = 1e-4;
    double tmax = 6.0;
    double dt = 0.005;
    /// Steps between recorded samples.
    std::size_t record_every = 10;
    std::uint64_t seed = 20190101;
    std::size_t threads = 0;
};

/// C_cl(r, t), the ensemble and pair average of (dx_j^z / dphi_i)^2 over
/// pairs at graph distance r.
struct SensitivityCurve {
    std::size_t n_sites = 0;
    double s = 0.0;
    double phi = 0.0;
    std::size_t trajectories = 0;
    std::vector<double> times;
    /// values[r][k] and standard_error[r][k], r = 0 .. max_distance.
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> standard_error;
    /// Number of sites at each graph distance from a source.
    std::vector<std::size_t> pair_counts;
    double max_norm_error = 0.0;
    double max_energy_drift = 0.0;
    double max_magnetization_drift = 0.0;

    std::size_t max_distance() const { return values.empty() ? 0 : values.size() - 1; }
};

namespace detail {

struct TrajectorySample {
    std::vector<std::vector<double>> c;  // [r][k]
    double norm_error = 0.0;
    double energy_drift = 0.0;
    double magnetization_drift = 0.0;
};

}  // namespace detail

/// Seed of trajectory `index`, independent of the thread schedule.
inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::size_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
    return std::mt19937_64(seq);
}

inline SensitivityCurve run_sensitivity(const CouplingModel& model, const SensitivityOptions& opt = {})
{
    if (model.boundary() != Boundary::Periodic) throw std::invalid_argument("run_sensitivity: requires periodic boundary");
    if (opt.trajectories < 2) throw std::invalid_argument("run_sensitivity: need at least two trajectories");
    if (!(opt.phi > 0.0) || !(opt.dt > 0.0) || !(opt.tmax >= 0.0) || opt.record_every == 0)
        throw std::invalid_argument("run_sensitivity: phi, dt must be positive, tmax nonnegative");
    const std::size_t n = model.n_sites();
    const auto steps = static_cast<std::size_t>(std::llround(opt.tmax / opt.dt));
    const std::size_t samples = steps / opt.record_every + 1;

    // Graph distance depends on i - j only, so one BFS serves every source.
    const auto dist0 = graph_distances_from(model, 0);
    const std::size_t rmax = *std::max_element(dist0.begin(), dist0.end());
    std::vector<std::size_t> counts(rmax + 1, 0);
    for (auto d : dist0) ++counts[d];

    std::vector<detail::TrajectorySample> per(opt.trajectories);
    parallel_for(opt.trajectories, opt.threads, [&](std::size_t traj) {
        auto rng = trajectory_rng(opt.seed, traj);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        SpinField a = random_planar_spins(n, rng);
        const std::size_t source = pick(rng);
        SpinField b = a;
        rotate_about_z(b, source, opt.phi);
        ClassicalDynamics dyn_a(model), dyn_b(model);
        const double e0a = dyn_a.energy(a), e0b = dyn_b.energy(b);
        const double m0a = ClassicalDynamics::magnetization(a), m0b = ClassicalDynamics::magnetization(b);

        detail::TrajectorySample out;
        out.c.assign(rmax + 1, std::vector<double>(samples, 0.0));
        auto record = [&](std::size_t k) {
            for (std::size_t j = 0; j < n; ++j) {
                const double d = (b.z[j] - a.z[j]) / opt.phi;
                out.c[dist0[(j + n - source) % n]][k] += d * d;
            }
            for (std::size_t r = 0; r <= rmax; ++r) out.c[r][k] /= static_cast<double>(counts[r]);
            const double scale = dyn_a.energy_scale();
            out.energy_drift = std::max({out.energy_drift, std::abs(dyn_a.energy(a) - e0a) / scale, std::abs(dyn_b.energy(b) - e0b) / scale});
            out.magnetization_drift = std::max({out.magnetization_drift, std::abs(ClassicalDynamics::magnetization(a) - m0a) / static_cast<double>(n),
                                                std::abs(ClassicalDynamics::magnetization(b) - m0b) / static_cast<double>(n)});
        };
        record(0);
        for (std::size_t step = 1; step <= steps; ++step) {
            out.norm_error = std::max({out.norm_error, dyn_a.step(a, opt.dt), dyn_b.step(b, opt.dt)});
            if (step % opt.record_every == 0) record(step / opt.record_every);
        }
        per[traj] = std::move(out);
    });

    SensitivityCurve curve;
    curve.n_sites = n;
    curve.s = model.s();
    curve.phi = opt.phi;
    curve.trajectories = opt.trajectories;
    curve.pair_counts = counts;
    curve.times.resize(samples);
    for (std::size_t k = 0; k < samples; ++k) curve.times[k] = static_cast<double>(k * opt.record_every) * opt.dt;
    curve.values.assign(rmax + 1, std::vector<double>(samples, 0.0));
    curve.standard_error.assign(rmax + 1, std::vector<double>(samples, 0.0));
    const auto t = static_cast<double>(opt.trajectories);
    for (std::size_t r = 0; r <= rmax; ++r) {
        for (std::size_t k = 0; k < samples; ++k) {
            double sum = 0.0, sq = 0.0;
            for (const auto& p : per) {
                sum += p.c[r][k];
                sq += p.c[r][k] * p.c[r][k];
            }
            const double mean = sum / t;
            curve.values[r][k] = mean;
            curve.standard_error[r][k] = std::sqrt(std::max(0.0, sq / t - mean * mean) / (t - 1.0));
        }
    }
    for (const auto& p : per) {
        curve.max_norm_error = std::max(curve.max_norm_error, p.norm_error);
        curve.max_energy_drift = std::max(curve.max_energy_drift, p.energy_drift);
        curve.max_magnetization_drift = std::max(curve.max_magnetization_drift, p.magnetization_drift);
    }
    return curve;
}

/// Plateau of the finite-difference sensitivity once the perturbed and
/// unperturbed trajectories decorrelate, 2 <z^2> / phi^2 with <z^2> = 1/3.
inline double saturation_value(double phi) { return 2.0 / (3.0 * phi * phi); }

struct ScramblingWindow {
    double t_min = 1.0;
    /// Exponential window as fractions of the saturation value.
    double lower_fraction = 1e-4;
    double upper_fraction = 1e-1;
};

/// Lyapunov growth and scrambling time of one system size.
struct ScramblingPoint {
    std::size_t n_sites = 0;
    double lambda = 0.0;
    double lambda_stderr = 0.0;
    double t_star = 0.0;
    double window_begin = 0.0;
    double window_end = 0.0;
    std::size_t points = 0;
    double residual = 0.0;
    /// False when no exponential window or no crossing C = 1 was found.
    bool valid = false;

    double lambda_t_star() const { return lambda * t_star; }
};

struct ScramblingFit {
    std::vector<ScramblingPoint> sizes;
    /// lambda t* = alpha log N + beta over the valid sizes.
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_stderr = 0.0;
    double beta_stderr = 0.0;
    double residual = 0.0;
};

/// First time where `values` reaches `level`, interpolated in log C.
inline std::optional<double> first_crossing(const std::vector<double>& times, const std::vector<double>& values, double level)
{
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < level) continue;
        if (k == 0) return times[0];
        const double lo = values[k - 1], hi = values[k];
        if (lo <= 0.0) return times[k];
        const double f = (std::log(level) - std::log(lo)) / (std::log(hi) - std::log(lo));
        return times[k - 1] + f * (times[k] - times[k - 1]);
    }
    return std::nullopt;
}

/// Fits log C = lambda t + c inside the window, and t* from C(t*) = 1.
inline ScramblingPoint fit_lyapunov(const std::vector<double>& times, const std::vector<double>& values, std::size_t n_sites,
                                    double saturation, const ScramblingWindow& window = {})
{
    if (times.size() != values.size()) throw std::invalid_argument("fit_lyapunov: size mismatch");
    ScramblingPoint p;
    p.n_sites = n_sites;
    std::vector<double> x, y;
    const double lo = window.lower_fraction * saturation, hi = window.upper_fraction * saturation;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= window.t_min && values[k] >= lo && values[k] <= hi) {
            x.push_back(times[k]);
            y.push_back(std::log(values[k]));
        }
    }
    p.points = x.size();
    const auto crossing = first_crossing(times, values, 1.0);
    if (x.size() < 3 || !crossing) return p;
    const auto fit = stats::fit_line(x, y);
    p.lambda = fit.slope;
    p.lambda_stderr = fit.slope_stderr;
    p.residual = fit.residual_sum_squares;
    p.window_begin = x.front();
    p.window_end = x.back();
    p.t_star = *crossing;
    p.valid = p.lambda > 0.0;
    return p;
}

/// Uses the curve at the largest graph distance, the last pair to scramble.
inline ScramblingPoint fit_lyapunov(const SensitivityCurve& curve, const ScramblingWindow& window = {})
{
    return fit_lyapunov(curve.times, curve.values.back(), curve.n_sites, saturation_value(curve.phi), window);
}

/// Weighted regression of lambda t* on log N over the valid sizes.
inline ScramblingFit fit_scrambling(const std::vector<ScramblingPoint>& sizes)
{
    ScramblingFit out;
    out.sizes = sizes;
    std::vector<double> x, y, w;
    for (const auto& p : sizes) {
        if (!p.valid) continue;
        x.push_back(std::log(static_cast<double>(p.n_sites)));
        y.push_back(p.lambda_t_star());
        const double sigma = p.t_star * p.lambda_stderr;
        w.push_back(sigma > 0.0 ? 1.0 / (sigma * sigma) : 1.0);
    }
    if (x.size() < 2) throw std::invalid_argument("fit_scrambling: need at least two sizes with an exponential window");
    const auto fit = stats::fit_line(x, y, w);
    out.alpha = fit.slope;
    out.beta = fit.intercept;
    out.alpha_stderr = fit.slope_stderr;
    out.beta_stderr = fit.intercept_stderr;
    out.residual = fit.residual_sum_squares;
    return out;
}

inline ScramblingFit fit_scrambling(const std::vector<SensitivityCurve>& curves, const ScramblingWindow& window = {})
{
    std::vector<ScramblingPoint> sizes;
    for (const auto& c : curves) sizes.push_back(fit_lyapunov(c, window));
    return fit_scrambling(sizes);
}

/// Log-linear decay of C_cl with graph distance at one recorded time.
struct DistanceDecay {
    double time = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

inline DistanceDecay distance_decay(const SensitivityCurve& curve, std::size_t time_index)
{
    std::vector<double> r, y;
    for (std::size_t d = 0; d <= curve.max_distance(); ++d) {
        const double v = curve.values[d][time_index];
        if (v > 0.0) {
            r.push_back(static_cast<double>(d));
            y.push_back(std::log(v));
        }
    }
    if (r.size() < 3) throw std::invalid_argument("distance_decay: fewer than three positive distances");
    const auto fit = stats::fit_line(r, y);
    return {curve.times[time_index], fit.slope, fit.r_squared};
}

}  // namespace treelike

#endif
