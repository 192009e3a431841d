#ifndef TREELIKE_MAGNON_HPP
#define TREELIKE_MAGNON_HPP

// Single-magnon dynamics on the periodic ring, propagated exactly in
// momentum space with FFTs.

#include <treelike/geometry.hpp>

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace treelike {

using Complex = std::complex<double>;

/// E(k) at an arbitrary wavenumber.
inline double dispersion_at(const CouplingModel& model, double k)
{
    double e = 0.0;
    const auto& levels = model.level_strengths();
    for (std::size_t l = 0; l < levels.size(); ++l) e += levels[l] * std::cos(std::exp2(static_cast<double>(l)) * k);
    return 2.0 * e;
}

/// E(k_m) on the grid k_m = 2 pi m / N.
struct DispersionTable {
    std::vector<double> energies;

    std::size_t size() const { return energies.size(); }
    double wavenumber(std::size_t m) const
    {
        return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(energies.size());
    }
};

inline DispersionTable dispersion(const CouplingModel& model)
{
    if (model.boundary() != Boundary::Periodic)
        throw std::invalid_argument("dispersion: plane-wave dispersion requires periodic boundary");
    DispersionTable table;
    const std::size_t n = model.n_sites();
    table.energies.resize(n);
    for (std::size_t m = 0; m < n; ++m) table.energies[m] = dispersion_at(model, table.wavenumber(m));
    return table;
}

/// Bit-reversed wavenumber index, N k_M / 2 pi = M(N k / 2 pi).
inline std::size_t monna_wavenumber(std::size_t n_sites, std::size_t k_index) { return monna_map(n_sites, k_index); }

/// Dispersion listed in Monna wavenumber order: entry p holds E at m = M^{-1}(p) = M(p).
inline std::vector<double> monna_ordered(const DispersionTable& table)
{
    const std::size_t n = table.size();
    std::vector<double> out(n);
    for (std::size_t m = 0; m < n; ++m) out[monna_wavenumber(n, m)] = table.energies[m];
    return out;
}

inline double total_variation(const std::vector<double>& values)
{
    double tv = 0.0;
    for (std::size_t m = 1; m < values.size(); ++m) tv += std::abs(values[m] - values[m - 1]);
    return tv;
}

struct MagnonField {
    std::vector<Complex> amplitudes;
    double time = 0.0;
    std::size_t source_site = 0;

    double norm() const
    {
        double sum = 0.0;
        for (const auto& a : amplitudes) sum += std::norm(a);
        return sum;
    }
};

/// Occupations <n_j(t)> on a time grid, row-major [time][site].
struct MagnonEvolution {
    std::size_t n_sites = 0;
    std::size_t source_site = 0;
    std::vector<double> times;
    std::vector<double> occupation;
    /// max_t |sum_j <n_j(t)> - 1|
    double max_norm_drift = 0.0;

    double at(std::size_t time_index, std::size_t site) const { return occupation[time_index * n_sites + site]; }
};

/// t_k = k dt for k = 0..round(tmax/dt).
inline std::vector<double> make_time_grid(double tmax, double dt)
{
    if (!(tmax >= 0.0) || !std::isfinite(tmax)) throw std::invalid_argument("time grid: tmax must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("time grid: dt must be > 0");
    const auto steps = static_cast<std::size_t>(std::llround(tmax / dt));
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) * dt;
    return t;
}

class MagnonPropagator {
public:
    explicit MagnonPropagator(const CouplingModel& model) : table_(dispersion(model)), n_(model.n_sites()) {}

    const DispersionTable& table() const { return table_; }

    /// psi_j(t) = (1/N) sum_k e^{i k (j - i)} e^{-i E(k) t}
    MagnonField field(std::size_t source, double t) const
    {
        if (source >= n_) throw std::out_of_range("magnon source site out of range");
        std::vector<Complex> spectrum(n_);
        for (std::size_t m = 0; m < n_; ++m) {
            const double phase = -table_.wavenumber(m) * static_cast<double>(source) - table_.energies[m] * t;
            spectrum[m] = std::polar(1.0, phase);
        }
        MagnonField out;
        out.time = t;
        out.source_site = source;
        fft_.inv(out.amplitudes, spectrum);
        return out;
    }

    /// Single-site amplitude by direct summation, O(N).
    Complex amplitude(std::size_t source, std::size_t site, double t) const
    {
        Complex sum = 0.0;
        const double sep = static_cast<double>(site) - static_cast<double>(source);
        for (std::size_t m = 0; m < n_; ++m) sum += std::polar(1.0, table_.wavenumber(m) * sep - table_.energies[m] * t);
        return sum / static_cast<double>(n_);
    }

private:
    DispersionTable table_;
    std::size_t n_;
    mutable Eigen::FFT<double> fft_;
};

inline MagnonEvolution evolve_magnon(const CouplingModel& model, std::size_t source, const std::vector<double>& times)
{
    model.check_index(source);
    for (double t : times) {
        if (!(t >= 0.0)) throw std::invalid_argument("evolve_magnon: times must be >= 0");
    }
    const MagnonPropagator prop(model);
    MagnonEvolution ev;
    ev.n_sites = model.n_sites();
    ev.source_site = source;
    ev.times = times;
    ev.occupation.resize(times.size() * ev.n_sites);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const MagnonField f = prop.field(source, times[k]);
        double norm = 0.0;
        for (std::size_t j = 0; j < ev.n_sites; ++j) {
            const double n = std::norm(f.amplitudes[j]);
            ev.occupation[k * ev.n_sites + j] = n;
            norm += n;
        }
        ev.max_norm_drift = std::max(ev.max_norm_drift, std::abs(norm - 1.0));
    }
    return ev;
}

/// Column permutation placing site j at position M(j).
inline MagnonEvolution monna_reordered(const MagnonEvolution& ev)
{
    MagnonEvolution out = ev;
    for (std::size_t k = 0; k < ev.times.size(); ++k) {
        for (std::size_t j = 0; j < ev.n_sites; ++j) {
            out.occupation[k * ev.n_sites + monna_map(ev.n_sites, j)] = ev.at(k, j);
        }
    }
    return out;
}

struct ThresholdTimes {
    double epsilon = 0.0;
    /// NaN where the threshold is not reached on the grid.
    std::vector<double> t_eps;

    bool reached(std::size_t j) const { return !std::isnan(t_eps[j]); }
    std::size_t unreached_count() const
    {
        std::size_t c = 0;
        for (double t : t_eps) c += std::isnan(t) ? 1u : 0u;
        return c;
    }
};

/// First time <n_j(t)> >= epsilon, interpolated linearly in log-occupation
/// between the bracketing samples (linearly in occupation when the earlier
/// sample is exactly zero).
inline ThresholdTimes threshold_times(const MagnonEvolution& ev, double epsilon)
{
    if (!(epsilon > 0.0)) throw std::invalid_argument("threshold_times: epsilon must be > 0");
    ThresholdTimes out;
    out.epsilon = epsilon;
    out.t_eps.assign(ev.n_sites, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < ev.n_sites; ++j) {
        for (std::size_t k = 0; k < ev.times.size(); ++k) {
            const double o = ev.at(k, j);
            if (o < epsilon) continue;
            if (k == 0) {
                out.t_eps[j] = ev.times[0];
                break;
            }
            const double o0 = ev.at(k - 1, j);
            const double t0 = ev.times[k - 1];
            const double dt = ev.times[k] - t0;
            double frac;
            if (o0 > 0.0 && o > o0) {
                frac = (std::log(epsilon) - std::log(o0)) / (std::log(o) - std::log(o0));
            } else {
                frac = (epsilon - o0) / (o - o0);
            }
            out.t_eps[j] = t0 + std::clamp(frac, 0.0, 1.0) * dt;
            break;
        }
    }
    return out;
}

/// Grid crossings refined by bisection on the exact occupation inside the
/// bracketing interval.
inline ThresholdTimes threshold_times(const CouplingModel& model, const MagnonEvolution& ev, double epsilon,
                                     int bisection_steps = 48)
{
    ThresholdTimes out = threshold_times(ev, epsilon);
    const MagnonPropagator prop(model);
    for (std::size_t j = 0; j < ev.n_sites; ++j) {
        if (!out.reached(j) || out.t_eps[j] <= ev.times.front()) continue;
        // bracket [t_{k-1}, t_k] containing the first grid crossing
        std::size_t k = 0;
        while (ev.at(k, j) < epsilon) ++k;
        double lo = ev.times[k - 1];
        double hi = ev.times[k];
        for (int it = 0; it < bisection_steps; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (std::norm(prop.amplitude(ev.source_site, j, mid)) >= epsilon) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.t_eps[j] = 0.5 * (lo + hi);
    }
    return out;
}

}  // namespace treelike

#endif
