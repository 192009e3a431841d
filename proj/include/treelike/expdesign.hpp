#ifndef TREELIKE_EXPDESIGN_HPP
#define TREELIKE_EXPDESIGN_HPP

// Cavity-QED budget for the s = 0 couplings.  Constants of order unity in
// the coupling and decay estimates are set to 1, so only ratios (rho, the
// required cooperativity) are quantitative.

#include <treelike/geometry.hpp>
#include <treelike/magnon.hpp>

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace treelike {

struct CavityParams {
    /// Single-atom cooperativity.
    double eta = 1.0;
    double atoms_per_site = 300.0;
    double kappa = 1.0;
    double gamma_atom = 1.0;
    /// Raman detuning; <= 0 selects the optimum.
    double delta = 0.0;
    /// Modulation index per sideband; <= 0 selects 2 M beta^2 = 1.
    double beta = 0.0;
    std::size_t n_sites = 1024;

    double collective_cooperativity() const { return eta * atoms_per_site; }
};

/// M = log2(N / 2), the number of modulation frequencies.
inline double modulation_count(std::size_t n_sites)
{
    if (!is_power_of_two(n_sites) || n_sites < 4) throw std::invalid_argument("modulation_count: n_sites must be a power of 2, at least 4");
    return static_cast<double>(log2_exact(n_sites) - 1);
}

/// B = 1 + 2 M beta^2, carrier plus sideband power.
inline double sideband_power(double m, double beta) { return 1.0 + 2.0 * m * beta * beta; }

inline double optimal_beta(std::size_t n_sites) { return 1.0 / std::sqrt(2.0 * modulation_count(n_sites)); }

inline double effective_beta(const CavityParams& p) { return p.beta > 0.0 ? p.beta : optimal_beta(p.n_sites); }

/// Throws on nonpositive parameters; returns warnings for weak-modulation violations.
inline std::vector<std::string> validate(const CavityParams& p)
{
    if (!(p.eta > 0.0) || !(p.atoms_per_site > 0.0) || !(p.kappa > 0.0) || !(p.gamma_atom > 0.0))
        throw std::invalid_argument("CavityParams: eta, atoms_per_site, kappa, gamma_atom must be positive");
    modulation_count(p.n_sites);
    std::vector<std::string> warnings;
    const double beta = effective_beta(p);
    if (beta >= 1.0) throw std::invalid_argument("CavityParams: beta must be below 1");
    if (beta > 0.5) warnings.push_back("beta = " + std::to_string(beta) + " exceeds 0.5; weak-modulation couplings are approximate");
    return warnings;
}

/// delta / kappa maximizing rho, sqrt(n eta M beta / B).
inline double optimal_detuning(const CavityParams& p)
{
    const double m = modulation_count(p.n_sites), beta = effective_beta(p);
    return std::sqrt(p.collective_cooperativity() * m * beta / sideband_power(m, beta));
}

/// rho = beta / (M beta kappa / delta + B delta / (n eta kappa)) at the
/// given delta / kappa.
inline double interaction_to_decay(const CavityParams& p, double delta_over_kappa)
{
    if (!(delta_over_kappa > 0.0)) throw std::invalid_argument("interaction_to_decay: detuning must be positive");
    const double m = modulation_count(p.n_sites), beta = effective_beta(p);
    return beta / (m * beta / delta_over_kappa + sideband_power(m, beta) * delta_over_kappa / p.collective_cooperativity());
}

/// rho at the parameters' detuning, or at the optimum when delta <= 0.
inline double interaction_to_decay(const CavityParams& p)
{
    if (p.delta > 0.0) return interaction_to_decay(p, p.delta / p.kappa);
    const double m = modulation_count(p.n_sites), beta = effective_beta(p);
    return 0.5 * std::sqrt(p.collective_cooperativity() * beta / (m * sideband_power(m, beta)));
}

/// rho at optimal detuning and 2 M beta^2 = 1: (sqrt(n eta) / 2) / (2M)^{3/4}.
inline double interaction_to_decay_optimal(std::size_t n_sites, double n_eta)
{
    const double m = modulation_count(n_sites);
    return 0.5 * std::sqrt(n_eta) / std::pow(2.0 * m, 0.75);
}

/// n eta giving rho = 1 at optimal detuning, 4 M B / beta.
inline double required_cooperativity(std::size_t n_sites, double beta)
{
    if (!(beta > 0.0)) throw std::invalid_argument("required_cooperativity: beta must be positive");
    const double m = modulation_count(n_sites);
    return 4.0 * m * sideband_power(m, beta) / beta;
}

/// n eta = 4 (2 M)^{3/2}, the minimum over beta.
inline double required_cooperativity_optimal(std::size_t n_sites) { return 4.0 * std::pow(2.0 * modulation_count(n_sites), 1.5); }

struct CooperativityRow {
    double beta;
    std::size_t n_sites;
    double required_n_eta;
};

/// Required n eta over a beta grid for every size.
inline std::vector<CooperativityRow> cooperativity_table(const std::vector<double>& betas, const std::vector<std::size_t>& sizes)
{
    std::vector<CooperativityRow> rows;
    for (auto n : sizes) {
        for (double b : betas) rows.push_back({b, n, required_cooperativity(n, b)});
    }
    return rows;
}

/// n_points values evenly spaced on [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n_points)
{
    if (n_points < 2) return {lo};
    std::vector<double> g(n_points);
    for (std::size_t k = 0; k < n_points; ++k) g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_points - 1);
    return g;
}

/// The default beta in [0.05, 0.5], N in 2^4 .. 2^10 table.
inline std::vector<CooperativityRow> cooperativity_table()
{
    std::vector<std::size_t> sizes;
    for (int l = 4; l <= 10; ++l) sizes.push_back(std::size_t{1} << l);
    return cooperativity_table(linear_grid(0.05, 0.5, 46), sizes);
}

struct DecayRow {
    std::size_t k_index;
    double k;
    double energy;
    double gamma_plus;
    double gamma_minus;
};

/// Collective decay rates gamma_{k,+-} = (kappa / delta) |E_k| per spin wave.
inline std::vector<DecayRow> collective_decay_table(const CouplingModel& model, double kappa_over_delta)
{
    if (!(kappa_over_delta > 0.0)) throw std::invalid_argument("collective_decay_table: kappa/delta must be positive");
    const auto table = dispersion(model);
    std::vector<DecayRow> rows;
    for (std::size_t m = 0; m < table.size(); ++m) {
        const double g = kappa_over_delta * std::abs(table.energies[m]);
        rows.push_back({m, table.wavenumber(m), table.energies[m], g, g});
    }
    return rows;
}

/// One period of the control-field amplitude, sampled at theta = omega t.
struct Waveform {
    std::vector<double> phase;
    /// sqrt(E(theta) + offset).
    std::vector<double> exact;
    /// 1 + 2 sum_l beta_l cos(2^l theta).
    std::vector<double> naive;
    double offset = 0.0;
    std::vector<double> sideband_beta;
};

/// Exact waveform with radicand E(theta) - min E + margin, and the naive
/// tone sum with beta_l = beta J_l / max_l J_l.
inline Waveform modulation_waveform(const CouplingModel& model, std::size_t n_samples, double beta, double margin = 0.0)
{
    if (n_samples < 2) throw std::invalid_argument("modulation_waveform: need at least two samples");
    if (margin < 0.0) throw std::invalid_argument("modulation_waveform: negative margin gives a negative radicand");
    Waveform w;
    w.phase.resize(n_samples);
    std::vector<double> energy(n_samples);
    for (std::size_t q = 0; q < n_samples; ++q) {
        w.phase[q] = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n_samples);
        energy[q] = dispersion_at(model, w.phase[q]);
    }
    w.offset = -*std::min_element(energy.begin(), energy.end()) + margin;
    const auto& levels = model.level_strengths();
    const double jmax = *std::max_element(levels.begin(), levels.end());
    for (double j : levels) w.sideband_beta.push_back(beta * j / jmax);
    w.exact.resize(n_samples);
    w.naive.resize(n_samples);
    for (std::size_t q = 0; q < n_samples; ++q) {
        const double radicand = energy[q] + w.offset;
        if (radicand < -1e-12) throw std::runtime_error("modulation_waveform: negative radicand");
        w.exact[q] = std::sqrt(std::max(0.0, radicand));
        double tone = 1.0;
        for (std::size_t l = 0; l < levels.size(); ++l) tone += 2.0 * w.sideband_beta[l] * std::cos(std::exp2(static_cast<double>(l)) * w.phase[q]);
        w.naive[q] = tone;
    }
    return w;
}

/// Cosine amplitudes a_m of |samples|^2 = a_0 + sum_m a_m cos(m theta) + ...,
/// for m = 0 .. n/2.
inline std::vector<double> power_harmonics(const std::vector<double>& amplitude)
{
    const std::size_t n = amplitude.size();
    std::vector<double> sq(n);
    for (std::size_t q = 0; q < n; ++q) sq[q] = amplitude[q] * amplitude[q];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, sq);
    std::vector<double> out(n / 2 + 1);
    for (std::size_t m = 0; m <= n / 2; ++m) {
        const double scale = (m == 0 || 2 * m == n) ? 1.0 : 2.0;
        out[m] = scale * std::abs(spec[m]) / static_cast<double>(n);
    }
    return out;
}

/// Largest harmonic of |Omega|^2 away from DC and powers of two, relative to
/// the largest power-of-two harmonic.
inline double spurious_harmonic_ratio(const std::vector<double>& harmonics)
{
    double wanted = 0.0, spurious = 0.0;
    for (std::size_t m = 1; m < harmonics.size(); ++m) {
        if (is_power_of_two(m)) wanted = std::max(wanted, harmonics[m]);
        else spurious = std::max(spurious, harmonics[m]);
    }
    return wanted > 0.0 ? spurious / wanted : 0.0;
}

}  // namespace treelike

#endif
