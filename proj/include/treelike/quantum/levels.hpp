#ifndef TREELIKE_QUANTUM_LEVELS_HPP
#define TREELIKE_QUANTUM_LEVELS_HPP

// Level-spacing statistics in momentum sectors, unfolded with a Gaussian
// density of states and compared with the GOE Wigner-Dyson surmise.

#include <treelike/parallel.hpp>
#include <treelike/quantum/hamiltonian.hpp>
#include <treelike/stats.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace treelike::quantum {

inline double wigner_dyson_cdf(double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-std::numbers::pi * x * x / 4.0); }
inline double wigner_dyson_pdf(double x) { return x <= 0.0 ? 0.0 : 0.5 * std::numbers::pi * x * std::exp(-std::numbers::pi * x * x / 4.0); }
inline double poisson_cdf(double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); }

struct SectorLevels {
    std::size_t momentum = 0;
    /// Eigenvalues of the resolved involutions (spin flip, reflection), 0 if unresolved.
    int flip_parity = 0;
    int reflection_parity = 0;
    std::vector<double> energies;
    /// Gaussian fit to the density of states.
    double dos_mean = 0.0;
    double dos_width = 0.0;
};

struct HistogramBin {
    double center;
    std::size_t count;
};

struct SpectrumData {
    std::vector<SectorLevels> sectors;
    /// Pooled spacings, rescaled to unit mean.
    std::vector<double> spacings;
    /// Mean of the pooled spacings before the final rescaling.
    double raw_mean_spacing = 0.0;
    std::vector<HistogramBin> histogram;
    double ks_wigner_dyson = 0.0;
    double ks_poisson = 0.0;
};

struct LevelOptions {
    /// Split momentum sectors by spin-flip parity (half filling) and by
    /// reflection parity (k = 0, pi).
    bool resolve_parities = true;
    /// Fraction of levels dropped at each edge of every sector.
    double edge_fraction = 0.1;
    std::size_t bins = 40;
    double max_spacing = 4.0;
    std::size_t threads = 0;
};

/// Unfolded levels D * Phi((E - mu) / sigma) of one sector, with mu and
/// sigma the moments of the sector's levels.
inline std::vector<double> unfold_gaussian(SectorLevels& sec)
{
    auto& e = sec.energies;
    if (e.size() < 2) return {};
    std::sort(e.begin(), e.end());
    const double n = static_cast<double>(e.size());
    sec.dos_mean = stats::mean(e);
    double var = 0.0;
    for (double x : e) var += (x - sec.dos_mean) * (x - sec.dos_mean);
    sec.dos_width = std::sqrt(var / n);
    std::vector<double> out(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
        out[k] = n * 0.5 * std::erfc(-(e[k] - sec.dos_mean) / (sec.dos_width * std::numbers::sqrt2));
    }
    return out;
}

/// Unfolds every sector, drops edge spacings, pools, rescales to unit mean
/// spacing, and compares with Wigner-Dyson and Poisson.
inline SpectrumData analyze_spectrum(std::vector<SectorLevels> sectors, const LevelOptions& opt = {})
{
    SpectrumData data;
    for (auto& sec : sectors) {
        const auto x = unfold_gaussian(sec);
        const auto cut = static_cast<std::size_t>(std::floor(opt.edge_fraction * static_cast<double>(x.size())));
        for (std::size_t k = cut; k + 1 + cut < x.size(); ++k) data.spacings.push_back(x[k + 1] - x[k]);
    }
    if (data.spacings.empty()) throw std::invalid_argument("analyze_spectrum: no spacings left after edge cut");
    data.raw_mean_spacing = stats::mean(data.spacings);
    for (double& s : data.spacings) s /= data.raw_mean_spacing;
    data.sectors = std::move(sectors);

    const double width = opt.max_spacing / static_cast<double>(opt.bins);
    data.histogram.resize(opt.bins);
    for (std::size_t b = 0; b < opt.bins; ++b) data.histogram[b] = {(static_cast<double>(b) + 0.5) * width, 0};
    for (double s : data.spacings) {
        const auto b = static_cast<std::size_t>(s / width);
        if (b < opt.bins) ++data.histogram[b].count;
    }
    data.ks_wigner_dyson = stats::ks_distance(data.spacings, wigner_dyson_cdf);
    data.ks_poisson = stats::ks_distance(data.spacings, poisson_cdf);
    return data;
}

/// Matrix of a site or spin map g in a momentum sector.  g must commute
/// with translations, or anticommute (T g = g T^{-1}) with k = 0 or pi.
template <typename Map>
MatrixXcd momentum_sector_symmetry(const MomentumBasis& basis, Map&& g)
{
    const double k = 2.0 * std::numbers::pi * static_cast<double>(basis.momentum()) / static_cast<double>(basis.n_sites());
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    const auto& reps = basis.representatives();
    for (std::size_t a = 0; a < reps.size(); ++a) {
        const auto [rep, shift] = basis.canonical(g(reps[a].state));
        const std::size_t b = basis.index(rep);
        if (b == basis.dimension()) throw std::logic_error("symmetry maps outside the momentum sector");
        const double amp = std::sqrt(static_cast<double>(reps[a].period) / static_cast<double>(reps[b].period));
        m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) += std::polar(amp, -k * static_cast<double>(shift));
    }
    return m;
}

namespace detail {

struct ParityBlock {
    MatrixXcd basis;  // orthonormal columns
    int flip = 0;
    int reflection = 0;
};

// Splits each block by the +-1 eigenspaces of an involution.
inline std::vector<ParityBlock> split_by(const std::vector<ParityBlock>& blocks, const MatrixXcd& involution, bool is_flip)
{
    std::vector<ParityBlock> out;
    for (const auto& blk : blocks) {
        const MatrixXcd restricted = blk.basis.adjoint() * involution * blk.basis;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(0.5 * (restricted + restricted.adjoint()));
        for (int sign : {-1, 1}) {
            std::vector<Eigen::Index> cols;
            for (Eigen::Index c = 0; c < solver.eigenvalues().size(); ++c) {
                if ((solver.eigenvalues()[c] > 0.0) == (sign > 0)) cols.push_back(c);
            }
            if (cols.empty()) continue;
            ParityBlock nb = blk;
            nb.basis.resize(blk.basis.rows(), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t q = 0; q < cols.size(); ++q)
                nb.basis.col(static_cast<Eigen::Index>(q)) = blk.basis * solver.eigenvectors().col(cols[q]);
            (is_flip ? nb.flip : nb.reflection) = sign;
            out.push_back(std::move(nb));
        }
    }
    return out;
}

}  // namespace detail

/// Diagonalizes every momentum sector at fixed magnon number, optionally
/// split into parity blocks.
inline SpectrumData level_statistics(const CouplingModel& model, std::size_t magnons, const LevelOptions& opt = {})
{
    if (model.boundary() != Boundary::Periodic) throw std::invalid_argument("level_statistics: requires periodic boundary");
    const std::size_t n = model.n_sites();
    if (n > 18) throw std::invalid_argument("level_statistics: limited to N <= 18");
    std::vector<std::vector<SectorLevels>> per_sector(n);
    parallel_for(n, opt.threads, [&](std::size_t m) {
        const MomentumBasis basis(n, magnons, m);
        if (basis.dimension() > 6000) throw std::length_error("level_statistics: momentum sector too large");
        if (basis.dimension() == 0) return;
        const MatrixXcd h = momentum_sector_hamiltonian(model, basis);
        const auto dim = static_cast<Eigen::Index>(basis.dimension());
        std::vector<detail::ParityBlock> blocks{{MatrixXcd::Identity(dim, dim), 0, 0}};
        if (opt.resolve_parities && 2 * magnons == n) {
            const State full = (State{1} << n) - 1;
            blocks = detail::split_by(blocks, momentum_sector_symmetry(basis, [&](State x) { return full & ~x; }), true);
        }
        if (opt.resolve_parities && (m == 0 || 2 * m == n)) {
            blocks = detail::split_by(blocks, momentum_sector_symmetry(basis, [&](State x) { return reflect(x, n); }), false);
        }
        for (const auto& blk : blocks) {
            const MatrixXcd hb = blk.basis.adjoint() * h * blk.basis;
            Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(0.5 * (hb + hb.adjoint()), Eigen::EigenvaluesOnly);
            SectorLevels lv;
            lv.momentum = m;
            lv.flip_parity = blk.flip;
            lv.reflection_parity = blk.reflection;
            const VectorXd& ev = solver.eigenvalues();
            lv.energies.assign(ev.data(), ev.data() + ev.size());
            per_sector[m].push_back(std::move(lv));
        }
    });
    std::vector<SectorLevels> sectors;
    for (auto& v : per_sector) {
        for (auto& lv : v) sectors.push_back(std::move(lv));
    }
    return analyze_spectrum(std::move(sectors), opt);
}

}  // namespace treelike::quantum

#endif
