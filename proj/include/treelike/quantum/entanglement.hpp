#ifndef TREELIKE_QUANTUM_ENTANGLEMENT_HPP
#define TREELIKE_QUANTUM_ENTANGLEMENT_HPP

// Bipartite von Neumann entropies of full-space pure states, quench
// dynamics from the x-polarized product state, and the scan for the
// least-entangled bipartition.

#include <treelike/geometry.hpp>
#include <treelike/parallel.hpp>
#include <treelike/quantum/evolution.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace treelike::quantum {

/// Subset A of sites as a bit mask.
enum class PartitionKind { ArchimedeanContiguous, TwoAdicSubtree, Arbitrary };

inline std::string to_string(PartitionKind k)
{
    switch (k) {
    case PartitionKind::ArchimedeanContiguous: return "archimedean";
    case PartitionKind::TwoAdicSubtree: return "two_adic";
    case PartitionKind::Arbitrary: return "arbitrary";
    }
    return "?";
}

struct BipartitionSpec {
    State subset = 0;
    PartitionKind kind = PartitionKind::Arbitrary;

    std::size_t size() const { return static_cast<std::size_t>(std::popcount(subset)); }
};

/// Sites p, p+1, .., p+L-1 (mod N).
inline BipartitionSpec contiguous_block(std::size_t n_sites, std::size_t start, std::size_t length)
{
    State m = 0;
    for (std::size_t q = 0; q < length; ++q) m |= State{1} << ((start + q) % n_sites);
    return {m, PartitionKind::ArchimedeanContiguous};
}

/// Sites whose Monna index lies in [start, start + L).  With start a
/// multiple of L (L a power of two) this is a subtree of the leaf tree.
inline BipartitionSpec monna_block(std::size_t n_sites, std::size_t start, std::size_t length)
{
    State m = 0;
    for (std::size_t q = 0; q < length; ++q) m |= State{1} << monna_map(n_sites, (start + q) % n_sites);
    return {m, PartitionKind::TwoAdicSubtree};
}

namespace detail {

// Packs the bits of x selected by `mask` into the low bits, via two
// half-word tables.
class BitGather {
public:
    BitGather(State mask, std::size_t n_sites) : lo_bits_(n_sites / 2)
    {
        const std::size_t hi_bits = n_sites - lo_bits_;
        lo_.resize(std::size_t{1} << lo_bits_);
        hi_.resize(std::size_t{1} << hi_bits);
        const auto lo_count = static_cast<unsigned>(std::popcount(mask & ((State{1} << lo_bits_) - 1)));
        for (State v = 0; v < lo_.size(); ++v) lo_[v] = pack(v, mask);
        for (State v = 0; v < hi_.size(); ++v) hi_[v] = pack(v, mask >> lo_bits_) << lo_count;
    }
    State operator()(State x) const { return lo_[x & ((State{1} << lo_bits_) - 1)] | hi_[x >> lo_bits_]; }

private:
    static State pack(State v, State mask)
    {
        State out = 0;
        unsigned pos = 0;
        for (unsigned b = 0; mask >> b; ++b) {
            if ((mask >> b) & 1u) {
                out |= ((v >> b) & 1u) << pos;
                ++pos;
            }
        }
        return out;
    }
    std::size_t lo_bits_;
    std::vector<State> lo_, hi_;
};

}  // namespace detail

/// Eigenvalues of the reduced density matrix of subset A for a full-space state.
inline VectorXd reduced_spectrum(const VectorXcd& psi, std::size_t n_sites, State subset)
{
    if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << n_sites))
        throw std::invalid_argument("reduced_spectrum: expected a full-space state");
    const State full = (State{1} << n_sites) - 1;
    subset &= full;
    const auto la = static_cast<std::size_t>(std::popcount(subset));
    if (la == 0 || la == n_sites) throw std::invalid_argument("reduced_spectrum: subset must be proper and nonempty");
    // keep the smaller side as rows
    const State rows_mask = la <= n_sites - la ? subset : (full & ~subset);
    const State cols_mask = full & ~rows_mask;
    const detail::BitGather row_of(rows_mask, n_sites), col_of(cols_mask, n_sites);
    const auto nr = Eigen::Index{1} << std::popcount(rows_mask);
    const auto nc = Eigen::Index{1} << std::popcount(cols_mask);
    MatrixXcd m(nr, nc);
    for (State x = 0; x <= full; ++x) m(row_of(x), col_of(x)) = psi[x];
    const MatrixXcd rho = m * m.adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// Natural-log von Neumann entropy; eigenvalues below 1e-14 are dropped.
inline double entropy_from_spectrum(const VectorXd& p)
{
    double s = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (p[k] > 1e-14) s -= p[k] * std::log(p[k]);
    }
    return s;
}

inline double entanglement_entropy(const VectorXcd& psi, std::size_t n_sites, State subset)
{
    return entropy_from_spectrum(reduced_spectrum(psi, n_sites, subset));
}

enum class PartitionSymmetry {
    /// Every subset is evaluated.
    None,
    /// Only one subset per orbit of ring translations and reflections; valid
    /// for states invariant under them.
    Dihedral
};

struct MinimumEntanglement {
    double entropy = std::numeric_limits<double>::infinity();
    State subset = 0;
    std::size_t evaluated = 0;
};

namespace detail {

inline State reflect_mask(State x, std::size_t n)
{
    State r = x & 1u;
    for (std::size_t j = 1; j < n; ++j) {
        if ((x >> j) & 1u) r |= State{1} << (n - j);
    }
    return r;
}

inline State rotate_mask(State x, std::size_t n, std::size_t l)
{
    if (l % n == 0) return x;
    const State full = (State{1} << n) - 1;
    return ((x << l) | (x >> (n - l))) & full;
}

// Smallest image of `subset` under translations, reflections and, when
// `with_complement`, complementation.
inline State orbit_minimum(State subset, std::size_t n, bool with_complement)
{
    const State full = (State{1} << n) - 1;
    State best = subset;
    std::array<State, 4> seeds{subset, reflect_mask(subset, n), full & ~subset, full & ~reflect_mask(subset, n)};
    const std::size_t n_seeds = with_complement ? 4 : 2;
    for (std::size_t s = 0; s < n_seeds; ++s) {
        for (std::size_t l = 0; l < n; ++l) best = std::min(best, rotate_mask(seeds[s], n, l));
    }
    return best;
}

}  // namespace detail

/// Exhaustive scan over all C(N, L) subsets of size L for the smallest
/// entanglement entropy.  At L = N/2 only subsets containing site 0 are
/// visited (S_A = S_complement).
inline MinimumEntanglement min_entanglement_over_partitions(const VectorXcd& psi, std::size_t n_sites, std::size_t length,
                                                            PartitionSymmetry symmetry = PartitionSymmetry::None,
                                                            std::size_t threads = 0)
{
    if (length == 0 || length >= n_sites) throw std::invalid_argument("partition size must satisfy 0 < L < N");
    const bool halves = 2 * length == n_sites;
    std::vector<State> subsets;
    const State full = (State{1} << n_sites) - 1;
    // Gosper's hack over all masks with `length` bits
    for (State m = (State{1} << length) - 1; m <= full;) {
        bool keep = true;
        if (symmetry == PartitionSymmetry::Dihedral) {
            keep = detail::orbit_minimum(m, n_sites, halves) == m;
        } else if (halves) {
            keep = (m & 1u) != 0;
        }
        if (keep) subsets.push_back(m);
        const State c = m & (~m + 1);
        const State r = m + c;
        if (r == 0 || r > full) break;
        m = (((r ^ m) >> 2) / c) | r;
    }

    std::vector<double> entropies(subsets.size());
    parallel_for(subsets.size(), threads, [&](std::size_t k) {
        entropies[k] = entanglement_entropy(psi, n_sites, subsets[k]);
    });
    MinimumEntanglement out;
    out.evaluated = subsets.size();
    for (std::size_t k = 0; k < subsets.size(); ++k) {
        if (entropies[k] < out.entropy) {
            out.entropy = entropies[k];
            out.subset = subsets[k];
        }
    }
    return out;
}

/// Product state with every spin along +x.
inline VectorXcd x_polarized_state(std::size_t n_sites)
{
    const auto dim = Eigen::Index{1} << n_sites;
    return VectorXcd::Constant(dim, Complex(std::exp2(-0.5 * static_cast<double>(n_sites)), 0.0));
}

/// Family of bipartitions reported in a quench table.
enum class PartitionFamily { Archimedean, TwoAdic, All };

inline std::string to_string(PartitionFamily f)
{
    switch (f) {
    case PartitionFamily::Archimedean: return "archimedean";
    case PartitionFamily::TwoAdic: return "two_adic";
    case PartitionFamily::All: return "all";
    }
    return "?";
}

struct PartitionRequest {
    std::size_t length;
    PartitionFamily family;
};

struct EntropyRow {
    double time;
    std::size_t length;
    PartitionFamily family;
    double entropy;
    State subset;
};

struct QuenchResult {
    std::vector<EntropyRow> rows;
    std::vector<VectorXcd> states;
    double max_energy_drift = 0.0;
    double max_magnetization_drift = 0.0;
    double max_norm_drift = 0.0;
};

struct QuenchOptions {
    /// Above this size the Chebyshev propagator replaces sector diagonalization.
    std::size_t dense_max_sites = 12;
    PartitionSymmetry symmetry = PartitionSymmetry::None;
    bool keep_states = false;
    std::size_t threads = 0;
};

/// Quench from the x-polarized product state.  For each time and request,
/// the Archimedean and 2-adic families report the minimum over all block
/// placements; `All` reports the minimum over every subset of that size.
inline QuenchResult quench_entanglement(const CouplingModel& model, const std::vector<double>& times,
                                        const std::vector<PartitionRequest>& requests, const QuenchOptions& opt = {})
{
    const std::size_t n = model.n_sites();
    if (n > 16) throw std::invalid_argument("quench_entanglement: limited to N <= 16");
    for (const auto& r : requests) {
        if (r.length == 0 || r.length >= n) throw std::invalid_argument("partition size out of range (0 < L < N)");
        if (r.family == PartitionFamily::TwoAdic && !is_power_of_two(n))
            throw std::invalid_argument("2-adic partitions require N a power of 2");
    }
    const SpinHamiltonian h(model, SpinBasis(n));
    std::unique_ptr<DenseSectorPropagator> dense;
    std::unique_ptr<ChebyshevPropagator> cheb;
    if (n <= opt.dense_max_sites) {
        dense = std::make_unique<DenseSectorPropagator>(model);
    } else {
        cheb = std::make_unique<ChebyshevPropagator>(h);
    }
    const PartitionSymmetry symmetry =
        model.boundary() == Boundary::Periodic ? opt.symmetry : PartitionSymmetry::None;

    const VectorXcd psi0 = x_polarized_state(n);
    const VectorXd sz = total_sz_diagonal(h.basis());
    const double e0 = energy(h, psi0);
    const double m0 = (psi0.array().abs2() * sz.array()).sum();

    QuenchResult res;
    VectorXcd psi = psi0;
    double t_prev = 0.0;
    for (double t : times) {
        if (dense) {
            psi = dense->evolve(psi0, t);
        } else {
            psi = cheb->evolve(psi, t - t_prev);
            t_prev = t;
        }
        res.max_norm_drift = std::max(res.max_norm_drift, std::abs(psi.squaredNorm() - 1.0));
        res.max_energy_drift = std::max(res.max_energy_drift, std::abs(energy(h, psi) - e0));
        res.max_magnetization_drift =
            std::max(res.max_magnetization_drift, std::abs((psi.array().abs2() * sz.array()).sum() - m0));

        for (const auto& r : requests) {
            EntropyRow row{t, r.length, r.family, std::numeric_limits<double>::infinity(), 0};
            if (r.family == PartitionFamily::All) {
                const auto m = min_entanglement_over_partitions(psi, n, r.length, symmetry, opt.threads);
                row.entropy = m.entropy;
                row.subset = m.subset;
            } else {
                const std::size_t placements = model.boundary() == Boundary::Periodic ? n : n - r.length + 1;
                for (std::size_t p = 0; p < placements; ++p) {
                    const auto spec = r.family == PartitionFamily::Archimedean ? contiguous_block(n, p, r.length)
                                                                                : monna_block(n, p, r.length);
                    const double s = entanglement_entropy(psi, n, spec.subset);
                    if (s < row.entropy) {
                        row.entropy = s;
                        row.subset = spec.subset;
                    }
                }
            }
            res.rows.push_back(row);
        }
        if (opt.keep_states) res.states.push_back(psi);
    }
    return res;
}

}  // namespace treelike::quantum

#endif
