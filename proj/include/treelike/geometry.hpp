#ifndef TREELIKE_GEOMETRY_HPP
#define TREELIKE_GEOMETRY_HPP

// Coupling graph of the power-of-two spin model and the distance notions
// attached to it: Archimedean (ring) distance, 2-adic norm / tree distance,
// graph (hop) distance, and the Monna bit-reversal map.
//
// Sites are indexed 0..N-1.

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace treelike {

enum class Boundary { Periodic, Open };

inline std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "open"; }

inline Boundary boundary_from_string(const std::string& name)
{
    if (name == "periodic" || name == "pbc") return Boundary::Periodic;
    if (name == "open" || name == "obc") return Boundary::Open;
    throw std::invalid_argument("unknown boundary '" + name + "' (expected periodic|open)");
}

constexpr bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr int log2_exact(std::uint64_t n) { return std::countr_zero(n); }

/// Bit reversal of `i` within log2(n_sites) bits.
inline std::size_t monna_map(std::size_t n_sites, std::size_t i)
{
    if (!is_power_of_two(n_sites)) throw std::invalid_argument("monna_map: n_sites must be a power of 2");
    if (i >= n_sites) throw std::out_of_range("monna_map: site index out of range");
    const int bits = log2_exact(n_sites);
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) {
        r = (r << 1) | ((i >> b) & 1u);
    }
    return r;
}

/// A hopping partner of a site and the matrix element of S+_i S-_j.
struct Neighbor {
    std::size_t site;
    double hopping;
};

/// An unordered coupled pair i < j with its hopping matrix element.
struct Bond {
    std::size_t i;
    std::size_t j;
    double hopping;
};

/// Couplings J(d) = J_s 2^{l s} at |d| = 2^l, normalized so the largest
/// coupling equals j0.
///
/// `coupling(i, j)` is the pair strength J(|i-j|).  `hopping(i, j)` is the
/// matrix element the pair enters the Hamiltonian with: on a periodic ring
/// the antipodal pair |i-j| = N/2 is reached by both windings (+N/2 and
/// -N/2) and therefore hops with 2 J(N/2).  This is what makes the
/// single-magnon spectrum equal E(k) = 2 J_s sum_l 2^{l s} cos(2^l k).
class CouplingModel {
public:
    CouplingModel(std::size_t n_sites, double s, double j0 = 1.0, Boundary boundary = Boundary::Periodic)
        : n_sites_(n_sites), s_(s), j0_(j0), boundary_(boundary)
    {
        if (n_sites < 4) throw std::invalid_argument("CouplingModel: n_sites must be >= 4");
        if (boundary == Boundary::Periodic && !is_power_of_two(n_sites))
            throw std::invalid_argument("CouplingModel: periodic boundary requires n_sites to be a power of 2");
        if (!std::isfinite(s)) throw std::invalid_argument("CouplingModel: exponent s must be finite");
        if (!(j0 > 0.0) || !std::isfinite(j0)) throw std::invalid_argument("CouplingModel: j0 must be positive");

        max_level_ = boundary == Boundary::Periodic ? log2_exact(n_sites) - 1
                                                    : static_cast<int>(std::bit_width(n_sites - 1)) - 1;
        scale_ = s <= 0.0 ? j0 : j0 * std::exp2(-static_cast<double>(max_level_) * s);
        levels_.resize(static_cast<std::size_t>(max_level_) + 1);
        for (int l = 0; l <= max_level_; ++l) levels_[static_cast<std::size_t>(l)] = scale_ * std::exp2(l * s);

        neighbors_.resize(n_sites);
        for (std::size_t i = 0; i < n_sites; ++i) {
            for (std::size_t j = 0; j < n_sites; ++j) {
                const double h = hopping(i, j);
                if (h != 0.0) neighbors_[i].push_back({j, h});
                if (h != 0.0 && i < j) bonds_.push_back({i, j, h});
            }
        }
    }

    std::size_t n_sites() const { return n_sites_; }
    double s() const { return s_; }
    double j0() const { return j0_; }
    Boundary boundary() const { return boundary_; }
    /// Overall scale J_s.
    double scale() const { return scale_; }
    /// Largest l with a coupling at distance 2^l.
    int max_level() const { return max_level_; }
    /// J_s 2^{l s} for l = 0..max_level().
    const std::vector<double>& level_strengths() const { return levels_; }

    /// Boundary-respecting separation: minimal image on the ring, literal otherwise.
    std::size_t archimedean_distance(std::size_t i, std::size_t j) const
    {
        check_index(i);
        check_index(j);
        const std::size_t d = i > j ? i - j : j - i;
        return boundary_ == Boundary::Periodic ? std::min(d, n_sites_ - d) : d;
    }

    double coupling(std::size_t i, std::size_t j) const
    {
        const std::size_t d = archimedean_distance(i, j);
        if (d == 0 || !is_power_of_two(d)) return 0.0;
        return levels_[static_cast<std::size_t>(log2_exact(d))];
    }

    double hopping(std::size_t i, std::size_t j) const
    {
        const double c = coupling(i, j);
        if (boundary_ == Boundary::Periodic && archimedean_distance(i, j) == n_sites_ / 2) return 2.0 * c;
        return c;
    }

    const std::vector<Neighbor>& neighbors(std::size_t i) const
    {
        check_index(i);
        return neighbors_[i];
    }
    const std::vector<Bond>& bonds() const { return bonds_; }

    /// Sum of |hopping| over bonds; a bound on the many-body spectral radius.
    double total_bond_strength() const
    {
        double sum = 0.0;
        for (const auto& b : bonds_) sum += std::abs(b.hopping);
        return sum;
    }

    void check_index(std::size_t i) const
    {
        if (i >= n_sites_) throw std::out_of_range("site index " + std::to_string(i) + " out of range");
    }

private:
    std::size_t n_sites_;
    double s_;
    double j0_;
    Boundary boundary_;
    int max_level_ = 0;
    double scale_ = 1.0;
    std::vector<double> levels_;
    std::vector<std::vector<Neighbor>> neighbors_;
    std::vector<Bond> bonds_;
};

/// 2-adic valuation of the separation i - j (taken mod N on a periodic ring).
inline int two_adic_valuation(const CouplingModel& model, std::size_t i, std::size_t j)
{
    model.check_index(i);
    model.check_index(j);
    if (i == j) throw std::invalid_argument("two_adic_norm: undefined for i == j");
    const std::size_t n = model.n_sites();
    const std::size_t x = model.boundary() == Boundary::Periodic ? (i + n - j) % n : (i > j ? i - j : j - i);
    return std::countr_zero(x);
}

/// |i - j|_2 = 2^{-v}.
inline double two_adic_norm(const CouplingModel& model, std::size_t i, std::size_t j)
{
    return std::exp2(-two_adic_valuation(model, i, j));
}

/// Edge count between leaves i and j of the depth-log2(N) binary tree whose
/// leaves are ordered by the Monna map; |i-j|_2 = 2^{d_tree/2} / N.
inline int tree_distance(const CouplingModel& model, std::size_t i, std::size_t j)
{
    if (model.boundary() != Boundary::Periodic)
        throw std::invalid_argument("tree_distance: defined for periodic boundary only");
    if (i == j) {
        model.check_index(i);
        return 0;
    }
    return 2 * (log2_exact(model.n_sites()) - two_adic_valuation(model, i, j));
}

/// BFS hop counts from `source` over the coupling graph.
inline std::vector<int> graph_distances_from(const CouplingModel& model, std::size_t source)
{
    model.check_index(source);
    std::vector<int> dist(model.n_sites(), -1);
    std::queue<std::size_t> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (const auto& nb : model.neighbors(u)) {
            if (dist[nb.site] < 0) {
                dist[nb.site] = dist[u] + 1;
                frontier.push(nb.site);
            }
        }
    }
    return dist;
}

inline int graph_distance(const CouplingModel& model, std::size_t i, std::size_t j)
{
    model.check_index(j);
    return graph_distances_from(model, i)[j];
}

/// All-pairs hop counts, row-major N x N.
inline std::vector<int> graph_distance_matrix(const CouplingModel& model)
{
    const std::size_t n = model.n_sites();
    std::vector<int> out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = graph_distances_from(model, i);
        std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    return out;
}

struct SiteDistance {
    std::size_t archimedean = 0;
    /// 2^{-v}; zero for i == j.
    double two_adic = 0.0;
    /// Set for periodic boundary only.
    std::optional<int> tree;
    int graph = 0;
};

inline SiteDistance site_distance(const CouplingModel& model, std::size_t i, std::size_t j)
{
    SiteDistance d;
    d.archimedean = model.archimedean_distance(i, j);
    d.graph = graph_distance(model, i, j);
    if (i != j) d.two_adic = two_adic_norm(model, i, j);
    if (model.boundary() == Boundary::Periodic) d.tree = tree_distance(model, i, j);
    return d;
}

}  // namespace treelike

#endif
