#ifndef TREELIKE_QUANTUM_BASIS_HPP
#define TREELIKE_QUANTUM_BASIS_HPP

// Computational bases for spin-1/2 exact diagonalization.  Bit j of a basis
// state is 1 when site j carries a magnon (spin up above the all-down
// vacuum).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treelike::quantum {

using State = std::uint32_t;

inline constexpr std::size_t max_sites = 20;
inline constexpr std::size_t max_dimension = std::size_t{1} << 20;

inline std::size_t binomial(std::size_t n, std::size_t k)
{
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Full 2^N space or a fixed-magnon-number sector, states sorted ascending.
class SpinBasis {
public:
    explicit SpinBasis(std::size_t n_sites, std::optional<std::size_t> magnons = std::nullopt)
        : n_sites_(n_sites), magnons_(magnons)
    {
        if (n_sites == 0 || n_sites > max_sites)
            throw std::invalid_argument("SpinBasis: n_sites must be in 1.." + std::to_string(max_sites));
        if (magnons && *magnons > n_sites) throw std::invalid_argument("SpinBasis: more magnons than sites");
        const std::size_t dim = magnons ? binomial(n_sites, *magnons) : (std::size_t{1} << n_sites);
        if (dim > max_dimension) throw std::length_error("SpinBasis: dimension exceeds 2^20");
        states_.reserve(dim);
        const State end = State{1} << n_sites;
        for (State x = 0; x < end; ++x) {
            if (!magnons || static_cast<std::size_t>(std::popcount(x)) == *magnons) states_.push_back(x);
        }
    }

    std::size_t n_sites() const { return n_sites_; }
    std::optional<std::size_t> magnons() const { return magnons_; }
    std::size_t dimension() const { return states_.size(); }
    bool full() const { return !magnons_; }
    State state(std::size_t index) const { return states_[index]; }
    const std::vector<State>& states() const { return states_; }

    /// Index of `x`, or dimension() when absent.
    std::size_t index(State x) const
    {
        if (full()) return x < states_.size() ? x : states_.size();
        const auto it = std::lower_bound(states_.begin(), states_.end(), x);
        return (it != states_.end() && *it == x) ? static_cast<std::size_t>(it - states_.begin()) : states_.size();
    }

private:
    std::size_t n_sites_;
    std::optional<std::size_t> magnons_;
    std::vector<State> states_;
};

/// Cyclic shift of every site j -> j + shift (mod N).
inline State translate(State x, std::size_t n_sites, std::size_t shift)
{
    shift %= n_sites;
    if (shift == 0) return x;
    const State mask = (State{1} << n_sites) - 1;
    return ((x << shift) | (x >> (n_sites - shift))) & mask;
}

/// Site reflection j -> (N - j) mod N.
inline State reflect(State x, std::size_t n_sites)
{
    State r = x & 1u;
    for (std::size_t j = 1; j < n_sites; ++j) {
        if ((x >> j) & 1u) r |= State{1} << (n_sites - j);
    }
    return r;
}

struct Representative {
    State state;
    /// Smallest R > 0 with T^R x = x.
    std::size_t period;
};

/// Translation-symmetric sector with fixed magnon number and crystal momentum
/// k = 2 pi m / N.  Each basis vector is the normalized Bloch sum
///   |r, k> = (1/sqrt(N_r)) sum_{l=0}^{N-1} e^{-i k l} T^l |r>,  N_r = N^2 / R,
/// over the orbit representative r (smallest member) with period R
/// compatible with k (m R divisible by N).
class MomentumBasis {
public:
    MomentumBasis(std::size_t n_sites, std::size_t magnons, std::size_t momentum)
        : n_sites_(n_sites), magnons_(magnons), momentum_(momentum % n_sites)
    {
        const SpinBasis sector(n_sites, magnons);
        for (State x : sector.states()) {
            const auto [rep, shift] = canonical(x);
            if (rep != x) continue;
            std::size_t period = n_sites;
            for (std::size_t r = 1; r < n_sites; ++r) {
                if (translate(x, n_sites, r) == x) {
                    period = r;
                    break;
                }
            }
            if ((momentum_ * period) % n_sites == 0) reps_.push_back({x, period});
        }
    }

    std::size_t n_sites() const { return n_sites_; }
    std::size_t magnons() const { return magnons_; }
    std::size_t momentum() const { return momentum_; }
    std::size_t dimension() const { return reps_.size(); }
    const std::vector<Representative>& representatives() const { return reps_; }

    /// Smallest translate of x and the shift l with T^l x = representative.
    std::pair<State, std::size_t> canonical(State x) const
    {
        State best = x;
        std::size_t shift = 0;
        for (std::size_t l = 1; l < n_sites_; ++l) {
            const State y = translate(x, n_sites_, l);
            if (y < best) {
                best = y;
                shift = l;
            }
        }
        return {best, shift};
    }

    /// Index of a representative, or dimension() when absent.
    std::size_t index(State rep) const
    {
        const auto it = std::lower_bound(reps_.begin(), reps_.end(), rep,
                                         [](const Representative& r, State s) { return r.state < s; });
        return (it != reps_.end() && it->state == rep) ? static_cast<std::size_t>(it - reps_.begin()) : reps_.size();
    }

private:
    std::size_t n_sites_;
    std::size_t magnons_;
    std::size_t momentum_;
    std::vector<Representative> reps_;
};

}  // namespace treelike::quantum

#endif
