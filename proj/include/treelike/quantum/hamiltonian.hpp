#ifndef TREELIKE_QUANTUM_HAMILTONIAN_HPP
#define TREELIKE_QUANTUM_HAMILTONIAN_HPP

// H = sum_{i<j} h_ij (S+_i S-_j + S+_j S-_i) for S = 1/2, where h_ij is the
// hopping element of the coupling model.  Conserves the magnon number.

#include <treelike/geometry.hpp>
#include <treelike/quantum/basis.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace treelike::quantum {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct FlipFlop {
    State mask;
    double hopping;
};

inline std::vector<FlipFlop> flip_flops(const CouplingModel& model)
{
    if (model.n_sites() > max_sites) throw std::length_error("quantum model limited to 20 sites");
    std::vector<FlipFlop> out;
    for (const auto& b : model.bonds()) out.push_back({(State{1} << b.i) | (State{1} << b.j), b.hopping});
    return out;
}

class SpinHamiltonian {
public:
    SpinHamiltonian(const CouplingModel& model, SpinBasis basis)
        : basis_(std::move(basis)), terms_(flip_flops(model)), bound_(model.total_bond_strength())
    {
        if (basis_.n_sites() != model.n_sites()) throw std::invalid_argument("SpinHamiltonian: basis/model size mismatch");
        if (!basis_.full()) {
            lookup_.assign(std::size_t{1} << basis_.n_sites(), invalid);
            for (std::size_t a = 0; a < basis_.dimension(); ++a) lookup_[basis_.state(a)] = static_cast<std::uint32_t>(a);
        }
    }

    const SpinBasis& basis() const { return basis_; }
    std::size_t dimension() const { return basis_.dimension(); }
    /// Gershgorin-type bound on the spectral radius.
    double spectral_bound() const { return bound_; }

    /// out = H in
    template <typename Scalar>
    void apply(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& in, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& out) const
    {
        out.resize(in.size());
        const auto dim = static_cast<Eigen::Index>(dimension());
        for (Eigen::Index a = 0; a < dim; ++a) {
            const State x = basis_.state(static_cast<std::size_t>(a));
            Scalar acc{0};
            for (const auto& t : terms_) {
                if (std::popcount(x & t.mask) != 1) continue;
                acc += t.hopping * in[static_cast<Eigen::Index>(index_of(x ^ t.mask))];
            }
            out[a] = acc;
        }
    }

    MatrixXd dense() const
    {
        if (dimension() > 16384) throw std::length_error("SpinHamiltonian::dense: sector too large");
        MatrixXd h = MatrixXd::Zero(static_cast<Eigen::Index>(dimension()), static_cast<Eigen::Index>(dimension()));
        for_each_element([&](std::size_t row, std::size_t col, double v) {
            h(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += v;
        });
        return h;
    }

    Eigen::SparseMatrix<double, Eigen::RowMajor> sparse() const
    {
        std::vector<Eigen::Triplet<double>> trip;
        for_each_element([&](std::size_t row, std::size_t col, double v) {
            trip.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
        });
        Eigen::SparseMatrix<double, Eigen::RowMajor> h(static_cast<Eigen::Index>(dimension()),
                                                       static_cast<Eigen::Index>(dimension()));
        h.setFromTriplets(trip.begin(), trip.end());
        return h;
    }

    std::size_t index_of(State x) const { return basis_.full() ? x : lookup_[x]; }

private:
    static constexpr std::uint32_t invalid = 0xffffffffu;

    template <typename F>
    void for_each_element(F&& f) const
    {
        for (std::size_t a = 0; a < dimension(); ++a) {
            const State x = basis_.state(a);
            for (const auto& t : terms_) {
                if (std::popcount(x & t.mask) == 1) f(index_of(x ^ t.mask), a, t.hopping);
            }
        }
    }

    SpinBasis basis_;
    std::vector<FlipFlop> terms_;
    std::vector<std::uint32_t> lookup_;
    double bound_;
};

/// Diagonal of S^z_site over a basis.
inline VectorXd sz_diagonal(const SpinBasis& basis, std::size_t site)
{
    VectorXd d(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t a = 0; a < basis.dimension(); ++a)
        d[static_cast<Eigen::Index>(a)] = ((basis.state(a) >> site) & 1u) ? 0.5 : -0.5;
    return d;
}

/// Diagonal of sum_j S^z_j.
inline VectorXd total_sz_diagonal(const SpinBasis& basis)
{
    VectorXd d(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t a = 0; a < basis.dimension(); ++a)
        d[static_cast<Eigen::Index>(a)] =
            static_cast<double>(std::popcount(basis.state(a))) - 0.5 * static_cast<double>(basis.n_sites());
    return d;
}

inline double energy(const SpinHamiltonian& h, const VectorXcd& psi)
{
    VectorXcd hpsi;
    h.apply(psi, hpsi);
    return psi.dot(hpsi).real();
}

/// Dense Hamiltonian block in a momentum sector; element
/// <rep_b, k| H |rep_a, k> += h e^{-i k l} sqrt(R_a / R_b) for each flip-flop
/// x_b of rep_a with T^l x_b = rep_b.
inline MatrixXcd momentum_sector_hamiltonian(const CouplingModel& model, const MomentumBasis& basis)
{
    if (model.boundary() != Boundary::Periodic) throw std::invalid_argument("momentum sectors require periodic boundary");
    if (model.n_sites() != basis.n_sites()) throw std::invalid_argument("momentum basis/model size mismatch");
    const auto terms = flip_flops(model);
    const double k = 2.0 * std::numbers::pi * static_cast<double>(basis.momentum()) / static_cast<double>(basis.n_sites());
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    MatrixXcd h = MatrixXcd::Zero(dim, dim);
    const auto& reps = basis.representatives();
    for (std::size_t a = 0; a < reps.size(); ++a) {
        const State x = reps[a].state;
        for (const auto& t : terms) {
            if (std::popcount(x & t.mask) != 1) continue;
            const auto [rep, shift] = basis.canonical(x ^ t.mask);
            const std::size_t b = basis.index(rep);
            if (b == basis.dimension()) continue;  // orbit incompatible with k
            const double amp = t.hopping * std::sqrt(static_cast<double>(reps[a].period) / static_cast<double>(reps[b].period));
            h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) += std::polar(amp, -k * static_cast<double>(shift));
        }
    }
    return h;
}

}  // namespace treelike::quantum

#endif
