#ifndef TREELIKE_QUANTUM_EVOLUTION_HPP
#define TREELIKE_QUANTUM_EVOLUTION_HPP

// Real-time propagation e^{-iHt}: dense eigendecomposition per magnon
// sector, or a Chebyshev expansion for spaces too large to diagonalize.

#include <treelike/quantum/hamiltonian.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace treelike::quantum {

/// Eigenpairs of one magnon sector, H_n = V diag(E) V^T.
struct SectorEigensystem {
    SpinBasis basis;
    VectorXd energies;
    MatrixXd vectors;
};

inline SectorEigensystem diagonalize_sector(const CouplingModel& model, std::size_t magnons)
{
    SpinBasis basis(model.n_sites(), magnons);
    const SpinHamiltonian h(model, basis);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h.dense());
    if (solver.info() != Eigen::Success) throw std::runtime_error("sector diagonalization failed");
    return {std::move(basis), solver.eigenvalues(), solver.eigenvectors()};
}

/// Evolves full 2^N state vectors sector by sector.
class DenseSectorPropagator {
public:
    explicit DenseSectorPropagator(const CouplingModel& model) : n_sites_(model.n_sites())
    {
        if (n_sites_ > 14) throw std::length_error("DenseSectorPropagator: use the Chebyshev propagator above 14 sites");
        for (std::size_t n = 0; n <= n_sites_; ++n) sectors_.push_back(diagonalize_sector(model, n));
    }

    const std::vector<SectorEigensystem>& sectors() const { return sectors_; }

    VectorXcd evolve(const VectorXcd& psi, double t) const
    {
        if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << n_sites_))
            throw std::invalid_argument("DenseSectorPropagator: expected a full-space state");
        VectorXcd out(psi.size());
        for (const auto& sec : sectors_) {
            const auto dim = static_cast<Eigen::Index>(sec.basis.dimension());
            VectorXcd part(dim);
            for (Eigen::Index a = 0; a < dim; ++a) part[a] = psi[sec.basis.state(static_cast<std::size_t>(a))];
            VectorXcd coeff = sec.vectors.transpose() * part;
            for (Eigen::Index a = 0; a < dim; ++a) coeff[a] *= std::polar(1.0, -sec.energies[a] * t);
            part = sec.vectors * coeff;
            for (Eigen::Index a = 0; a < dim; ++a) out[sec.basis.state(static_cast<std::size_t>(a))] = part[a];
        }
        return out;
    }

private:
    std::size_t n_sites_;
    std::vector<SectorEigensystem> sectors_;
};

/// J_0(x) .. J_{order}(x) by Miller's backward recurrence, normalized with
/// J_0 + 2 sum_k J_{2k} = 1.
inline std::vector<double> bessel_j_sequence(int order, double x)
{
    std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const int start = 2 * ((std::max(order, static_cast<int>(ax)) + 15 + static_cast<int>(std::sqrt(40.0 * std::max(order, static_cast<int>(ax))))) / 2);
    std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
    j[static_cast<std::size_t>(start) + 1] = 0.0;
    j[static_cast<std::size_t>(start)] = 1e-300;
    for (int k = start; k > 0; --k) {
        j[static_cast<std::size_t>(k) - 1] = (2.0 * k / ax) * j[static_cast<std::size_t>(k)] - j[static_cast<std::size_t>(k) + 1];
        if (std::abs(j[static_cast<std::size_t>(k) - 1]) > 1e250) {
            for (int m = k - 1; m <= start; ++m) j[static_cast<std::size_t>(m)] *= 1e-250;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];
    for (int k = 0; k <= order; ++k) {
        double v = j[static_cast<std::size_t>(k)] / norm;
        if (x < 0.0 && (k % 2 == 1)) v = -v;
        out[static_cast<std::size_t>(k)] = v;
    }
    return out;
}

/// e^{-i H t} psi via the Chebyshev expansion
///   e^{-i a x t} = J_0(a t) + 2 sum_k (-i)^k J_k(a t) T_k(x),  x = H / a,
/// with a an upper bound on the spectral radius.
class ChebyshevPropagator {
public:
    explicit ChebyshevPropagator(const SpinHamiltonian& h, double tolerance = 1e-13)
        : h_(h), radius_(1.01 * h.spectral_bound() + 1e-12), tol_(tolerance)
    {
    }

    VectorXcd evolve(const VectorXcd& psi, double t) const
    {
        if (t == 0.0) return psi;
        const double x = radius_ * t;
        int order = static_cast<int>(std::abs(x)) + 20;
        std::vector<double> bessel = bessel_j_sequence(order + 40, x);
        while (order + 1 < static_cast<int>(bessel.size()) && std::abs(bessel[static_cast<std::size_t>(order)]) > tol_) ++order;

        const double inv = 1.0 / radius_;
        VectorXcd prev = psi;
        VectorXcd cur;
        h_.apply(psi, cur);
        cur *= inv;
        VectorXcd out = bessel[0] * psi;
        Complex phase(0.0, -1.0);
        out += 2.0 * phase * bessel[1] * cur;
        VectorXcd next;
        for (int k = 2; k <= order; ++k) {
            h_.apply(cur, next);
            next = 2.0 * inv * next - prev;
            phase *= Complex(0.0, -1.0);
            out += 2.0 * phase * bessel[static_cast<std::size_t>(k)] * next;
            prev.swap(cur);
            cur.swap(next);
        }
        return out;
    }

private:
    const SpinHamiltonian& h_;
    double radius_;
    double tol_;
};

}  // namespace treelike::quantum

#endif
