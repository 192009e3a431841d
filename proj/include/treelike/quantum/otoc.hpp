#ifndef TREELIKE_QUANTUM_OTOC_HPP
#define TREELIKE_QUANTUM_OTOC_HPP

// Out-of-time-order correlators C(i,j;t) = <|[S^z_i(0), S^z_j(t)]|^2> / S^2
// in the infinite-temperature ensemble at half filling, rho_0 = P_n / Z.

#include <treelike/geometry.hpp>
#include <treelike/parallel.hpp>
#include <treelike/quantum/evolution.hpp>
#include <treelike/stats.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treelike::quantum {

enum class OtocEnsemble { InfiniteTemperatureHalfFilling };

inline OtocEnsemble otoc_ensemble_from_string(const std::string& name)
{
    if (name == "infinite-half" || name == "infinite_temperature_half_filling") return OtocEnsemble::InfiniteTemperatureHalfFilling;
    throw std::invalid_argument("unsupported OTOC ensemble '" + name + "'");
}

struct SitePair {
    std::size_t i;
    std::size_t j;
};

struct OtocCurve {
    SitePair pair{};
    int graph_distance = 0;
    std::vector<double> times;
    std::vector<double> values;
    /// Standard error over typicality vectors; zero for exact traces.
    std::vector<double> standard_error;
};

enum class OtocMethod { Auto, ExactTrace, Typicality };

struct OtocOptions {
    OtocEnsemble ensemble = OtocEnsemble::InfiniteTemperatureHalfFilling;
    OtocMethod method = OtocMethod::Auto;
    /// Auto switches to typicality above this size.
    std::size_t exact_max_sites = 12;
    std::size_t typicality_vectors = 32;
    std::uint64_t seed = 12345;
    std::size_t threads = 0;
};

namespace detail {

inline void check_pairs(const CouplingModel& model, const std::vector<SitePair>& pairs)
{
    for (const auto& p : pairs) {
        model.check_index(p.i);
        model.check_index(p.j);
    }
}

}  // namespace detail

/// Exact sector trace.  With H_n = V E V^T,
///   S^z_j(t) = V (B o e^{i(E_a - E_b)t}) V^T,  B = V^T S^z_j V,
/// and since S^z_i is diagonal, |[S^z_i, S^z_j(t)]|^2 traces to the sum of
/// |S^z_j(t)_{xy}|^2 over basis pairs whose bit i differs.
inline std::vector<OtocCurve> otoc_exact(const CouplingModel& model, const std::vector<SitePair>& pairs,
                                         const std::vector<double>& times, std::size_t threads = 0)
{
    detail::check_pairs(model, pairs);
    const std::size_t n = model.n_sites();
    const auto sec = diagonalize_sector(model, n / 2);
    const MatrixXd& v = sec.vectors;
    const auto dim = static_cast<Eigen::Index>(sec.basis.dimension());
    const double z = static_cast<double>(dim);

    std::vector<OtocCurve> curves(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        curves[p].pair = pairs[p];
        curves[p].graph_distance = graph_distance(model, pairs[p].i, pairs[p].j);
        curves[p].times = times;
        curves[p].values.assign(times.size(), 0.0);
        curves[p].standard_error.assign(times.size(), 0.0);
    }
    std::vector<MatrixXd> eigen_sz(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        eigen_sz[p] = v.transpose() * sz_diagonal(sec.basis, pairs[p].j).asDiagonal() * v;
    }
    // one work item per (pair, time)
    parallel_for(pairs.size() * times.size(), threads, [&](std::size_t item) {
        const std::size_t p = item / times.size();
        const std::size_t k = item % times.size();
        const std::size_t i = pairs[p].i;
        const MatrixXd& b = eigen_sz[p];
        const double t = times[k];
        MatrixXd re(dim, dim), im(dim, dim);
        for (Eigen::Index c = 0; c < dim; ++c) {
            for (Eigen::Index r = 0; r < dim; ++r) {
                const double w = (sec.energies[r] - sec.energies[c]) * t;
                re(r, c) = b(r, c) * std::cos(w);
                im(r, c) = b(r, c) * std::sin(w);
            }
        }
        const MatrixXd bt_re = v * re * v.transpose();
        const MatrixXd bt_im = v * im * v.transpose();
        double sum = 0.0;
        for (Eigen::Index c = 0; c < dim; ++c) {
            const State xc = sec.basis.state(static_cast<std::size_t>(c));
            for (Eigen::Index r = 0; r < dim; ++r) {
                const State xr = sec.basis.state(static_cast<std::size_t>(r));
                if ((((xr ^ xc) >> i) & 1u) == 0) continue;
                sum += bt_re(r, c) * bt_re(r, c) + bt_im(r, c) * bt_im(r, c);
            }
        }
        curves[p].values[k] = 4.0 * sum / z;
    });
    return curves;
}

/// Stochastic trace with Haar-random vectors in the half-filling sector:
/// C = 4 E_psi ||[S^z_i, S^z_j(t)] psi||^2, propagated with Chebyshev
/// expansions.
inline std::vector<OtocCurve> otoc_typicality(const CouplingModel& model, const std::vector<SitePair>& pairs,
                                              const std::vector<double>& times, std::size_t n_vectors,
                                              std::uint64_t seed, std::size_t threads = 0)
{
    detail::check_pairs(model, pairs);
    if (n_vectors < 2) throw std::invalid_argument("otoc_typicality: need at least two vectors");
    const std::size_t n = model.n_sites();
    const SpinHamiltonian h(model, SpinBasis(n, n / 2));
    const ChebyshevPropagator prop(h);
    const auto dim = static_cast<Eigen::Index>(h.dimension());

    std::vector<VectorXcd> vectors(n_vectors);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (auto& psi : vectors) {
        psi.resize(dim);
        for (Eigen::Index a = 0; a < dim; ++a) psi[a] = Complex(gauss(rng), gauss(rng));
        psi.normalize();
    }

    // samples[p][k][v]
    std::vector<std::vector<std::vector<double>>> samples(
        pairs.size(), std::vector<std::vector<double>>(times.size(), std::vector<double>(n_vectors)));
    parallel_for(pairs.size() * times.size() * n_vectors, threads, [&](std::size_t item) {
        const std::size_t vi = item % n_vectors;
        const std::size_t k = (item / n_vectors) % times.size();
        const std::size_t p = item / (n_vectors * times.size());
        const VectorXd zi = sz_diagonal(h.basis(), pairs[p].i);
        const VectorXd zj = sz_diagonal(h.basis(), pairs[p].j);
        const double t = times[k];
        auto heisenberg = [&](const VectorXcd& phi) {
            VectorXcd fwd = prop.evolve(phi, t);
            fwd = (zj.array() * fwd.array()).matrix();
            return prop.evolve(fwd, -t);
        };
        const VectorXcd& psi = vectors[vi];
        const VectorXcd a = (zi.array() * heisenberg(psi).array()).matrix();
        const VectorXcd b = heisenberg((zi.array() * psi.array()).matrix());
        samples[p][k][vi] = 4.0 * (a - b).squaredNorm();
    });

    std::vector<OtocCurve> curves(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        curves[p].pair = pairs[p];
        curves[p].graph_distance = graph_distance(model, pairs[p].i, pairs[p].j);
        curves[p].times = times;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto& s = samples[p][k];
            const double m = stats::mean(s);
            double var = 0.0;
            for (double x : s) var += (x - m) * (x - m);
            var /= static_cast<double>(s.size() - 1);
            curves[p].values.push_back(m);
            curves[p].standard_error.push_back(std::sqrt(var / static_cast<double>(s.size())));
        }
    }
    return curves;
}

inline std::vector<OtocCurve> otoc(const CouplingModel& model, const std::vector<SitePair>& pairs,
                                   const std::vector<double>& times, const OtocOptions& opt = {})
{
    if (opt.ensemble != OtocEnsemble::InfiniteTemperatureHalfFilling) throw std::invalid_argument("unsupported ensemble");
    const bool exact = opt.method == OtocMethod::ExactTrace ||
                       (opt.method == OtocMethod::Auto && model.n_sites() <= opt.exact_max_sites);
    if (exact && model.n_sites() > 14) throw std::invalid_argument("exact OTOC trace limited to N <= 14");
    if (model.n_sites() > 16) throw std::invalid_argument("OTOC limited to N <= 16");
    return exact ? otoc_exact(model, pairs, times, opt.threads)
                 : otoc_typicality(model, pairs, times, opt.typicality_vectors, opt.seed, opt.threads);
}

/// <0| [c_i, c+_j(t)] [c_j(t), c+_i] |0> over the full 2^N space, with c the
/// spin lowering operator and |0> the all-down vacuum.
inline std::vector<double> one_magnon_otoc(const CouplingModel& model, std::size_t i, std::size_t j,
                                           const std::vector<double>& times)
{
    model.check_index(i);
    model.check_index(j);
    const std::size_t n = model.n_sites();
    if (n > 10) throw std::invalid_argument("one_magnon_otoc: full-space route limited to N <= 10");
    const SpinHamiltonian h(model, SpinBasis(n));
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h.dense());
    const MatrixXcd vecs = solver.eigenvectors().cast<Complex>();
    const auto dim = static_cast<Eigen::Index>(h.dimension());

    auto raising = [&](std::size_t site) {
        MatrixXcd m = MatrixXcd::Zero(dim, dim);
        for (State x = 0; x < static_cast<State>(dim); ++x) {
            if (!((x >> site) & 1u)) m(static_cast<Eigen::Index>(x | (State{1} << site)), static_cast<Eigen::Index>(x)) = 1.0;
        }
        return m;
    };
    const MatrixXcd up_i = raising(i);
    const MatrixXcd up_j = raising(j);
    const MatrixXcd down_i = up_i.adjoint();

    std::vector<double> out;
    for (double t : times) {
        VectorXcd phase(dim);
        for (Eigen::Index a = 0; a < dim; ++a) phase[a] = std::polar(1.0, -solver.eigenvalues()[a] * t);
        const MatrixXcd u = vecs * phase.asDiagonal() * vecs.adjoint();
        const MatrixXcd up_j_t = u.adjoint() * up_j * u;
        const MatrixXcd down_j_t = up_j_t.adjoint();
        const MatrixXcd k1 = down_i * up_j_t - up_j_t * down_i;
        const MatrixXcd k2 = down_j_t * up_i - up_i * down_j_t;
        out.push_back((k1 * k2)(0, 0).real());
    }
    return out;
}

struct PowerLawFit {
    double exponent = 0.0;
    double standard_error = 0.0;
    std::size_t points = 0;
};

/// Log-log slope of C(t) over t in [t_lo, t_hi], keeping C > floor.
inline PowerLawFit short_time_exponent(std::span<const double> times, std::span<const double> values, double t_lo,
                                       double t_hi, double floor = 1e-12)
{
    std::vector<double> x, y;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t_lo || times[k] > t_hi || times[k] <= 0.0 || !(values[k] > floor)) continue;
        x.push_back(std::log(times[k]));
        y.push_back(std::log(values[k]));
    }
    if (x.size() < 2) throw std::invalid_argument("short_time_exponent: fit window empty after floor filtering");
    const auto line = stats::fit_line(x, y);
    return {line.slope, line.slope_stderr, x.size()};
}

/// n log-spaced times in [t_lo, t_hi].
inline std::vector<double> log_time_grid(double t_lo, double t_hi, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = t_lo * std::pow(t_hi / t_lo, n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0);
    return t;
}

}  // namespace treelike::quantum

#endif
