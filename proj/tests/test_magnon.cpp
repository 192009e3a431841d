#include <treelike/geometry.hpp>
#include <treelike/magnon.hpp>
#include <treelike/stats.hpp>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace treelike;

namespace {

Eigen::MatrixXd hopping_matrix(const CouplingModel& m)
{
    const auto n = static_cast<Eigen::Index>(m.n_sites());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) h(i, j) = m.hopping(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return h;
}

// Eq. 3 written out term by term, independent of the library's level table.
double dispersion_formula(std::size_t n, double s, double k)
{
    const int lmax = log2_exact(n) - 1;
    const double js = s <= 0.0 ? 1.0 : std::exp2(-lmax * s);
    double e = 0.0;
    for (int l = 0; l <= lmax; ++l) e += std::exp2(l * s) * std::cos(std::exp2(l) * k);
    return 2.0 * js * e;
}

}  // namespace

TEST(Dispersion, Examples)
{
    const CouplingModel m(8, 0.0);
    EXPECT_NEAR(dispersion_at(m, 0.0), 6.0, 1e-14);
    EXPECT_NEAR(dispersion_at(m, std::numbers::pi), 2.0, 1e-14);
    EXPECT_THROW(dispersion(CouplingModel(12, 0.0, 1.0, Boundary::Open)), std::invalid_argument);
}

TEST(Dispersion, MatchesFormulaAndIsEven)
{
    for (double s : {-1.5, 0.0, 0.7}) {
        const CouplingModel m(64, s);
        const auto t = dispersion(m);
        for (std::size_t q = 0; q < t.size(); ++q) {
            EXPECT_NEAR(t.energies[q], dispersion_formula(64, s, t.wavenumber(q)), 1e-12);
            EXPECT_NEAR(t.energies[q], t.energies[(64 - q) % 64], 1e-12);
        }
    }
}

TEST(Dispersion, EqualsCirculantEigenvalues)
{
    for (double s : {-2.0, 0.0, 2.0}) {
        const CouplingModel m(128, s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hopping_matrix(m), Eigen::EigenvaluesOnly);
        auto table = dispersion(m).energies;
        std::sort(table.begin(), table.end());
        for (std::size_t q = 0; q < table.size(); ++q) EXPECT_NEAR(table[q], solver.eigenvalues()[static_cast<Eigen::Index>(q)], 1e-9);
    }
}

TEST(Dispersion, MonnaWavenumberSmoothsPositiveS)
{
    EXPECT_EQ(monna_wavenumber(8, 1), 4u);
    EXPECT_EQ(monna_wavenumber(8, 0), 0u);
    const auto table = dispersion(CouplingModel(128, 2.0));
    EXPECT_LT(total_variation(monna_ordered(table)), total_variation(table.energies));
}

TEST(Evolution, InitialStateIsLocalized)
{
    const CouplingModel m(16, 0.3);
    const auto ev = evolve_magnon(m, 5, {0.0});
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(ev.at(0, j), j == 5 ? 1.0 : 0.0, 1e-15);
}

TEST(Evolution, MatchesDenseMatrixExponential)
{
    for (double s : {-1.0, 0.0, 1.0}) {
        const CouplingModel m(8, s);
        const Eigen::MatrixXcd h = hopping_matrix(m).cast<std::complex<double>>();
        const auto times = make_time_grid(20.0, 0.25);
        const auto ev = evolve_magnon(m, 3, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const Eigen::MatrixXcd u = (std::complex<double>(0.0, -times[k]) * h).exp();
            for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(ev.at(k, j), std::norm(u(static_cast<Eigen::Index>(j), 3)), 1e-9);
        }
    }
}

TEST(Evolution, NormReflectionAndTranslation)
{
    const CouplingModel m(64, -0.5);
    const auto times = make_time_grid(10.0, 0.5);
    const auto a = evolve_magnon(m, 20, times);
    const auto b = evolve_magnon(m, 27, times);
    EXPECT_LT(a.max_norm_drift, 1e-10);
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t d = 0; d < 64; ++d) {
            EXPECT_NEAR(a.at(k, (20 + d) % 64), a.at(k, (20 + 64 - d) % 64), 1e-12);
            EXPECT_NEAR(a.at(k, (20 + d) % 64), b.at(k, (27 + d) % 64), 1e-12);
        }
    }
}

TEST(Evolution, PropagatorAmplitudeMatchesField)
{
    const CouplingModel m(32, 0.5);
    const MagnonPropagator p(m);
    const auto f = p.field(4, 1.7);
    for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(std::abs(f.amplitudes[j] - p.amplitude(4, j, 1.7)), 0.0, 1e-12);
    EXPECT_NEAR(f.norm(), 1.0, 1e-12);
}

TEST(Evolution, MonnaReorderPermutesColumns)
{
    const CouplingModel m(16, 1.0);
    const auto ev = evolve_magnon(m, 8, {0.0, 1.0});
    const auto r = monna_reordered(ev);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(r.at(1, monna_map(16, j)), ev.at(1, j));
}

TEST(Threshold, SourceIsZeroAndUnreachedFlagged)
{
    const CouplingModel m(32, 0.0);
    const auto ev = evolve_magnon(m, 16, make_time_grid(0.1, 0.02));
    const auto tt = threshold_times(m, ev, 1.0 / (32.0 * 32.0));
    EXPECT_EQ(tt.t_eps[16], 0.0);
    EXPECT_GT(tt.unreached_count(), 0u);
    EXPECT_THROW(make_time_grid(1.0, 0.0), std::invalid_argument);
}

TEST(Threshold, BisectionHitsEpsilonExactly)
{
    const CouplingModel m(32, -1.0);
    const auto ev = evolve_magnon(m, 16, make_time_grid(30.0, 0.1));
    const double eps = 1.0 / 1024.0;
    const auto tt = threshold_times(m, ev, eps);
    const auto coarse = threshold_times(ev, eps);
    const MagnonPropagator p(m);
    for (std::size_t j = 0; j < 32; ++j) {
        if (j == 16 || !tt.reached(j)) continue;
        EXPECT_NEAR(std::norm(p.amplitude(16, j, tt.t_eps[j])), eps, 1e-9 * eps);
        EXPECT_LT(std::abs(tt.t_eps[j] - coarse.t_eps[j]), 0.1);
    }
}

TEST(Threshold, GraphDistanceLightConeAtSZero)
{
    const CouplingModel m(128, 0.0);
    const auto ev = evolve_magnon(m, 64, make_time_grid(50.0, 0.02));
    const auto tt = threshold_times(m, ev, 1.0 / (128.0 * 128.0));
    const auto dist = graph_distances_from(m, 64);
    std::vector<double> r, t;
    for (std::size_t j = 0; j < 128; ++j) {
        if (j == 64) continue;
        ASSERT_TRUE(tt.reached(j));
        r.push_back(dist[j]);
        t.push_back(tt.t_eps[j]);
    }
    EXPECT_GT(stats::pearson(r, t), 0.9);
}

TEST(Threshold, LinearConeAtStronglyNegativeS)
{
    // Far from the source the cone is ballistic: equal distance increments
    // cost equal time.
    const CouplingModel m(128, -2.0);
    const auto ev = evolve_magnon(m, 64, make_time_grid(50.0, 0.02));
    const auto tt = threshold_times(m, ev, 1.0 / (128.0 * 128.0));
    std::vector<double> d, t;
    for (std::size_t k = 8; k <= 56; ++k) {
        d.push_back(static_cast<double>(k));
        t.push_back(tt.t_eps[64 + k]);
    }
    EXPECT_GT(stats::pearson(d, t), 0.99);
}

// At eps = 1/N^2 both sites cross while n_d ~ (J_d t)^2 from the direct
// hop, so t(d=2) / t(d=1) ~ J_1 / J_2 = 2^-s.
TEST(Threshold, NearestPairsAtStronglyNegativeS)
{
    const CouplingModel m(16, -2.0);
    const auto ev = evolve_magnon(m, 8, make_time_grid(10.0, 0.01));
    const auto tt = threshold_times(m, ev, 1.0 / 256.0);
    const double ratio = tt.t_eps[10] / tt.t_eps[9];
    EXPECT_NEAR(ratio, 4.0, 0.4) << "t(d=1)=" << tt.t_eps[9] << " t(d=2)=" << tt.t_eps[10];
    EXPECT_NEAR(tt.t_eps[9], 1.0 / 16.0, 0.005);
}
