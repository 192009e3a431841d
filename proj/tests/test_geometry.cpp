#include <treelike/geometry.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace treelike;

namespace {

std::size_t reverse_bits_slow(std::size_t x, int bits)
{
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) {
        if (x & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    return r;
}

// Edge count between leaves a and b of a complete binary tree whose leaves,
// read left to right, are sites M(0), M(1), ...
int explicit_tree_distance(std::size_t n, std::size_t a, std::size_t b)
{
    const int depth = log2_exact(n);
    std::vector<std::size_t> leaf_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) leaf_of[monna_map(n, pos)] = pos;
    std::size_t x = leaf_of[a], y = leaf_of[b];
    int up = 0;
    while (x != y) {
        x >>= 1;
        y >>= 1;
        ++up;
    }
    (void)depth;
    return 2 * up;
}

}  // namespace

TEST(Coupling, SpecExamples)
{
    const CouplingModel m8(8, 0.0);
    EXPECT_DOUBLE_EQ(m8.coupling(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(m8.coupling(0, 3), 0.0);
    const CouplingModel m8s2(8, 2.0);
    EXPECT_DOUBLE_EQ(m8s2.coupling(0, 4), 1.0);
    EXPECT_DOUBLE_EQ(m8s2.coupling(0, 1), 1.0 / 16.0);
}

TEST(Coupling, SymmetricTranslationInvariantAndNormalized)
{
    for (double s = -3.0; s <= 3.0; s += 0.25) {
        for (std::size_t n : {8u, 16u, 32u}) {
            const CouplingModel m(n, s, 1.5);
            double largest = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_EQ(m.coupling(i, i), 0.0);
                for (std::size_t j = 0; j < n; ++j) {
                    EXPECT_EQ(m.coupling(i, j), m.coupling(j, i));
                    EXPECT_GE(m.coupling(i, j), 0.0);
                    EXPECT_DOUBLE_EQ(m.coupling((i + 1) % n, (j + 1) % n), m.coupling(i, j));
                    largest = std::max(largest, m.coupling(i, j));
                }
            }
            EXPECT_NEAR(largest, 1.5, 1e-12) << "s=" << s << " n=" << n;
        }
    }
}

TEST(Coupling, OpenBoundaryKeepsLiteralDistance)
{
    const CouplingModel m(12, 0.0, 1.0, Boundary::Open);
    EXPECT_EQ(m.coupling(0, 11), 0.0);
    EXPECT_EQ(m.coupling(0, 8), 1.0);
    EXPECT_EQ(m.archimedean_distance(0, 11), 11u);
    const CouplingModel p(16, 0.0);
    EXPECT_EQ(p.archimedean_distance(0, 15), 1u);
}

TEST(Coupling, AntipodalHopDoubled)
{
    const CouplingModel m(8, 0.0);
    EXPECT_DOUBLE_EQ(m.coupling(0, 4), 1.0);
    EXPECT_DOUBLE_EQ(m.hopping(0, 4), 2.0);
    EXPECT_DOUBLE_EQ(m.hopping(0, 2), 1.0);
}

TEST(Coupling, RejectsInvalidModels)
{
    EXPECT_THROW(CouplingModel(12, 0.0), std::invalid_argument);
    EXPECT_THROW(CouplingModel(2, 0.0), std::invalid_argument);
    EXPECT_THROW(CouplingModel(8, 0.0, -1.0), std::invalid_argument);
    EXPECT_THROW(CouplingModel(8, std::nan("")), std::invalid_argument);
    EXPECT_NO_THROW(CouplingModel(12, 0.0, 1.0, Boundary::Open));
    const CouplingModel m(8, 0.0);
    EXPECT_THROW(m.coupling(0, 8), std::out_of_range);
}

TEST(Monna, Examples)
{
    EXPECT_EQ(monna_map(8, 1), 4u);
    EXPECT_EQ(monna_map(8, 0), 0u);
    EXPECT_EQ(monna_map(8, 3), 6u);
    EXPECT_THROW(monna_map(12, 1), std::invalid_argument);
}

TEST(Monna, MatchesBruteForceAndIsInvolution)
{
    for (std::size_t n : {2u, 4u, 64u, 1024u}) {
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(monna_map(n, i), reverse_bits_slow(i, log2_exact(n)));
            EXPECT_EQ(monna_map(n, monna_map(n, i)), i);
        }
    }
}

TEST(TwoAdic, Examples)
{
    const CouplingModel m(16, 0.0);
    EXPECT_DOUBLE_EQ(two_adic_norm(m, 0, 4), 0.25);
    EXPECT_DOUBLE_EQ(two_adic_norm(m, 0, 3), 1.0);
    EXPECT_THROW(two_adic_norm(m, 5, 5), std::invalid_argument);
    const CouplingModel m8(8, 0.0);
    EXPECT_EQ(tree_distance(m8, 0, 4), 2);
    EXPECT_DOUBLE_EQ(two_adic_norm(m8, 0, 4), std::exp2(tree_distance(m8, 0, 4) / 2.0) / 8.0);
}

TEST(TwoAdic, TreeDistanceMatchesExplicitTree)
{
    for (std::size_t n : {8u, 32u}) {
        const CouplingModel m(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const int t = explicit_tree_distance(n, i, j);
                EXPECT_EQ(tree_distance(m, i, j), t);
                EXPECT_EQ(t % 2, 0);
                EXPECT_DOUBLE_EQ(two_adic_norm(m, i, j), std::exp2(t / 2.0) / static_cast<double>(n));
            }
        }
    }
}

TEST(TwoAdic, UltrametricOnRandomTriples)
{
    const CouplingModel m(256, 0.0);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> site(0, 255);
    int checked = 0;
    while (checked < 1000) {
        const auto a = site(rng), b = site(rng), c = site(rng);
        if (a == b || b == c || a == c) continue;
        EXPECT_LE(two_adic_norm(m, a, c), std::max(two_adic_norm(m, a, b), two_adic_norm(m, b, c)));
        ++checked;
    }
}

TEST(GraphDistance, Examples)
{
    const CouplingModel m(8, 0.0);
    EXPECT_EQ(graph_distance(m, 0, 3), 2);
    EXPECT_EQ(graph_distance(m, 0, 7), 1);
    const auto all = graph_distance_matrix(m);
    EXPECT_EQ(*std::max_element(all.begin(), all.end()), 2);
}

TEST(GraphDistance, DiameterBoundTriangleAndSIndependence)
{
    for (std::size_t n : {8u, 16u, 32u, 64u, 128u}) {
        const CouplingModel m(n, 0.0), m2(n, 1.7);
        const auto d = graph_distance_matrix(m);
        EXPECT_EQ(d, graph_distance_matrix(m2));
        const int bound = static_cast<int>(std::ceil(0.5 * log2_exact(n)));
        EXPECT_LE(*std::max_element(d.begin(), d.end()), bound);
        if (n <= 32) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t k = 0; k < n; ++k) EXPECT_LE(d[i * n + k], d[i * n + j] + d[j * n + k]);
        }
    }
}

TEST(GraphDistance, OpenChainFromBfs)
{
    const CouplingModel m(12, 0.0, 1.0, Boundary::Open);
    EXPECT_EQ(graph_distance(m, 0, 11), 3);
    EXPECT_EQ(graph_distance(m, 0, 3), 2);
    EXPECT_EQ(graph_distance(m, 0, 1), 1);
}

TEST(SiteDistance, CombinesAllNotions)
{
    const CouplingModel m(16, 0.0);
    const auto d = site_distance(m, 1, 13);
    EXPECT_EQ(d.archimedean, 4u);
    EXPECT_DOUBLE_EQ(d.two_adic, 0.25);
    ASSERT_TRUE(d.tree.has_value());
    EXPECT_EQ(*d.tree, 4);
    EXPECT_EQ(d.graph, 1);
    const CouplingModel open(12, 0.0, 1.0, Boundary::Open);
    EXPECT_FALSE(site_distance(open, 0, 5).tree.has_value());
}
