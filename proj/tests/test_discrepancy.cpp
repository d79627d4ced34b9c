#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

#include "kinetikos/discrepancy.hpp"
#include "kinetikos/stats.hpp"
#include "support/oracles.hpp"

using namespace kinetikos;

namespace {

MovingPointSet linear_1d(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    return testing::random_moving_set(rng, n, 1, 1, 1.0);
}

}  // namespace

TEST_CASE("random colorings", "[discrepancy]")
{
    const auto a = color_random(1, 5);
    CHECK(a.size() == 1);
    CHECK(std::abs(a.values[0]) == 1);
    CHECK(color_random(100, 5).values == color_random(100, 5).values);
    CHECK(color_random(100, 5).values != color_random(100, 6).values);
    const auto big = color_random(10000, 8);
    const double mean = std::accumulate(big.values.begin(), big.values.end(), 0.0) / 10000.0;
    CHECK(std::abs(mean) <= 0.05);
    CHECK_THROWS_AS(color_random(0, 1), PreconditionError);
}

TEST_CASE("all-ones coloring", "[discrepancy]")
{
    const auto set = linear_1d(1, 20);
    const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::intervals());
    const auto d = kinetic_discrepancy(cat, color_constant(20));
    CHECK(d.value == cat.largest_edge());
    CHECK(d.witness.size() == d.value);
}

TEST_CASE("paired trajectories with opposite colors cancel", "[discrepancy]")
{
    // Each pair moves in lockstep a hair apart; pairs cross each other.
    Rng rng(2);
    std::vector<Trajectory> tr;
    Coloring chi;
    for (int i = 0; i < 8; ++i) {
        const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
        tr.push_back(Trajectory({Polynomial{a, b}}));
        tr.push_back(Trajectory({Polynomial{a + 1e-6, b}}));
        chi.values.push_back(1);
        chi.values.push_back(-1);
    }
    const MovingPointSet set(std::move(tr), 1, 1, 1.0);
    const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::intervals());
    std::size_t closed = 0;
    for (const auto& e : cat.edges()) {
        bool pair_closed = true;
        for (std::size_t p = 0; p < 16; p += 2) pair_closed = pair_closed && (e.contains(p) == e.contains(p + 1));
        if (!pair_closed) continue;
        ++closed;
        CHECK(signed_sum(e, chi) == 0);
    }
    CHECK(closed > 8);
    // Two pairs interleave briefly while crossing, so a split edge can
    // carry two same-colored halves.
    CHECK(kinetic_discrepancy(cat, chi).value <= 2);
}

TEST_CASE("random colorings respect the union bound", "[discrepancy][property]")
{
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto set = linear_1d(100 + seed, 64);
        const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::intervals());
        const auto d = kinetic_discrepancy(cat, color_random(64, seed));
        if (static_cast<double>(d.value) <= random_coloring_reference(64, cat.size())) ++ok;
    }
    CHECK(ok >= 45);
}

TEST_CASE("signed sums: parity and symmetry", "[discrepancy][property]")
{
    const auto set = linear_1d(3, 24);
    const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::intervals());
    const auto chi = color_random(24, 3);
    Coloring neg = chi;
    for (auto& v : neg.values) v = -v;
    for (const auto& e : cat.edges()) CHECK(std::abs(signed_sum(e, chi)) % 2 == static_cast<int>(e.size() % 2));
    CHECK(kinetic_discrepancy(cat, chi).value == kinetic_discrepancy(cat, neg).value);
}

TEST_CASE("local search", "[discrepancy]")
{
    SECTION("balanced coloring is left alone")
    {
        const MovingPointSet set({Trajectory::stationary(Point{0.0}), Trajectory::stationary(Point{1.0})}, 1, 0, 1.0);
        Coloring chi;
        chi.values = {1, -1};
        const auto tr = improve_coloring(set, RangeFamily::intervals(), chi, 10);
        CHECK(tr.coloring.values == chi.values);
        CHECK(tr.flips.empty());
    }
    SECTION("all ones improves strictly")
    {
        const auto set = linear_1d(4, 16);
        const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::intervals());
        const auto before = kinetic_discrepancy(cat, color_constant(16)).value;
        const auto tr = improve_coloring(cat, color_constant(16), 100);
        CHECK(kinetic_discrepancy(cat, tr.coloring).value < before);
        CHECK(tr.maxima.back() == kinetic_discrepancy(cat, tr.coloring).value);
    }
    SECTION("maxima never increase")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto set = linear_1d(50 + seed, 40);
            const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::intervals());
            const auto start = color_random(40, seed);
            const auto tr = improve_coloring(cat, start, 200);
            CHECK(tr.maxima.front() == kinetic_discrepancy(cat, start).value);
            for (std::size_t i = 1; i < tr.maxima.size(); ++i) CHECK(tr.maxima[i] <= tr.maxima[i - 1]);
        }
    }
}

TEST_CASE("improved discrepancy grows sublinearly on kinetic halflines", "[discrepancy][property]")
{
    const std::vector<double> ns{16, 32, 64, 128};
    std::vector<double> slopes;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::vector<double> disc;
        for (double n : ns) {
            const auto set = linear_1d(seed * 1000 + static_cast<std::uint64_t>(n), static_cast<std::size_t>(n));
            const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::halfspaces());
            const auto tr = improve_coloring(cat, color_random(static_cast<std::size_t>(n), seed), 1000);
            disc.push_back(static_cast<double>(std::max<std::size_t>(1, tr.maxima.back())));
        }
        slopes.push_back(loglog_slope(ns, disc));
    }
    CHECK(median(slopes) <= 0.5 + 0.15);
}

TEST_CASE("coloring export", "[discrepancy]")
{
    Coloring c;
    c.values = {1, -1};
    std::ostringstream os;
    write_coloring(os, c);
    CHECK(os.str() == "index,color\n0,1\n1,-1\n");
}
