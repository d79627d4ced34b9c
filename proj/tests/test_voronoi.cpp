#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

#include "kinetikos/voronoi.hpp"
#include "support/oracles.hpp"

using namespace kinetikos;

namespace {

constexpr double kThirtyDegrees = std::numbers::pi / 6.0;

Point random_unit(Rng& rng, int d) {
    Point u(d);
    double len = 0.0;
    do {
        for (int j = 0; j < d; ++j) u[j] = rng.normal();
        len = norm(u);
    } while (len < 1e-12);
    return u * (1.0 / len);
}

MovingPointSet stationary_line(std::initializer_list<double> xs) {
    std::vector<Trajectory> tr;
    for (double x : xs) tr.push_back(Trajectory::stationary(Point{x}));
    return MovingPointSet(std::move(tr), 1, 0, 1.0);
}

FacilitySet facilities(std::vector<std::size_t> idx, std::size_t k) {
    FacilitySet f;
    f.indices = std::move(idx);
    f.k = k;
    return f;
}

}  // namespace

TEST_CASE("sixty degree covers", "[voronoi][cover]")
{
    CHECK(sixty_degree_cover(1).count() == 2);
    CHECK(sixty_degree_cover(2).count() == 6);
    CHECK(sixty_degree_cover(3).count() <= 20);
    CHECK_THROWS_AS(sixty_degree_cover(4), PreconditionError);
    for (int d : {2, 3}) {
        const auto cover = sixty_degree_cover(d);
        for (const auto& a : cover.axes) CHECK(norm(a) == Catch::Approx(1.0));
        Rng rng(static_cast<std::uint64_t>(d));
        double worst = 0.0;
        for (int i = 0; i < 100000; ++i) worst = std::max(worst, angular_gap(cover, random_unit(rng, d)));
        INFO("d=" << d);
        CHECK(worst <= kThirtyDegrees + 1e-12);
    }
}

TEST_CASE("cell loads", "[voronoi]")
{
    SECTION("midpoint split")
    {
        const auto set = stationary_line({1.0, 2.0, 3.0, 4.0});
        const auto r = cell_loads(set, facilities({0, 3}, 2), {}, 0.5);
        CHECK(r.loads == std::vector<std::size_t>{2, 2});
    }
    SECTION("far static site is never nearest")
    {
        const auto set = stationary_line({1.0, 2.0, 3.0, 4.0});
        const std::vector<Point> far{Point{100.0}};
        const auto r = cell_loads(set, facilities({0, 3}, 2), far, 0.0);
        CHECK(r.loads.back() == 0);
    }
    SECTION("agrees with a quadratic scan")
    {
        Rng rng(12);
        const auto set = testing::random_moving_set(rng, 50, 2, 2, 1.0);
        const auto f = facilities({1, 7, 9, 20, 33, 41}, 4);
        const std::vector<Point> statics{Point{0.1, 0.2}, Point{-0.5, 0.4}};
        for (double t : {0.0, 0.37, 1.0}) {
            const auto r = cell_loads(set, f, statics, t);
            std::vector<Point> sites;
            for (auto i : f.indices) sites.push_back(set[i](t));
            sites.insert(sites.end(), statics.begin(), statics.end());
            std::vector<std::size_t> want(sites.size(), 0);
            for (const auto& p : set.at(t)) ++want[testing::nearest_index(p, sites)];
            CHECK(r.loads == want);
            CHECK(std::accumulate(r.loads.begin(), r.loads.end(), std::size_t{0}) == 50);
        }
    }
}

TEST_CASE("nearest-site envelope matches direct scans", "[voronoi][envelope][property]")
{
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const int s = 1 + trial % 3;
        const auto set = testing::random_moving_set(rng, 12, 2, s, 2.0);
        const std::vector<Trajectory> cands(set.trajectories().begin() + 1, set.trajectories().end());
        for (bool furthest : {false, true}) {
            const auto env = distance_envelope(set[0], cands, 2.0, furthest);
            CHECK(std::is_sorted(env.breaks.begin(), env.breaks.end()));
            CHECK(env.partners.size() == env.breaks.size() + 1);
            for (std::size_t i = 0; i + 1 < env.partners.size(); ++i) CHECK(env.partners[i] != env.partners[i + 1]);
            for (int k = 0; k < 300; ++k) {
                const double t = rng.uniform(0.0, 2.0);
                std::vector<Point> at;
                for (const auto& c : cands) at.push_back(c(t));
                CHECK(env.at(t) == testing::scan_partner(set[0](t), at, furthest));
            }
        }
    }
}

TEST_CASE("balanced verification", "[voronoi]")
{
    SECTION("every point a site gives load one")
    {
        Rng rng(4);
        const auto set = testing::random_moving_set(rng, 30, 2, 1, 1.0);
        std::vector<std::size_t> all(30);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const auto rep = verify_balanced(set, facilities(all, 2), {}, 50);
        CHECK(rep.max_load == 1);
        CHECK(rep.breakpoints == 0);
    }
    SECTION("reported maximum dominates random times")
    {
        Rng rng(5);
        const auto set = testing::random_moving_set(rng, 80, 2, 1, 1.0);
        const auto f = facilities({0, 10, 20, 30, 40, 50, 60, 70}, 8);
        const auto rep = verify_balanced(set, f, {}, 100);
        CHECK(rep.breakpoints > 0);
        std::size_t seen = 0;
        for (int k = 0; k < 2000; ++k) seen = std::max(seen, cell_loads(set, f, {}, rng.uniform(0.0, 1.0)).max_load);
        CHECK(seen <= rep.max_load);
        // The breakpoint sweep visits every cell configuration, so the
        // maximum is attained at one of the reported samples.
        const auto at = cell_loads(set, f, {}, rep.time_of_max);
        CHECK(at.max_load == rep.max_load);
        CHECK(rep.bound == 6 * 10);
    }
}

TEST_CASE("facility selection", "[voronoi]")
{
    Rng rng(6);
    const auto set = testing::random_moving_set(rng, 10, 2, 1, 1.0);
    SampleConfig cfg;
    cfg.vc_hint = 3;
    CHECK_THROWS_AS(select_facilities(set, 1, cfg), PreconditionError);
    CHECK_THROWS_AS(select_facilities(set, 11, cfg), PreconditionError);
    const auto all = select_facilities(set, 10, cfg);
    CHECK(all.indices.size() == 10);
    CHECK(verify_balanced(set, all, {}, 20).max_load == 1);

    const MovingPointSet one({Trajectory::stationary(Point{0.0, 0.0})}, 2, 0, 1.0);
    CHECK_THROWS_AS(select_facilities(one, 2, cfg), PreconditionError);
}

TEST_CASE("static facilities from a verified cone net are balanced", "[voronoi][property]")
{
    // Planar static sets small enough for the cone oracle.
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        Rng rng(40 + seed);
        std::vector<Trajectory> tr;
        for (const auto& p : testing::random_points(rng, 12, 2)) tr.push_back(Trajectory::stationary(p));
        const MovingPointSet set(std::move(tr), 2, 0, 1.0);
        SampleConfig cfg;
        cfg.seed = seed;
        cfg.vc_hint = 1;
        cfg.size_constant = 2.0;
        const auto f = select_facilities(set, 3, cfg);
        CHECK(f.status == Verification::verified);
        CHECK(f.indices.size() <= f.size_bound(12));
        const auto rep = verify_balanced(set, f, {}, 5);
        CHECK(rep.ok());
        // Extra static sites never push a cell over the bound.
        for (int s = 0; s < 3; ++s) {
            const auto extra = testing::random_points(rng, 1 + rng.below(5), 2);
            CHECK(verify_balanced(set, f, extra, 5).max_load <= rep.bound);
        }
    }
}

TEST_CASE("moving facilities with extra sites stay within the bound", "[voronoi][property]")
{
    Rng rng(77);
    const auto set = testing::random_moving_set(rng, 60, 2, 1, 1.0);
    SampleConfig cfg;
    cfg.seed = 3;
    cfg.vc_hint = 1;
    cfg.size_constant = 0.5;
    const auto f = select_facilities(set, 12, cfg);
    CHECK(f.indices.size() == f.size_bound(60));
    const auto rep = verify_balanced(set, f, {}, 200);
    CHECK(rep.ok());
    for (int s = 0; s < 3; ++s) {
        const auto extra = testing::random_points(rng, 1 + rng.below(5), 2);
        CHECK(verify_balanced(set, f, extra, 200).max_load <= rep.bound);
    }
}
