#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "kinetikos/sampling.hpp"
#include "support/oracles.hpp"

using namespace kinetikos;

namespace {

MovingPointSet linear_1d(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    return testing::random_moving_set(rng, n, 1, 1, 1.0);
}

IndexSet members(std::size_t n, const std::vector<std::size_t>& idx) { return IndexSet(n, idx); }

}  // namespace

TEST_CASE("sample size formulas", "[sampling]")
{
    // 4 * 2 / 0.2 * ln 5 = 64.38
    CHECK(net_size(1000, 2, 0.2, 4.0) == 65);
    CHECK(net_size(50, 2, 0.2, 4.0) == 50);
    // 4 * 3 / 0.01 = 1200
    CHECK(approximation_size(5000, 3, 0.1, 4.0) == 1200);
    CHECK(heavy_threshold(100, 0.2) == 20);
    CHECK(heavy_threshold(7, 0.5) == 4);
    CHECK_THROWS_AS(net_size(10, 2, 1.0, 4.0), PreconditionError);
    CHECK_THROWS_AS(approximation_size(10, 2, 0.0, 4.0), PreconditionError);
}

TEST_CASE("full-size nets are the whole set", "[sampling]")
{
    const auto set = linear_1d(1, 20);
    SampleConfig cfg;
    cfg.vc_hint = 2;
    const auto net = build_eps_net(set, RangeFamily::intervals(), 0.3, cfg);
    CHECK(net.indices.size() == 20);
    CHECK(net.verified());
    CHECK(verify_eps_net(net, set, RangeFamily::intervals()).ok());

    const MovingPointSet one({Trajectory({Polynomial{0.5, 1.0}})}, 1, 1, 1.0);
    const auto single = build_eps_net(one, RangeFamily::intervals(), 0.5, cfg);
    CHECK(single.indices == std::vector<std::size_t>{0});
}

TEST_CASE("kinetic interval net is verified", "[sampling]")
{
    const auto set = linear_1d(7, 100);
    SampleConfig cfg;
    cfg.seed = 7;
    const auto net = build_eps_net(set, RangeFamily::intervals(), 0.2, cfg);
    CHECK(net.verified());
    CHECK(net.attempts <= cfg.max_attempts);
    CHECK(net.indices.size() == net_size(100, net.vc, 0.2, 4.0));

    // Independent check: every heavy run at 2000 sample times is hit.
    const auto hit = members(100, net.indices);
    for (const auto& e : testing::dense_time_runs(set, 2000))
        if (e.size() >= 20) CHECK(e.intersects(hit));
}

TEST_CASE("small nets need resampling and are still sound", "[sampling][property]")
{
    // A hint of 1 and a small constant force nets well below n.
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto set = linear_1d(100 + seed, 60);
        SampleConfig cfg;
        cfg.seed = seed;
        cfg.vc_hint = 1;
        cfg.size_constant = 2.0;
        const auto net = build_eps_net(set, RangeFamily::intervals(), 0.25, cfg);
        REQUIRE(net.verified());
        CHECK(net.indices.size() == 12);
        const auto hit = members(60, net.indices);
        for (const auto& e : testing::dense_time_runs(set, 3000))
            if (e.size() >= 15) CHECK(e.intersects(hit));
    }
}

TEST_CASE("verify_eps_net reports exactly the missed heavy edges", "[sampling]")
{
    const auto set = linear_1d(21, 30);
    EpsNet net;
    net.epsilon = 0.3;
    net.indices = {0};
    const auto rep = verify_eps_net(net, set, RangeFamily::intervals());
    CHECK(rep.threshold == 9);
    CHECK_FALSE(rep.ok());
    const auto oracle = testing::dense_time_runs(set, 4000);
    std::size_t expected = 0;
    for (const auto& e : oracle)
        if (e.size() >= 9 && !e.contains(0)) ++expected;
    CHECK(rep.uncovered.size() == expected);
    for (const auto& u : rep.uncovered) {
        CHECK_FALSE(u.edge.contains(0));
        CHECK(u.edge.size() >= 9);
        CHECK(oracle.count(u.edge) == 1);
        // The witness reproduces the edge.
        CHECK(trace_of(u.witness.range, set.at(u.witness.time)) == u.edge);
    }

    net.indices.resize(30);
    for (std::size_t i = 0; i < 30; ++i) net.indices[i] = i;
    CHECK(verify_eps_net(net, set, RangeFamily::intervals()).ok());
}

TEST_CASE("static verification is a check at time zero", "[sampling]")
{
    Rng rng(5);
    const auto pts = testing::random_points(rng, 9, 2);
    std::vector<Trajectory> tr;
    for (const auto& p : pts) tr.push_back(Trajectory::stationary(p));
    const MovingPointSet set(std::move(tr), 2, 0, 3.0);
    EpsNet net;
    net.epsilon = 0.4;
    net.indices = {1, 4};
    const auto rep = verify_eps_net(net, set, RangeFamily::halfspaces());
    std::size_t expected = 0;
    for (const auto& e : testing::halfplane_sweep_traces(pts, 7200))
        if (e.size() >= 4 && !e.contains(1) && !e.contains(4)) ++expected;
    CHECK(rep.uncovered.size() == expected);
}

TEST_CASE("eps-approximations", "[sampling]")
{
    SECTION("whole set has zero deviation")
    {
        const auto set = linear_1d(2, 15);
        const auto a = build_eps_approximation(set, RangeFamily::intervals(), 0.3);
        CHECK(a.indices.size() == 15);
        CHECK(a.max_deviation == 0.0);
        CHECK(verify_eps_approximation(a, set, RangeFamily::intervals()).max_deviation == 0.0);
    }
    SECTION("sixty points, eps 1/4")
    {
        const auto set = linear_1d(3, 60);
        SampleConfig cfg;
        cfg.seed = 3;
        const auto a = build_eps_approximation(set, RangeFamily::intervals(), 0.25, cfg);
        CHECK(a.verified());
        CHECK(a.max_deviation <= 0.25);
    }
    SECTION("small sample checked against dense runs")
    {
        const auto set = linear_1d(4, 80);
        SampleConfig cfg;
        cfg.seed = 4;
        cfg.vc_hint = 2;
        cfg.size_constant = 0.5;
        const auto a = build_eps_approximation(set, RangeFamily::intervals(), 0.25, cfg);
        REQUIRE(a.verified());
        CHECK(a.indices.size() == 16);
        const auto sample = members(80, a.indices);
        double worst = 0.0;
        for (const auto& e : testing::dense_time_runs(set, 3000))
            worst = std::max(worst, std::abs(e.intersection_size(sample) / 16.0 - e.size() / 80.0));
        CHECK(worst <= 0.25);
        CHECK(worst <= a.max_deviation + 1e-12);

        // An approximation at eps is also a net at eps.
        EpsNet net;
        net.epsilon = 0.25;
        net.indices = a.indices;
        CHECK(verify_eps_net(net, set, RangeFamily::intervals()).ok());
    }
}

TEST_CASE("exhausted attempts carry the best violation", "[sampling]")
{
    const auto set = linear_1d(9, 40);
    SampleConfig cfg;
    cfg.vc_hint = 1;
    cfg.size_constant = 0.01;
    cfg.max_attempts = 3;
    try {
        (void)build_eps_net(set, RangeFamily::intervals(), 0.1, cfg);
        FAIL("expected AttemptsExhausted");
    } catch (const AttemptsExhausted& e) {
        CHECK(e.worst_violation() >= 4.0);
    }
    try {
        (void)build_eps_approximation(set, RangeFamily::intervals(), 0.1, cfg);
        FAIL("expected AttemptsExhausted");
    } catch (const AttemptsExhausted& e) {
        CHECK(e.worst_violation() > 0.1);
    }
}

TEST_CASE("sampling is deterministic", "[sampling]")
{
    const auto set = linear_1d(11, 50);
    SampleConfig cfg;
    cfg.seed = 42;
    cfg.vc_hint = 1;
    cfg.size_constant = 2.0;
    const auto a = build_eps_net(set, RangeFamily::intervals(), 0.2, cfg);
    const auto b = build_eps_net(set, RangeFamily::intervals(), 0.2, cfg);
    CHECK(a.indices == b.indices);
    CHECK(a.attempts == b.attempts);
    cfg.seed = 43;
    const auto c = build_eps_net(set, RangeFamily::intervals(), 0.2, cfg);
    CHECK(c.indices != a.indices);
}

TEST_CASE("first-attempt success rate at the default constant", "[sampling][property]")
{
    int first = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto set = linear_1d(500 + seed, 100);
        SampleConfig cfg;
        cfg.seed = seed;
        cfg.vc_hint = 2;
        const auto net = build_eps_net(set, RangeFamily::intervals(), 0.2, cfg);
        REQUIRE(net.verified());
        if (net.attempts == 1) ++first;
    }
    CHECK(first >= 30);
}

TEST_CASE("VC resolution", "[sampling]")
{
    Rng rng(1);
    std::vector<Trajectory> tr;
    for (const auto& p : testing::random_points(rng, 20, 2)) tr.push_back(Trajectory::stationary(p));
    const MovingPointSet still(std::move(tr), 2, 0, 1.0);
    SampleConfig cfg;
    CHECK(resolve_vc(still, RangeFamily::halfspaces(), cfg) == 3);
    CHECK(resolve_vc(still, RangeFamily::balls(), cfg) == 3);
    cfg.vc_hint = 5;
    CHECK(resolve_vc(still, RangeFamily::balls(), cfg) == 5);

    const auto moving = linear_1d(6, 40);
    const auto vc = resolve_vc(moving, RangeFamily::intervals(), SampleConfig{});
    CHECK(vc >= 2);
    CHECK(vc <= 5);

    Rng r3(2);
    const auto cube = testing::random_moving_set(r3, 10, 3, 1, 1.0);
    CHECK_THROWS_AS(resolve_vc(cube, RangeFamily::bounded_cones(), SampleConfig{}), PreconditionError);
}

TEST_CASE("net export", "[sampling]")
{
    EpsNet net;
    net.epsilon = 0.25;
    net.size_constant = 4.0;
    net.seed = 9;
    net.family = RangeFamily::intervals();
    net.vc = 2;
    net.attempts = 1;
    net.status = Verification::verified;
    net.indices = {3, 5};
    std::ostringstream os;
    write_net(os, net);
    CHECK(os.str() ==
          "# eps-net\n# epsilon: 0.25\n# constant: 4\n# seed: 9\n# family: intervals\n# vc: 2\n# attempts: 1\n# verified: yes\n3\n5\n");
}
