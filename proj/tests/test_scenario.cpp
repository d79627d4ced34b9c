#include <catch_amalgamated.hpp>

#include "kinetikos/hypergraph.hpp"
#include "kinetikos/scenario.hpp"

using namespace kinetikos;

TEST_CASE("static scenario", "[scenario]")
{
    GeneratorParams g;
    g.kind = GeneratorKind::static_points;
    g.n = 4;
    g.dimension = 1;
    g.degree = 0;
    g.family = "intervals";
    const auto s = generate_scenario(g);
    const auto set = s.moving_set();
    CHECK(set.size() == 4);
    CHECK(set.is_static());
    CHECK(validate_general_position(set).valid);
}

TEST_CASE("generation is reproducible and round-trips", "[scenario]")
{
    GeneratorParams g;
    g.n = 25;
    g.dimension = 2;
    g.degree = 2;
    g.seed = 77;
    const auto a = dump_scenario(generate_scenario(g));
    const auto b = dump_scenario(generate_scenario(g));
    CHECK(a == b);
    CHECK(dump_scenario(parse_scenario(a)) == a);
    g.seed = 78;
    CHECK(dump_scenario(generate_scenario(g)) != a);

    // Shortest round-trip decimals survive exactly.
    const auto back = parse_scenario(a);
    CHECK(back.points == generate_scenario(GeneratorParams{g.kind, 25, 2, 2, 1.0, 1.0, 77, "halfspaces"}).points);
}

TEST_CASE("crossing fan realizes most pairwise crossings", "[scenario]")
{
    GeneratorParams g;
    g.kind = GeneratorKind::crossing_fan;
    g.n = 20;
    g.dimension = 1;
    g.degree = 1;
    g.seed = 3;
    g.family = "intervals";
    const auto set = generate_scenario(g).moving_set();
    const auto tl = event_times(set, RangeFamily::intervals());
    CHECK(static_cast<double>(tl.events.size()) >= 0.9 * 190.0);
}

TEST_CASE("degenerate input is perturbed and recorded", "[scenario]")
{
    Scenario s;
    s.dimension = 2;
    s.degree = 0;
    s.family = "halfspaces";
    s.points = {{{0.0}, {0.0}}, {{1.0}, {1.0}}, {{2.0}, {2.0}}};
    CHECK_FALSE(validate_general_position(s.moving_set()).valid);

    GeneratorParams g;
    g.kind = GeneratorKind::static_points;
    g.n = 1;
    g.degree = 0;
    CHECK_FALSE(generate_scenario(g).perturbed);
}

TEST_CASE("bad generator parameters", "[scenario]")
{
    GeneratorParams g;
    g.n = 0;
    CHECK_THROWS_AS(generate_scenario(g), PreconditionError);
    g.n = 5;
    g.kind = GeneratorKind::crossing_fan;
    g.dimension = 2;
    CHECK_THROWS_AS(generate_scenario(g), PreconditionError);
    g.kind = GeneratorKind::uniform;
    g.horizon = -1.0;
    CHECK_THROWS_AS(generate_scenario(g), PreconditionError);
    g.horizon = 1.0;
    g.family = "triangles";
    CHECK_THROWS_AS(generate_scenario(g), PreconditionError);
    CHECK_THROWS_AS(parse_generator("spiral"), PreconditionError);
}

TEST_CASE("malformed scenario files", "[scenario]")
{
    CHECK_THROWS_AS(parse_scenario("{"), PreconditionError);
    CHECK_THROWS_AS(parse_scenario(R"({"dimension": 1})"), PreconditionError);
    CHECK_THROWS_AS(parse_scenario(R"({"dimension": 2, "degree": 1, "horizon": 1, "points": [[[0, 1]]]})"), DimensionMismatch);
    CHECK_THROWS_AS(load_scenario("/nonexistent/file.json"), IoError);
}
