#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinetikos/ranges.hpp"
#include "kinetikos/trajectory.hpp"

namespace kinetikos {

/// A reproducible experiment input: trajectories as ascending coefficient
/// tables plus the parameters the commands read.
struct Scenario {
    int dimension = 1;
    int degree = 1;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    std::string family = "intervals";
    std::string generator = "manual";
    bool perturbed = false;
    std::size_t k = 8;
    double epsilon = 0.2;
    std::size_t grid = 1000;
    /// points[i][j] = coefficients of coordinate j of point i.
    std::vector<std::vector<std::vector<double>>> points;

    std::size_t size() const noexcept { return points.size(); }

    MovingPointSet moving_set() const {
        std::vector<Trajectory> tr;
        tr.reserve(points.size());
        for (const auto& p : points) {
            if (static_cast<int>(p.size()) != dimension) throw DimensionMismatch("scenario: point with wrong number of coordinates");
            std::vector<Polynomial> cs;
            for (const auto& c : p) {
                if (c.empty()) throw PreconditionError("scenario: empty coefficient list");
                cs.emplace_back(c);
            }
            tr.emplace_back(std::move(cs));
        }
        return MovingPointSet(std::move(tr), dimension, degree, horizon);
    }

    RangeFamily range_family() const {
        const auto tag = parse_family(family);
        return tag == FamilyTag::bounded_cones ? RangeFamily::bounded_cones() : RangeFamily{tag};
    }
};

inline nlohmann::ordered_json to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["dimension"] = s.dimension;
    j["degree"] = s.degree;
    j["horizon"] = s.horizon;
    j["seed"] = s.seed;
    j["family"] = s.family;
    j["generator"] = s.generator;
    j["perturbed"] = s.perturbed;
    j["params"] = {{"k", s.k}, {"epsilon", s.epsilon}, {"grid", s.grid}};
    j["points"] = s.points;
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    try {
        s.dimension = j.at("dimension").get<int>();
        s.degree = j.at("degree").get<int>();
        s.horizon = j.at("horizon").get<double>();
        s.seed = j.value("seed", std::uint64_t{0});
        s.family = j.value("family", std::string("intervals"));
        s.generator = j.value("generator", std::string("manual"));
        s.perturbed = j.value("perturbed", false);
        if (j.contains("params")) {
            const auto& p = j.at("params");
            s.k = p.value("k", s.k);
            s.epsilon = p.value("epsilon", s.epsilon);
            s.grid = p.value("grid", s.grid);
        }
        s.points = j.at("points").get<std::vector<std::vector<std::vector<double>>>>();
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("scenario: ") + e.what());
    }
    s.moving_set();  // validates
    parse_family(s.family);
    return s;
}

/// Two-space indented JSON, one point per line, shortest round-trip numbers.
inline std::string dump_scenario(const Scenario& s) {
    auto j = to_json(s);
    j.erase("points");
    std::string head = j.dump(2);
    head.pop_back();  // closing brace
    while (!head.empty() && head.back() == '\n') head.pop_back();
    std::ostringstream os;
    os << head << ",\n  \"points\": [";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        os << (i ? ",\n    " : "\n    ") << nlohmann::json(s.points[i]).dump();
    }
    os << (s.points.empty() ? "]\n}\n" : "\n  ]\n}\n");
    return os.str();
}

inline Scenario parse_scenario(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("scenario: ") + e.what());
    }
    return scenario_from_json(j);
}

class IoError : public Error {
public:
    using Error::Error;
};

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << dump_scenario(s);
    if (!out) throw IoError("write failed: " + path);
}

inline Scenario scenario_from_set(const MovingPointSet& set) {
    Scenario s;
    s.dimension = set.dim();
    s.degree = set.max_degree();
    s.horizon = set.horizon();
    for (const auto& tr : set.trajectories()) {
        std::vector<std::vector<double>> p;
        for (const auto& c : tr.components()) {
            std::vector<double> cs;
            for (int i = 0; i <= std::max(0, c.degree()); ++i) cs.push_back(c.coefficient(i));
            p.push_back(std::move(cs));
        }
        s.points.push_back(std::move(p));
    }
    return s;
}

enum class GeneratorKind { uniform, static_points, linear_1d, crossing_fan };

inline GeneratorKind parse_generator(const std::string& s) {
    if (s == "uniform") return GeneratorKind::uniform;
    if (s == "static") return GeneratorKind::static_points;
    if (s == "linear_1d") return GeneratorKind::linear_1d;
    if (s == "crossing_fan") return GeneratorKind::crossing_fan;
    throw PreconditionError("unknown generator '" + s + "' (uniform, static, linear_1d, crossing_fan)");
}

inline const char* to_string(GeneratorKind g) {
    switch (g) {
        case GeneratorKind::uniform: return "uniform";
        case GeneratorKind::static_points: return "static";
        case GeneratorKind::linear_1d: return "linear_1d";
        case GeneratorKind::crossing_fan: return "crossing_fan";
    }
    return "?";
}

struct GeneratorParams {
    GeneratorKind kind = GeneratorKind::uniform;
    std::size_t n = 16;
    int dimension = 2;
    int degree = 1;
    double horizon = 1.0;
    /// Constant terms are uniform in [-box, box]; the power-k coefficient
    /// in [-box, box] / (k + 1).
    double box = 1.0;
    std::uint64_t seed = 0;
    std::string family = "halfspaces";
};

namespace detail {

inline std::vector<std::vector<std::vector<double>>> generate_points(const GeneratorParams& g, Rng& rng) {
    std::vector<std::vector<std::vector<double>>> pts(g.n);
    switch (g.kind) {
        case GeneratorKind::uniform:
        case GeneratorKind::static_points:
        case GeneratorKind::linear_1d: {
            const int s = g.kind == GeneratorKind::static_points ? 0 : g.kind == GeneratorKind::linear_1d ? 1 : g.degree;
            for (auto& p : pts) {
                p.resize(static_cast<std::size_t>(g.dimension));
                for (auto& c : p) {
                    c.resize(static_cast<std::size_t>(s) + 1);
                    for (int k = 0; k <= s; ++k) c[static_cast<std::size_t>(k)] = rng.uniform(-g.box, g.box) / (k + 1);
                }
            }
            break;
        }
        case GeneratorKind::crossing_fan: {
            // x_i(t) = s_i (t - tau_i) with slopes 1..n and pivots jittered
            // around T/2 by less than T/(4n), so every pair meets in (0, T).
            const double T = g.horizon;
            for (std::size_t i = 0; i < g.n; ++i) {
                const double slope = g.box * static_cast<double>(i + 1) / static_cast<double>(g.n);
                const double tau = 0.5 * T + 0.9 * T / (4.0 * static_cast<double>(g.n)) * rng.uniform(-1.0, 1.0);
                pts[i] = {{-slope * tau, slope}};
            }
            break;
        }
    }
    return pts;
}

}  // namespace detail

inline Scenario generate_scenario(const GeneratorParams& g) {
    if (g.n == 0) throw PreconditionError("generator: n must be positive");
    if (g.dimension < 1 || g.dimension > 3) throw PreconditionError("generator: dimension must be 1, 2 or 3");
    if (g.degree < 0) throw PreconditionError("generator: negative degree");
    if (!(g.horizon > 0.0) || !std::isfinite(g.horizon)) throw PreconditionError("generator: horizon must be positive");
    if (!(g.box > 0.0)) throw PreconditionError("generator: box must be positive");
    if ((g.kind == GeneratorKind::linear_1d || g.kind == GeneratorKind::crossing_fan) && g.dimension != 1)
        throw PreconditionError(std::string("generator ") + to_string(g.kind) + " is one-dimensional");
    if (g.kind == GeneratorKind::static_points && g.degree != 0) throw PreconditionError("generator static needs degree 0");
    if ((g.kind == GeneratorKind::linear_1d || g.kind == GeneratorKind::crossing_fan) && g.degree != 1)
        throw PreconditionError(std::string("generator ") + to_string(g.kind) + " needs degree 1");
    parse_family(g.family);

    Rng rng(g.seed);
    Scenario s;
    s.dimension = g.dimension;
    s.degree = g.degree;
    s.horizon = g.horizon;
    s.seed = g.seed;
    s.family = g.family;
    s.generator = to_string(g.kind);
    s.points = detail::generate_points(g, rng);
    if (g.n > 1 && !validate_general_position(s.moving_set()).valid) {
        s = [&] {
            Scenario p = scenario_from_set(perturb(s.moving_set(), derive_seed(g.seed, 0x9e7)));
            p.seed = s.seed;
            p.family = s.family;
            p.generator = s.generator;
            p.degree = s.degree;
            return p;
        }();
        s.perturbed = true;
    }
    return s;
}

}  // namespace kinetikos
