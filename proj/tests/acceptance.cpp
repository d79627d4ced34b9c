// End-to-end acceptance runs. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Reports go under argv[1] (default
// ./acceptance_reports); criterion 9 reruns 2-5 into a second tree and
// compares the files byte for byte.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "kinetikos/kinetikos.hpp"
#include "support/oracles.hpp"

using namespace kinetikos;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;  // 0 = no limit
    std::function<Outcome()> run;
};

fs::path g_root;

std::string fmt(double x, int digits = 3) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

Scenario scenario(GeneratorKind kind, std::size_t n, int d, int s, const std::string& family, std::uint64_t seed) {
    GeneratorParams g;
    g.kind = kind;
    g.n = n;
    g.dimension = d;
    g.degree = s;
    g.family = family;
    g.seed = seed;
    return generate_scenario(g);
}

// ---- criterion 1 ----------------------------------------------------------

Outcome oracle_equivalence() {
    std::size_t mismatches = 0, comparisons = 0;
    double slowest = 0.0;
    std::string first_bad;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng rng(derive_seed(0xAC1, i));
        const int d = 1 + static_cast<int>(i % 2);
        const int s = 1 + static_cast<int>((i / 2) % 2);
        const std::size_t n = 5 + (i / 4) % 4;
        const auto set = testing::random_moving_set(rng, n, d, s, 1.0);
        std::vector<RangeFamily> fams{RangeFamily::halfspaces(), RangeFamily::balls()};
        if (d == 1) fams.insert(fams.begin(), RangeFamily::intervals());
        for (const auto& fam : fams) {
            const auto cat = enumerate_kinetic_hyperedges(set, fam);
            const auto dense = testing::dense_time_catalog(set, fam, 10000);
            bool same = dense.size() == cat.size();
            for (const auto& e : dense) same = same && cat.contains(e);
            ++comparisons;
            if (!same) {
                ++mismatches;
                if (first_bad.empty())
                    first_bad = " first mismatch: instance " + std::to_string(i) + " " + describe(fam) + " (" + std::to_string(cat.size()) +
                                " vs " + std::to_string(dense.size()) + " edges)";
            }
        }
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return {mismatches == 0 && slowest < 10.0, std::to_string(comparisons - mismatches) + "/" + std::to_string(comparisons) +
                                                    " catalogs equal, slowest instance " + fmt(slowest) + " s" + first_bad};
}

// ---- criteria 2-5 (also rerun by 9) ---------------------------------------

Outcome net_soundness(const fs::path& root) {
    std::size_t ok = 0;
    int worst_attempts = 0;
    std::size_t uncovered = 0;
    std::string failure;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto sc = scenario(GeneratorKind::linear_1d, 100, 1, 1, "intervals", seed);
        sc.epsilon = 0.2;
        RunOptions o;
        o.max_attempts = 20;
        const auto r = run_net(sc, o, root / ("net_" + std::to_string(seed)));
        bool good = r.passed();
        for (const auto& [k, v] : r.metrics) {
            if (k == "attempts") worst_attempts = std::max(worst_attempts, static_cast<int>(v));
            if (k == "uncovered") uncovered += static_cast<std::size_t>(v);
            if (k == "threshold") good = good && v <= 20.0;
        }
        good = good && r.metric("heavy_edges") > 0;
        ok += good;
        if (!good && failure.empty()) failure = " first failure seed " + std::to_string(seed);
    }
    return {ok == 20, std::to_string(ok) + "/20 verified nets, max attempts " + std::to_string(worst_attempts) + ", uncovered heavy edges " +
                          std::to_string(uncovered) + failure};
}

Outcome balanced_voronoi(const fs::path& root) {
    std::size_t ok = 0;
    double worst_load = 0, bound = 0, max_size = 0, size_bound = 0;
    std::string failure;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto sc = scenario(GeneratorKind::uniform, 400, 2, 1, "cones", seed);
        sc.k = 8;
        sc.grid = 1000;
        RunOptions o;
        o.robustness_sets = 3;
        const auto r = run_voronoi(sc, o, root / ("voronoi_" + std::to_string(seed)));
        worst_load = std::max({worst_load, r.metric("max_load"), r.metric("robust_max_load")});
        bound = r.metric("load_bound");
        max_size = std::max(max_size, r.metric("facilities"));
        size_bound = std::max(size_bound, r.metric("size_bound"));
        ok += r.passed();
        if (!r.passed() && failure.empty()) failure = " first failure seed " + std::to_string(seed);
    }
    return {ok == 10 && bound == 300.0, std::to_string(ok) + "/10 trials, largest facility set " + fmt(max_size, 6) + " (largest size bound " + fmt(size_bound, 6) +
                                            "), max load incl. static sites " + fmt(worst_load, 6) + " <= " + fmt(bound, 6) + failure};
}

Outcome interference_protocol(const fs::path& root) {
    std::vector<double> ns, mean_max;
    std::size_t runs = 0, good_runs = 0;
    std::string failure, per_n;
    for (std::size_t n : {64, 144, 256}) {
        double sum = 0.0, hubs = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto sc = scenario(GeneratorKind::uniform, n, 2, 1, "cones", seed);
            sc.grid = 500;
            const auto r = run_interference(sc, RunOptions{}, root / ("interference_" + std::to_string(n) + "_" + std::to_string(seed)));
            sum += r.metric("max_interference");
            hubs += r.metric("hubs");
            ++runs;
            good_runs += r.passed();
            if (!r.passed() && failure.empty())
                for (const auto& c : r.checks)
                    if (!c.passed) {
                        failure = " first failure n=" + std::to_string(n) + " seed " + std::to_string(seed) + " " + c.name + ": " + c.detail;
                        break;
                    }
        }
        ns.push_back(static_cast<double>(n));
        mean_max.push_back(sum / 10.0);
        per_n += " n=" + std::to_string(n) + ":I=" + fmt(sum / 10.0) + ",hubs=" + fmt(hubs / 10.0);
    }
    const double slope = loglog_slope(ns, mean_max);
    return {good_runs == runs && slope <= 0.6, std::to_string(good_runs) + "/" + std::to_string(runs) +
                                                   " runs within connectivity/diameter/interference/change bounds, interference slope " + fmt(slope) +
                                                   " (limit 0.6);" + per_n + failure};
}

Outcome approximate_counting(const fs::path& root) {
    auto sc = scenario(GeneratorKind::uniform, 200, 2, 1, "balls", 7);
    sc.epsilon = 0.1;
    RunOptions o;
    o.queries = 1000;
    const auto r = run_count(sc, o, root / "count");
    return {r.passed() && r.metric("queries") == 1000.0,
            fmt(r.metric("queries"), 6) + " queries, violations " + fmt(r.metric("violations"), 6) + ", max error/n " + fmt(r.metric("max_error")) +
                ", sample " + fmt(r.metric("sample"), 6) + " of 200"};
}

// ---- criterion 6 ----------------------------------------------------------

Outcome vc_empirics() {
    std::size_t static_ok = 0, kinetic_ok = 0, slope_ok = 0;
    std::size_t kinetic_max = 0;
    double slope_max = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto st = scenario(GeneratorKind::static_points, 8, 2, 0, "halfspaces", seed).moving_set();
        static_ok += vc_dimension_estimate(st, RangeFamily::halfspaces()) == 3;
        const auto kin = scenario(GeneratorKind::linear_1d, 12, 1, 1, "intervals", seed).moving_set();
        const auto v = vc_dimension_estimate(kin, RangeFamily::intervals());
        kinetic_max = std::max(kinetic_max, v);
        kinetic_ok += v <= 4;
    }
    const int d = 2, s = 1;
    const double slope_limit = 2 * d + 1 + std::log2(static_cast<double>(d * s)) + 0.5;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto set = scenario(GeneratorKind::uniform, 10, d, s, "halfspaces", seed).moving_set();
        const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::halfspaces());
        const double slope = shatter_growth_slope(cat, 2, 10);
        slope_max = std::max(slope_max, slope);
        slope_ok += slope <= slope_limit;
    }
    return {static_ok == 10 && kinetic_ok == 10 && slope_ok == 5,
            "static halfplane VC=3 in " + std::to_string(static_ok) + "/10, kinetic interval VC<=4 in " + std::to_string(kinetic_ok) +
                "/10 (max " + std::to_string(kinetic_max) + "), shatter slope max " + fmt(slope_max) + " <= " + fmt(slope_limit)};
}

// ---- criterion 7 ----------------------------------------------------------

Outcome discrepancy_trend() {
    const std::vector<std::size_t> sizes{16, 32, 64, 128};
    std::vector<double> ns, medians;
    std::size_t cells = 0, under_bound = 0;
    std::string per_n;
    for (std::size_t n : sizes) {
        std::vector<double> vals;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto set = scenario(GeneratorKind::linear_1d, n, 1, 1, "intervals", seed).moving_set();
            const auto cat = enumerate_kinetic_hyperedges(set, RangeFamily::intervals());
            const auto chi = color_random(n, derive_seed(seed, 0xD15C));
            const auto before = kinetic_discrepancy(cat, chi);
            const auto tr = improve_coloring(cat, chi, 1000);
            vals.push_back(static_cast<double>(kinetic_discrepancy(cat, tr.coloring).value));
            ++cells;
            under_bound += static_cast<double>(before.value) <= random_coloring_reference(n, cat.size());
        }
        ns.push_back(static_cast<double>(n));
        medians.push_back(median(vals));
        per_n += " " + std::to_string(n) + ":" + fmt(medians.back());
    }
    const double slope = loglog_slope(ns, medians);
    const double frac = static_cast<double>(under_bound) / static_cast<double>(cells);
    return {slope <= 0.65 && frac >= 0.9, "median improved disc" + per_n + ", slope " + fmt(slope) + " <= 0.65; random under union bound in " +
                                              std::to_string(under_bound) + "/" + std::to_string(cells) + " cells"};
}

// ---- criterion 8 ----------------------------------------------------------

Outcome planar_depth_oracle() {
    std::size_t equal = 0, overshoot = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        Rng rng(derive_seed(0xAC8, i));
        std::vector<Point> c;
        std::vector<double> r;
        for (int j = 0; j < 32; ++j) {
            c.push_back(Point{rng.uniform(0, 1), rng.uniform(0, 1)});
            r.push_back(rng.uniform(0.05, 0.35));
        }
        const auto exact = planar_depth(c, r).value;
        const auto grid = testing::grid_depth(c, r, 1000);
        equal += exact == grid;
        overshoot += grid > exact;
    }
    return {overshoot == 0 && equal >= 48, "exact == grid in " + std::to_string(equal) + "/50, grid above exact in " + std::to_string(overshoot)};
}

// ---- criterion 9 ----------------------------------------------------------

std::vector<fs::path> files_under(const fs::path& root) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
    std::sort(out.begin(), out.end());
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
    const auto first = g_root / "run1", second = g_root / "run2";
    fs::remove_all(second);
    net_soundness(second);
    balanced_voronoi(second);
    interference_protocol(second);
    approximate_counting(second);
    const auto a = files_under(first), b = files_under(second);
    if (a != b) return {false, "file lists differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")"};
    std::size_t differing = 0;
    std::string first_diff;
    for (const auto& f : a)
        if (slurp(first / f) != slurp(second / f)) {
            ++differing;
            if (first_diff.empty()) first_diff = " first: " + f.string();
        }
    return {differing == 0 && !a.empty(), std::to_string(a.size() - differing) + "/" + std::to_string(a.size()) + " report files identical" + first_diff};
}

}  // namespace

int main(int argc, char** argv) {
    g_root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_reports");
    std::vector<int> only;
    for (int i = 2; i < argc; ++i) only.push_back(std::stoi(argv[i]));
    const auto run1 = g_root / "run1";

    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", 0, oracle_equivalence},
        {2, "kinetic eps-net soundness", 120, [&] { return net_soundness(run1); }},
        {3, "balanced voronoi", 300, [&] { return balanced_voronoi(run1); }},
        {4, "interference protocol", 600, [&] { return interference_protocol(run1); }},
        {5, "approximate counting", 60, [&] { return approximate_counting(run1); }},
        {6, "vc and shatter empirics", 300, vc_empirics},
        {7, "discrepancy trend", 300, discrepancy_trend},
        {8, "planar interference oracle", 120, planar_depth_oracle},
        {9, "determinism", 0, determinism},
    };

    // Criterion 9 compares against run1, so 2-5 must run first.
    const auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    if (wanted(9))
        for (int id : {2, 3, 4, 5})
            if (!wanted(id)) only.push_back(id);
    fs::remove_all(run1);

    int failed = 0;
    for (const auto& c : criteria) {
        if (!wanted(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
        const bool pass = o.passed && in_time;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << "; " << fmt(secs) << " s";
        if (c.limit_seconds > 0) std::cout << " (limit " << fmt(c.limit_seconds) << " s)";
        std::cout << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
