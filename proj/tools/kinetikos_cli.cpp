#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "kinetikos/kinetikos.hpp"

namespace k = kinetikos;

namespace {

enum Exit { ok = 0, assertion_failed = 1, usage = 2, io = 3, failure = 4 };

const std::map<std::string, std::string> kOutputs{
    {"net",
     "Writes to --out:\n"
     "  net.txt               header lines '# key: value', then one point index per line\n"
     "  net_summary.csv       key,value (n, epsilon, vc, size, attempts, threshold, heavy_edges, uncovered)\n"
     "  net_uncovered.csv     edge,size,witness_time,witness_range\n"
     "  checks.csv            check,passed,detail\n"
     "  failures.csv          command,check,detail (failed checks only)"},
    {"approx",
     "Writes to --out:\n"
     "  approx.txt            header lines '# key: value', then one point index per line\n"
     "  approx_summary.csv    key,value (n, epsilon, vc, size, attempts, max_deviation)\n"
     "  checks.csv, failures.csv"},
    {"voronoi",
     "Writes to --out:\n"
     "  voronoi_facilities.txt  facility indices\n"
     "  voronoi_loads.csv       time,max_load,argmax_site\n"
     "  voronoi_robustness.csv  set,sites,max_load,bound (random extra static sites)\n"
     "  voronoi_summary.csv     key,value\n"
     "  voronoi_loads.svg       max load over time\n"
     "  checks.csv, failures.csv"},
    {"interference",
     "Writes to --out:\n"
     "  interference.csv          t,interference,connected,diameter,num_edges\n"
     "  changes.csv               point_index,change_count\n"
     "  schedule.txt              per point: role, then [from,to) partner pieces\n"
     "  interference_summary.csv  key,value\n"
     "  interference.svg          interference over time\n"
     "  checks.csv, failures.csv"},
    {"count",
     "Writes to --out:\n"
     "  count.csv          t,range,k_approx,l_exact,error  (error = |k_approx - l_exact| / n)\n"
     "  count_summary.csv  key,value\n"
     "  checks.csv, failures.csv\n"
     "Query file lines: 't interval a b' | 't halfspace n_1..n_d offset' |\n"
     "  't ball c_1..c_d r' | 't cone a_1..a_d u_1..u_d angle cap'"},
    {"disc",
     "Writes to --out:\n"
     "  coloring.csv    index,color\n"
     "  disc_trend.csv  n,edges,random_disc,improved_disc,union_bound,ref_kinetic,ref_primal,witness\n"
     "  disc_steps.csv  step,flipped,max_imbalance\n"
     "  checks.csv, failures.csv"},
    {"oracle",
     "Writes to --out, for each range family valid in the scenario dimension:\n"
     "  catalog_<family>.txt    one hyperedge per line, comma-separated indices\n"
     "  witnesses_<family>.txt  hyperedge, time and range reproducing it\n"
     "  timeline_<family>.txt   event times, with header counts\n"
     "  oracle_summary.csv      family,edges,events,largest_edge\n"
     "  checks.csv, failures.csv"},
};

const std::map<std::string, std::string> kDescriptions{
    {"net", "Build and verify a kinetic eps-net"},
    {"approx", "Build and verify a kinetic eps-approximation"},
    {"voronoi", "Select facilities and check balanced Voronoi cell loads"},
    {"interference", "Run the hub protocol and measure interference"},
    {"count", "Approximate range counting against exact counts"},
    {"disc", "Discrepancy of a random and an improved coloring"},
    {"oracle", "Brute-force hyperedge catalogs for every applicable family"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic range spaces: sampling, facilities, interference, counting, discrepancy"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "kinetikos 0.1.0");

    std::string scenario_path, out_dir, queries_file;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    std::size_t kk = 0, grid = 0, vc = 0;
    k::RunOptions opts;
    bool report_only = false;

    std::map<std::string, CLI::App*> subs;
    for (const auto& name : k::command_names()) {
        auto* s = app.add_subcommand(name, kDescriptions.at(name));
        s->footer(kOutputs.at(name));
        s->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
        s->add_option("--out", out_dir, "Output directory")->required();
        s->add_option("--seed", seed, "Override the scenario seed");
        s->add_option("--threads", opts.threads, "Worker threads (default: KINETIKOS_THREADS or 1)")->check(CLI::PositiveNumber);
        auto* assert_flag = s->add_flag("--assert", "Exit 1 when a check fails (default)");
        s->add_flag("--report-only", report_only, "Write reports and exit 0 even when checks fail")->excludes(assert_flag);
        if (name == "net" || name == "approx" || name == "voronoi" || name == "interference" || name == "count") {
            s->add_option("--constant-c", opts.constant_c, "Sample size constant")->check(CLI::PositiveNumber);
            s->add_option("--vc", vc, "Use this VC dimension instead of estimating it")->check(CLI::PositiveNumber);
            s->add_option("--max-attempts", opts.max_attempts, "Resampling attempts")->check(CLI::PositiveNumber);
        }
        if (name == "net" || name == "approx" || name == "count")
            s->add_option("--epsilon", epsilon, "Override the scenario epsilon")->check(CLI::Range(1e-9, 1.0 - 1e-9));
        if (name == "voronoi") {
            s->add_option("--k", kk, "Facility parameter k");
            s->add_option("--robustness-sets", opts.robustness_sets, "Random static site sets to test");
        }
        if (name == "voronoi" || name == "interference") s->add_option("--grid", grid, "Time samples")->check(CLI::PositiveNumber);
        if (name == "voronoi" || name == "interference")
            s->add_flag("--no-svg", [&opts](std::int64_t c) { opts.svg = c == 0; }, "Skip the SVG plot");
        if (name == "count") {
            s->add_option("--queries", opts.queries, "Number of random queries");
            s->add_option("--queries-file", queries_file, "Query file (overrides --queries)");
        }
        if (name == "disc") s->add_option("--iterations", opts.iterations, "Improvement steps");
        subs[name] = s;
    }

    k::GeneratorParams gen;
    std::string gen_kind = "uniform", gen_out;
    auto* g = app.add_subcommand("generate", "Write a random scenario");
    g->footer("Writes DIR/scenario.json with --out, otherwise prints the scenario to stdout.");
    g->add_option("--generator", gen_kind, "uniform | static | linear_1d | crossing_fan")->capture_default_str();
    g->add_option("--n", gen.n, "Number of points")->capture_default_str();
    g->add_option("--dimension", gen.dimension, "Dimension (1-3)")->capture_default_str();
    g->add_option("--degree", gen.degree, "Trajectory degree")->capture_default_str();
    g->add_option("--horizon", gen.horizon, "Time horizon T")->capture_default_str();
    g->add_option("--box", gen.box, "Coefficient box")->capture_default_str();
    g->add_option("--family", gen.family, "halfspaces | balls | cones | intervals")->capture_default_str();
    g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    g->add_option("--k", kk, "Stored facility parameter k");
    g->add_option("--epsilon", epsilon, "Stored epsilon");
    g->add_option("--grid", grid, "Stored grid");
    g->add_option("--out", gen_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Exit::ok : Exit::usage;
    }

    try {
        if (g->parsed()) {
            gen.kind = k::parse_generator(gen_kind);
            auto sc = k::generate_scenario(gen);
            if (kk) sc.k = kk;
            if (epsilon > 0) sc.epsilon = epsilon;
            if (grid) sc.grid = grid;
            if (gen_out.empty()) {
                std::cout << k::dump_scenario(sc);
            } else {
                std::error_code ec;
                std::filesystem::create_directories(gen_out, ec);
                if (ec) throw k::IoError("cannot create " + gen_out + ": " + ec.message());
                k::save_scenario(sc, (std::filesystem::path(gen_out) / "scenario.json").string());
                std::cout << "command=generate n=" << sc.size() << " perturbed=" << (sc.perturbed ? 1 : 0) << " status=PASS\n";
            }
            return Exit::ok;
        }

        std::string name;
        for (const auto& [n, s] : subs)
            if (s->parsed()) name = n;
        const auto sc = k::load_scenario(scenario_path);
        auto given = [&](const char* flag) {
            const auto* o = subs[name]->get_option_no_throw(flag);
            return o != nullptr && o->count() > 0;
        };
        if (given("--seed")) opts.seed = seed;
        if (given("--epsilon")) opts.epsilon = epsilon;
        if (given("--k")) opts.k = kk;
        if (given("--grid")) opts.grid = grid;
        if (given("--vc")) opts.vc = vc;
        opts.queries_file = queries_file;

        const auto result = k::run_command(name, sc, opts, out_dir);
        std::cout << result.summary_line() << "\n";
        for (const auto& w : result.warnings) std::cerr << "WARN " << result.command << " " << w << "\n";
        for (const auto& c : result.checks)
            if (!c.passed) std::cerr << "FAIL " << result.command << " " << c.name << ": " << c.detail << "\n";
        return result.passed() || report_only ? Exit::ok : Exit::assertion_failed;
    } catch (const k::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return Exit::usage;
    } catch (const k::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return Exit::io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::failure;
    }
}
