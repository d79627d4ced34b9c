#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kinetikos/discrepancy.hpp"
#include "kinetikos/interference.hpp"
#include "kinetikos/range_counting.hpp"
#include "kinetikos/scenario.hpp"
#include "kinetikos/stats.hpp"
#include "kinetikos/voronoi.hpp"

namespace kinetikos {

class UsageError : public Error {
public:
    using Error::Error;
};

/// Command-line overrides; anything unset falls back to the scenario.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<std::size_t> k;
    std::optional<std::size_t> grid;
    std::optional<std::size_t> vc;
    double constant_c = 4.0;
    int max_attempts = 20;
    unsigned threads = default_threads();
    std::size_t queries = 1000;
    std::string queries_file;
    std::size_t robustness_sets = 3;
    std::size_t iterations = 1000;
    bool svg = true;
};

struct Check {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct CommandResult {
    std::string command;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> files;
    std::vector<std::string> warnings;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
    double metric(const std::string& name) const {
        for (const auto& [k, v] : metrics)
            if (k == name) return v;
        throw PreconditionError("no metric '" + name + "'");
    }
    void check(std::string name, bool ok, std::string detail) { checks.push_back({std::move(name), ok, std::move(detail)}); }
    void put(std::string name, double v) { metrics.emplace_back(std::move(name), v); }

    /// "command=net n=100 ... status=PASS"
    std::string summary_line() const {
        std::string s = "command=" + command;
        for (const auto& [k, v] : metrics) s += " " + k + "=" + format_double(v);
        std::size_t failed = 0;
        for (const auto& c : checks) failed += !c.passed;
        s += " checks=" + std::to_string(checks.size()) + " failed=" + std::to_string(failed);
        s += passed() ? " status=PASS" : " status=FAIL";
        return s;
    }
};

/// Output directory that records every file written into it.
class ReportDir {
public:
    explicit ReportDir(std::filesystem::path root, CommandResult& result) : root_(std::move(root)), result_(result) {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec) throw IoError("cannot create " + root_.string() + ": " + ec.message());
    }

    template <typename Writer>
    void write(const std::string& name, Writer&& w) {
        const auto path = root_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        w(out);
        out.flush();
        if (!out) throw IoError("write failed: " + path.string());
        result_.files.push_back(name);
    }

    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path root_;
    CommandResult& result_;
};

/// Plain SVG polyline plot; convenience output only.
inline void write_svg_series(std::ostream& os, const std::string& title, const std::string& xlabel, const std::string& ylabel,
                             std::span<const double> xs, std::span<const double> ys) {
    const double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x0 = std::min(x0, xs[i]);
        x1 = std::max(x1, xs[i]);
        y1 = std::max(y1, ys[i]);
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    auto px = [&](double x) { return L + (W - L - R) * (x - x0) / (x1 - x0); };
    auto py = [&](double y) { return H - B - (H - T - B) * (y - y0) / (y1 - y0); };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
       << " [" << format_double(x0) << ", " << format_double(x1) << "]</text>\n";
    os << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2
       << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << ylabel << " [0, " << format_double(y1) << "]</text>\n";
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? " " : "") << format_double(std::round(px(xs[i]) * 10) / 10) << "," << format_double(std::round(py(ys[i]) * 10) / 10);
    os << "\"/>\n</svg>\n";
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string edge_field(const IndexSet& e) {
    auto s = e.to_string();
    std::replace(s.begin(), s.end(), ',', ' ');
    return s;
}

inline SampleConfig sample_config(const Scenario& sc, const RunOptions& o) {
    SampleConfig cfg;
    cfg.seed = o.seed.value_or(sc.seed);
    cfg.size_constant = o.constant_c;
    cfg.vc_hint = o.vc;
    cfg.max_attempts = o.max_attempts;
    cfg.enumeration.threads = o.threads;
    return cfg;
}

inline double epsilon_of(const Scenario& sc, const RunOptions& o) { return o.epsilon.value_or(sc.epsilon); }
inline std::size_t grid_of(const Scenario& sc, const RunOptions& o) { return o.grid.value_or(sc.grid); }
inline std::size_t k_of(const Scenario& sc, const RunOptions& o) { return o.k.value_or(sc.k); }

inline void write_checks(ReportDir& dir, const CommandResult& r) {
    dir.write("checks.csv", [&](std::ostream& os) {
        os << "check,passed,detail\n";
        for (const auto& c : r.checks) os << c.name << "," << (c.passed ? 1 : 0) << "," << csv_field(c.detail) << "\n";
    });
    dir.write("failures.csv", [&](std::ostream& os) {
        os << "command,check,detail\n";
        for (const auto& c : r.checks)
            if (!c.passed) os << r.command << "," << c.name << "," << csv_field(c.detail) << "\n";
    });
}

/// Bounding box of the trajectories sampled at the horizon ends.
inline std::pair<Point, Point> motion_box(const MovingPointSet& set) {
    Point lo = set[0](0.0), hi = lo;
    for (double t : {0.0, set.horizon()})
        for (const auto& p : set.at(t))
            for (int j = 0; j < set.dim(); ++j) {
                lo[j] = std::min(lo[j], p[j]);
                hi[j] = std::max(hi[j], p[j]);
            }
    return {lo, hi};
}

inline Point random_unit(Rng& rng, int d) {
    Point u(d);
    double len = 0.0;
    do {
        for (int j = 0; j < d; ++j) u[j] = rng.normal();
        len = norm(u);
    } while (len < 1e-12);
    return u * (1.0 / len);
}

}  // namespace detail

/// A random family member scaled to the point cloud, for query batches.
inline Range random_query_range(Rng& rng, const RangeFamily& family, std::span<const Point> pts) {
    const int d = pts.front().dim();
    Point lo = pts.front(), hi = pts.front();
    for (const auto& p : pts)
        for (int j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    double diam = 1e-9;
    for (int j = 0; j < d; ++j) diam = std::max(diam, hi[j] - lo[j]);
    auto inside = [&](double margin) {
        Point p(d);
        for (int j = 0; j < d; ++j) p[j] = rng.uniform(lo[j] - margin * diam, hi[j] + margin * diam);
        return p;
    };
    switch (family.tag) {
        case FamilyTag::halfspaces: {
            const Point u = detail::random_unit(rng, d);
            return Halfspace{u, dot(u, inside(0.1))};
        }
        case FamilyTag::balls: return Ball{inside(0.5), rng.uniform(0.0, 1.5 * diam)};
        case FamilyTag::bounded_cones: return BoundedCone{inside(0.3), detail::random_unit(rng, d), family.cone_angle, rng.uniform(1e-9, 2.0 * diam)};
        case FamilyTag::intervals: {
            double a = rng.uniform(lo[0] - 0.1 * diam, hi[0] + 0.1 * diam), b = rng.uniform(lo[0] - 0.1 * diam, hi[0] + 0.1 * diam);
            if (a > b) std::swap(a, b);
            return IntervalRange{a, b};
        }
    }
    return IntervalRange{};
}

struct Query {
    double time = 0.0;
    Range range;
};

/// One query per line: "t interval a b", "t halfspace n_1..n_d offset",
/// "t ball c_1..c_d r" or "t cone a_1..a_d u_1..u_d angle cap". Blank lines
/// and lines starting with '#' are skipped.
inline std::vector<Query> parse_queries(std::istream& in, int d) {
    std::vector<Query> out;
    std::string line;
    std::size_t lineno = 0;
    auto read_point = [&](std::istringstream& ss) {
        Point p(d);
        for (int j = 0; j < d; ++j)
            if (!(ss >> p[j])) throw PreconditionError("queries line " + std::to_string(lineno) + ": missing coordinate");
        return p;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        Query q;
        std::string tag;
        if (!(ss >> q.time >> tag)) throw PreconditionError("queries line " + std::to_string(lineno) + ": expected time and range tag");
        auto need = [&](double& x) {
            if (!(ss >> x)) throw PreconditionError("queries line " + std::to_string(lineno) + ": missing parameter");
        };
        if (tag == "interval") {
            IntervalRange r;
            need(r.lower);
            need(r.upper);
            q.range = r;
        } else if (tag == "halfspace") {
            Halfspace h{read_point(ss), 0.0};
            need(h.offset);
            q.range = h;
        } else if (tag == "ball") {
            Ball b{read_point(ss), 0.0};
            need(b.radius);
            q.range = b;
        } else if (tag == "cone") {
            BoundedCone c;
            c.apex = read_point(ss);
            c.direction = read_point(ss);
            need(c.angle);
            need(c.cap_radius);
            q.range = c;
        } else {
            throw PreconditionError("queries line " + std::to_string(lineno) + ": unknown range '" + tag + "'");
        }
        std::visit([](const auto& r) { check_range(r); }, q.range);
        out.push_back(std::move(q));
    }
    return out;
}

inline CommandResult run_net(const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    CommandResult r;
    r.command = "net";
    ReportDir dir(out, r);
    const auto set = sc.moving_set();
    const auto fam = sc.range_family();
    const double eps = detail::epsilon_of(sc, o);
    const auto cfg = detail::sample_config(sc, o);
    r.put("n", static_cast<double>(set.size()));
    r.put("epsilon", eps);
    EpsNet net;
    try {
        net = build_eps_net(set, fam, eps, cfg);
    } catch (const AttemptsExhausted& e) {
        r.check("net_verified", false, "no verified net in " + std::to_string(cfg.max_attempts) + " attempts; best uncovered edge size " + format_double(e.worst_violation()));
        detail::write_checks(dir, r);
        return r;
    }
    r.put("vc", static_cast<double>(net.vc));
    r.put("size", static_cast<double>(net.indices.size()));
    r.put("attempts", static_cast<double>(net.attempts));
    dir.write("net.txt", [&](std::ostream& os) { write_net(os, net); });
    if (within_oracle_guard(set, fam, cfg.enumeration)) {
        const auto rep = verify_eps_net(net, set, fam, cfg.enumeration);
        r.put("threshold", static_cast<double>(rep.threshold));
        r.put("heavy_edges", static_cast<double>(rep.edges_checked));
        r.put("uncovered", static_cast<double>(rep.uncovered.size()));
        dir.write("net_uncovered.csv", [&](std::ostream& os) {
            os << "edge,size,witness_time,witness_range\n";
            for (const auto& u : rep.uncovered)
                os << detail::edge_field(u.edge) << "," << u.edge.size() << "," << format_double(u.witness.time) << "," << detail::csv_field(format_range(u.witness.range)) << "\n";
        });
        r.check("net_verified", net.verified(), "attempts " + std::to_string(net.attempts));
        r.check("no_uncovered_heavy_edges", rep.ok(), std::to_string(rep.uncovered.size()) + " uncovered of " + std::to_string(rep.edges_checked));
    } else {
        r.check("net_verified", net.verified(), net.verified() ? "whole set" : "above oracle guard, not verified");
    }
    dir.write("net_summary.csv", [&](std::ostream& os) {
        os << "key,value\n";
        for (const auto& [k, v] : r.metrics) os << k << "," << format_double(v) << "\n";
    });
    detail::write_checks(dir, r);
    return r;
}

inline CommandResult run_approx(const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    CommandResult r;
    r.command = "approx";
    ReportDir dir(out, r);
    const auto set = sc.moving_set();
    const auto fam = sc.range_family();
    const double eps = detail::epsilon_of(sc, o);
    const auto cfg = detail::sample_config(sc, o);
    r.put("n", static_cast<double>(set.size()));
    r.put("epsilon", eps);
    EpsApproximation a;
    try {
        a = build_eps_approximation(set, fam, eps, cfg);
    } catch (const AttemptsExhausted& e) {
        r.check("approximation_verified", false, "best max deviation " + format_double(e.worst_violation()));
        detail::write_checks(dir, r);
        return r;
    }
    r.put("vc", static_cast<double>(a.vc));
    r.put("size", static_cast<double>(a.indices.size()));
    r.put("attempts", static_cast<double>(a.attempts));
    if (a.verified()) r.put("max_deviation", a.max_deviation);
    dir.write("approx.txt", [&](std::ostream& os) { write_approximation(os, a); });
    r.check("approximation_verified", a.verified(), a.verified() ? "max deviation " + format_double(a.max_deviation) : "above oracle guard, not verified");
    dir.write("approx_summary.csv", [&](std::ostream& os) {
        os << "key,value\n";
        for (const auto& [k, v] : r.metrics) os << k << "," << format_double(v) << "\n";
    });
    detail::write_checks(dir, r);
    return r;
}

inline CommandResult run_voronoi(const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    CommandResult r;
    r.command = "voronoi";
    ReportDir dir(out, r);
    const auto set = sc.moving_set();
    const auto cfg = detail::sample_config(sc, o);
    const std::size_t k = detail::k_of(sc, o);
    const std::size_t grid = detail::grid_of(sc, o);
    const auto f = select_facilities(set, k, cfg);
    const auto rep = verify_balanced(set, f, {}, grid, o.threads);
    r.put("n", static_cast<double>(set.size()));
    r.put("k", static_cast<double>(k));
    r.put("vc", static_cast<double>(f.vc));
    r.put("facilities", static_cast<double>(f.indices.size()));
    r.put("size_bound", static_cast<double>(f.size_bound(set.size())));
    r.put("cover", static_cast<double>(sixty_degree_cover(set.dim()).count()));
    r.put("max_load", static_cast<double>(rep.max_load));
    r.put("load_bound", static_cast<double>(rep.bound));
    r.put("time_of_max", rep.time_of_max);
    r.put("breakpoints", static_cast<double>(rep.breakpoints));
    r.put("checked_times", static_cast<double>(rep.series.size()));
    r.check("facility_size", f.indices.size() <= f.size_bound(set.size()),
            std::to_string(f.indices.size()) + " <= " + std::to_string(f.size_bound(set.size())));
    r.check("max_load", rep.ok(), std::to_string(rep.max_load) + " <= " + std::to_string(rep.bound));

    const auto [lo, hi] = detail::motion_box(set);
    std::vector<std::string> robust_rows;
    std::size_t robust_max = 0;
    for (std::size_t s = 0; s < o.robustness_sets; ++s) {
        Rng rng(derive_seed(cfg.seed, 0x5170 + s));
        std::vector<Point> extra(1 + rng.below(5), Point(set.dim()));
        for (auto& p : extra)
            for (int j = 0; j < set.dim(); ++j) p[j] = rng.uniform(lo[j], hi[j]);
        const auto rr = verify_balanced(set, f, extra, grid, o.threads);
        robust_max = std::max(robust_max, rr.max_load);
        robust_rows.push_back(std::to_string(s) + "," + std::to_string(extra.size()) + "," + std::to_string(rr.max_load) + "," + std::to_string(rr.bound));
        r.check("static_sites_" + std::to_string(s), rr.max_load <= rep.bound, std::to_string(rr.max_load) + " <= " + std::to_string(rep.bound));
    }
    r.put("robust_max_load", static_cast<double>(robust_max));

    dir.write("voronoi_facilities.txt", [&](std::ostream& os) {
        os << "# k: " << k << "\n# vc: " << f.vc << "\n# constant: " << format_double(f.size_constant) << "\n# seed: " << f.seed << "\n";
        for (auto i : f.indices) os << i << "\n";
    });
    dir.write("voronoi_loads.csv", [&](std::ostream& os) {
        os << "time,max_load,argmax_site\n";
        for (const auto& s : rep.series) os << format_double(s.time) << "," << s.max_load << "," << s.argmax_site << "\n";
    });
    dir.write("voronoi_robustness.csv", [&](std::ostream& os) {
        os << "set,sites,max_load,bound\n";
        for (const auto& row : robust_rows) os << row << "\n";
    });
    dir.write("voronoi_summary.csv", [&](std::ostream& os) {
        os << "key,value\n";
        for (const auto& [key, v] : r.metrics) os << key << "," << format_double(v) << "\n";
    });
    if (o.svg) {
        std::vector<double> xs, ys;
        for (const auto& s : rep.series) {
            xs.push_back(s.time);
            ys.push_back(static_cast<double>(s.max_load));
        }
        dir.write("voronoi_loads.svg", [&](std::ostream& os) { write_svg_series(os, "max cell load", "time", "load", xs, ys); });
    }
    detail::write_checks(dir, r);
    return r;
}

inline CommandResult run_interference(const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    CommandResult r;
    r.command = "interference";
    ReportDir dir(out, r);
    const auto set = sc.moving_set();
    const auto cfg = detail::sample_config(sc, o);
    const std::size_t grid = std::max<std::size_t>(1, detail::grid_of(sc, o));
    const auto sched = assign_hub_protocol(set, cfg, o.threads);
    const auto log = count_combinatorial_changes(sched, set.max_degree());
    const double n = static_cast<double>(set.size());
    const double T = set.horizon();

    struct Row {
        double t;
        std::size_t value;
        bool connected;
        std::size_t diameter, edges;
        bool exact;
    };
    std::vector<Row> rows(grid);
    parallel_for(grid, o.threads, [&](std::size_t i) {
        const double t = grid == 1 ? 0.0 : T * static_cast<double>(i) / static_cast<double>(grid - 1);
        const auto snap = communication_graph(set, sched, t);
        const auto c = connectivity_and_diameter(snap);
        const auto v = interference_of(snap, derive_seed(cfg.seed, i));
        rows[i] = {t, v.value, c.connected, c.diameter, snap.edges.size(), v.exact};
    });

    std::size_t max_i = 0, max_d = 0, disconnected = 0;
    double sum_i = 0.0;
    bool exact = true;
    for (const auto& row : rows) {
        max_i = std::max(max_i, row.value);
        sum_i += static_cast<double>(row.value);
        if (!row.connected) ++disconnected;
        else max_d = std::max(max_d, row.diameter);
        exact = exact && row.exact;
    }
    const double i_bound = 8.0 * std::sqrt(n * std::log(n));
    const double c_bound = 4.0 * std::pow(n, 1.5) * std::sqrt(std::log(n));
    r.put("n", n);
    r.put("hubs", static_cast<double>(sched.hubs.indices.size()));
    r.put("vc", static_cast<double>(sched.hubs.vc));
    r.put("snapshots", static_cast<double>(grid));
    r.put("max_interference", static_cast<double>(max_i));
    r.put("mean_interference", sum_i / static_cast<double>(grid));
    r.put("interference_bound", i_bound);
    r.put("exact", exact ? 1.0 : 0.0);
    r.put("disconnected", static_cast<double>(disconnected));
    r.put("max_diameter", static_cast<double>(max_d));
    r.put("total_changes", static_cast<double>(log.total));
    r.put("change_bound", c_bound);
    r.check("connected", disconnected == 0, std::to_string(disconnected) + " disconnected snapshots");
    r.check("diameter", disconnected == 0 && max_d <= 3, "max hop diameter " + std::to_string(max_d));
    r.check("interference_bound", static_cast<double>(max_i) <= i_bound, std::to_string(max_i) + " <= " + format_double(i_bound));
    r.check("change_bound", static_cast<double>(log.total) <= c_bound, std::to_string(log.total) + " <= " + format_double(c_bound));
    r.check("envelope_caps", log.cap_violations.empty(), std::to_string(log.cap_violations.size()) + " envelopes over their crossing cap");

    dir.write("interference.csv", [&](std::ostream& os) {
        os << "t,interference,connected,diameter,num_edges\n";
        for (const auto& row : rows)
            os << format_double(row.t) << "," << row.value << "," << (row.connected ? 1 : 0) << "," << row.diameter << "," << row.edges << "\n";
    });
    dir.write("changes.csv", [&](std::ostream& os) {
        os << "point_index,change_count\n";
        for (std::size_t p = 0; p < log.per_point.size(); ++p) os << p << "," << log.per_point[p] << "\n";
    });
    dir.write("schedule.txt", [&](std::ostream& os) {
        os << "# point role: [from, to) partner ...\n";
        for (std::size_t p = 0; p < sched.size(); ++p) {
            const auto& s = sched.partners[p];
            os << p << (sched.is_hub[p] ? " hub:" : " node:");
            for (std::size_t i = 0; i < s.partners.size(); ++i) {
                const double a = i == 0 ? 0.0 : s.breaks[i - 1];
                const double b = i < s.breaks.size() ? s.breaks[i] : T;
                os << " [" << format_double(a) << "," << format_double(b) << ") " << s.partners[i];
            }
            os << "\n";
        }
    });
    dir.write("interference_summary.csv", [&](std::ostream& os) {
        os << "key,value\n";
        for (const auto& [key, v] : r.metrics) os << key << "," << format_double(v) << "\n";
    });
    if (o.svg) {
        std::vector<double> xs, ys;
        for (const auto& row : rows) {
            xs.push_back(row.t);
            ys.push_back(static_cast<double>(row.value));
        }
        dir.write("interference.svg", [&](std::ostream& os) { write_svg_series(os, "interference", "time", "I", xs, ys); });
    }
    detail::write_checks(dir, r);
    return r;
}

inline CommandResult run_count(const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    CommandResult r;
    r.command = "count";
    ReportDir dir(out, r);
    const auto set = sc.moving_set();
    const auto fam = sc.range_family();
    const double eps = detail::epsilon_of(sc, o);
    const auto cfg = detail::sample_config(sc, o);
    ApproxCounter counter;
    try {
        counter = build_counter(set, fam, eps, cfg);
    } catch (const AttemptsExhausted& e) {
        r.check("counter_verified", false, "best max deviation " + format_double(e.worst_violation()));
        detail::write_checks(dir, r);
        return r;
    }
    std::vector<Query> queries;
    if (!o.queries_file.empty()) {
        std::ifstream in(o.queries_file);
        if (!in) throw IoError("cannot read " + o.queries_file);
        queries = parse_queries(in, set.dim());
    } else {
        Rng rng(derive_seed(cfg.seed, 0xC0));
        for (std::size_t q = 0; q < o.queries; ++q) {
            const double t = rng.uniform(0.0, set.horizon());
            queries.push_back({t, random_query_range(rng, fam, set.at(t))});
        }
    }
    const double n = static_cast<double>(set.size());
    std::size_t violations = 0;
    double worst = 0.0;
    dir.write("count.csv", [&](std::ostream& os) {
        os << "t,range,k_approx,l_exact,error\n";
        for (const auto& q : queries) {
            const double k = approx_count(counter, q.range, q.time);
            const auto l = exact_count(set, q.range, q.time);
            const double err = std::abs(k - static_cast<double>(l)) / n;
            worst = std::max(worst, err);
            if (err > eps + 1e-12) ++violations;
            os << format_double(q.time) << "," << detail::csv_field(format_range(q.range)) << "," << format_double(k) << "," << l << "," << format_double(err) << "\n";
        }
    });
    r.put("n", n);
    r.put("epsilon", eps);
    r.put("vc", static_cast<double>(counter.approximation.vc));
    r.put("sample", static_cast<double>(counter.sample.size()));
    r.put("scale", counter.scale());
    r.put("queries", static_cast<double>(queries.size()));
    r.put("max_error", worst);
    r.put("violations", static_cast<double>(violations));
    r.check("counter_verified", counter.approximation.verified(),
            counter.approximation.verified() ? "max deviation " + format_double(counter.approximation.max_deviation) : "above oracle guard, not verified");
    r.check("error_contract", violations == 0, std::to_string(violations) + " queries with |k'-l| > eps*n");
    dir.write("count_summary.csv", [&](std::ostream& os) {
        os << "key,value\n";
        for (const auto& [key, v] : r.metrics) os << key << "," << format_double(v) << "\n";
    });
    detail::write_checks(dir, r);
    return r;
}

inline CommandResult run_disc(const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    CommandResult r;
    r.command = "disc";
    ReportDir dir(out, r);
    const auto set = sc.moving_set();
    const auto fam = sc.range_family();
    const auto cfg = detail::sample_config(sc, o);
    const auto cat = enumerate_kinetic_hyperedges(set, fam, cfg.enumeration);
    const auto chi = color_random(set.size(), cfg.seed);
    const auto before = kinetic_discrepancy(cat, chi);
    const auto tr = improve_coloring(cat, chi, o.iterations);
    const auto after = kinetic_discrepancy(cat, tr.coloring);
    const double n = static_cast<double>(set.size());
    const double d = static_cast<double>(set.dim());
    const double ub = random_coloring_reference(set.size(), cat.size());
    r.put("n", n);
    r.put("edges", static_cast<double>(cat.size()));
    r.put("random_disc", static_cast<double>(before.value));
    r.put("improved_disc", static_cast<double>(after.value));
    r.put("flips", static_cast<double>(tr.flips.size()));
    r.put("union_bound", ub);
    bool monotone = true;
    for (std::size_t i = 1; i < tr.maxima.size(); ++i) monotone = monotone && tr.maxima[i] <= tr.maxima[i - 1];
    r.check("improvement_monotone", monotone && after.value <= before.value,
            std::to_string(before.value) + " -> " + std::to_string(after.value));
    dir.write("coloring.csv", [&](std::ostream& os) { write_coloring(os, tr.coloring); });
    dir.write("disc_trend.csv", [&](std::ostream& os) {
        os << "n,edges,random_disc,improved_disc,union_bound,ref_kinetic,ref_primal,witness\n";
        os << set.size() << "," << cat.size() << "," << before.value << "," << after.value << "," << format_double(ub) << ","
           << format_double(std::pow(n, 0.5 - 1.0 / (2.0 * d + 2.0))) << "," << format_double(std::pow(n, 0.5 - 1.0 / (2.0 * d))) << ","
           << detail::edge_field(after.witness) << "\n";
    });
    dir.write("disc_steps.csv", [&](std::ostream& os) {
        os << "step,flipped,max_imbalance\n";
        os << "0,," << tr.maxima.front() << "\n";
        for (std::size_t i = 0; i < tr.flips.size(); ++i) os << i + 1 << "," << tr.flips[i] << "," << tr.maxima[i + 1] << "\n";
    });
    detail::write_checks(dir, r);
    return r;
}

inline std::vector<RangeFamily> oracle_families(int d) {
    std::vector<RangeFamily> f;
    if (d == 1) f.push_back(RangeFamily::intervals());
    f.push_back(RangeFamily::halfspaces());
    f.push_back(RangeFamily::balls());
    if (d <= 2) f.push_back(RangeFamily::bounded_cones());
    return f;
}

inline CommandResult run_oracle(const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    CommandResult r;
    r.command = "oracle";
    ReportDir dir(out, r);
    const auto set = sc.moving_set();
    EnumerationOptions opts;
    opts.threads = o.threads;
    std::vector<std::string> rows;
    r.put("n", static_cast<double>(set.size()));
    for (const auto& fam : oracle_families(set.dim())) {
        const std::string name(to_string(fam.tag));
        const auto tl = event_times(set, fam, opts);
        const auto cat = enumerate_kinetic_hyperedges(set, fam, opts);
        std::size_t bad = 0;
        for (const auto& [e, w] : cat.entries())
            if (!(trace_of(w.range, set.at(w.time)) == e)) ++bad;
        r.check("witnesses_" + name, bad == 0, std::to_string(bad) + " witnesses do not reproduce their edge");
        r.put("edges_" + name, static_cast<double>(cat.size()));
        dir.write("catalog_" + name + ".txt", [&](std::ostream& os) { cat.write(os); });
        dir.write("witnesses_" + name + ".txt", [&](std::ostream& os) { cat.write_witnesses(os); });
        dir.write("timeline_" + name + ".txt", [&](std::ostream& os) {
            os << "# events: " << tl.events.size() << "\n# degenerate_tuples: " << tl.degenerate_tuples << "\n# events_beyond_horizon: " << tl.events_beyond_horizon << "\n";
            if (!std::isnan(tl.last_event)) os << "# last_event: " << format_double(tl.last_event) << "\n";
            for (double e : tl.events) os << format_double(e) << "\n";
        });
        r.put("events_beyond_horizon_" + name, static_cast<double>(tl.events_beyond_horizon));
        if (tl.horizon_too_short())
            r.warnings.push_back(name + ": " + std::to_string(tl.events_beyond_horizon) + " events after the horizon, last at " + format_double(tl.last_event));
        rows.push_back(name + "," + std::to_string(cat.size()) + "," + std::to_string(tl.events.size()) + "," + std::to_string(cat.largest_edge()));
    }
    dir.write("oracle_summary.csv", [&](std::ostream& os) {
        os << "family,edges,events,largest_edge\n";
        for (const auto& row : rows) os << row << "\n";
    });
    detail::write_checks(dir, r);
    return r;
}

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"net", "approx", "voronoi", "interference", "count", "disc", "oracle"};
    return names;
}

inline CommandResult run_command(const std::string& name, const Scenario& sc, const RunOptions& o, const std::filesystem::path& out) {
    if (name == "net") return run_net(sc, o, out);
    if (name == "approx") return run_approx(sc, o, out);
    if (name == "voronoi") return run_voronoi(sc, o, out);
    if (name == "interference") return run_interference(sc, o, out);
    if (name == "count") return run_count(sc, o, out);
    if (name == "disc") return run_disc(sc, o, out);
    if (name == "oracle") return run_oracle(sc, o, out);
    throw UsageError("unknown command '" + name + "'");
}

}  // namespace kinetikos
