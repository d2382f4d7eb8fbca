// Command-line driver: segment generation, builds, benchmarks, equivalence
// checks and point location.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "dyntrap/bench.h"
#include "dyntrap/tsd.h"

using namespace dyntrap;

namespace {

enum Exit { kOk = 0, kVerification = 1, kInput = 2 };

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    for (const std::string& item : split(text, ',')) {
        std::size_t used = 0;
        unsigned long long v = std::stoull(item, &used);
        if (used != item.size() || v == 0) throw std::invalid_argument("bad size '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty size list");
    return out;
}

void emit_csv(const std::string& path, const std::vector<RunRecord>& records) {
    if (path.empty() || path == "-")
        write_csv(std::cout, records);
    else
        write_csv(path, records);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic trapezoidal search structures"};
    app.require_subcommand(1);
    app.fallthrough();
    bool audit = false;
    app.add_flag("--audit", audit, "Audit the structure after every step");

    std::string kind = "uniform", out_path, segments_path, order_path, csv_path, queries_path, mode = "static",
                n_list = "512,1024,2048", modes = "static,dynamic";
    std::size_t n = 100, seeds = 1, exact_cap = 5000;
    std::uint64_t seed = 1;
    bool per_insert = false;

    auto* gen = app.add_subcommand("gen", "Generate random segments");
    gen->add_option("--kind", kind)->check(CLI::IsMember({"horizontal", "short", "uniform"}));
    gen->add_option("--n", n)->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed);
    gen->add_option("--out", out_path, "Output file (stdout when omitted)");

    auto* build = app.add_subcommand("build", "Build one structure and report it as CSV");
    build->add_option("--mode", mode)->check(CLI::IsMember({"static", "dynamic", "tsd"}));
    build->add_option("--segments", segments_path)->required();
    build->add_option("--order", order_path, "Insertion order (file order when omitted)");
    build->add_option("--csv", csv_path);
    build->add_option("--seed", seed);
    build->add_option("--exact-cap", exact_cap);
    build->add_flag("--per-insert", per_insert, "Also write one row per insertion");

    auto* bench = app.add_subcommand("bench", "Run a benchmark series");
    bench->add_option("--kind", kind)->check(CLI::IsMember({"horizontal", "short", "uniform"}));
    bench->add_option("--n-list", n_list);
    bench->add_option("--seeds", seeds)->check(CLI::PositiveNumber);
    bench->add_option("--modes", modes);
    bench->add_option("--csv", csv_path);
    bench->add_option("--exact-cap", exact_cap);
    bench->add_flag("--per-insert", per_insert, "Also write one row per insertion");

    auto* check = app.add_subcommand("check", "Compare a dynamic build with the static build of the same order");
    check->add_option("--segments", segments_path)->required();
    check->add_option("--order", order_path)->required();

    auto* locate = app.add_subcommand("locate", "Report the region containing each query point");
    locate->add_option("--segments", segments_path)->required();
    locate->add_option("--queries", queries_path)->required();
    locate->add_option("--mode", mode)->check(CLI::IsMember({"static", "tsd"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*gen) {
            auto segments = generate({parse_generator_kind(kind), n, seed});
            if (out_path.empty() || out_path == "-") {
                write_segments(std::cout, segments);
            } else {
                std::ofstream out(out_path);
                if (!out) throw IoError("cannot write " + out_path);
                write_segments(out, segments);
            }
        } else if (*build) {
            auto segments = read_segments(segments_path);
            std::vector<std::size_t> order;
            if (!order_path.empty()) order = read_order(order_path, segments.size());
            BuildOptions options;
            options.audit = audit;
            options.exact_cap = exact_cap;
            options.seed = seed;
            std::vector<RunRecord> records;
            if (per_insert) options.per_insert = &records;
            records.push_back(build_record(parse_structure(mode), segments, order, options));
            emit_csv(csv_path, records);
        } else if (*bench) {
            SeriesOptions options;
            options.kind = parse_generator_kind(kind);
            options.n_list = parse_sizes(n_list);
            options.seeds = seeds;
            for (const std::string& m : split(modes, ',')) options.structures.push_back(parse_structure(m));
            if (options.structures.empty()) throw std::invalid_argument("no modes given");
            options.audit = audit;
            options.per_insert = per_insert;
            options.exact_cap = exact_cap;
            emit_csv(csv_path, run_series(options));
        } else if (*check) {
            auto segments = read_segments(segments_path);
            auto order = read_order(order_path, segments.size());
            auto report = check_equivalence(segments, order);
            std::cout << (report.equal ? "equal" : "different") << '\n';
            for (const auto& issue : report.ric_issues) std::cout << "static: " << issue << '\n';
            for (const auto& issue : report.dynamic_issues) std::cout << "dynamic: " << issue << '\n';
            return report.ok() ? kOk : kVerification;
        } else if (*locate) {
            auto segments = read_segments(segments_path);
            auto queries = read_points(queries_path);
            Domain domain = bounding_domain(segments, queries);
            if (mode == "tsd") {
                Tsd dag(domain);
                for (const Segment& s : segments) dag.leaf_insert(s);
                if (audit)
                    if (auto issues = dag.audit(); !issues.empty()) throw VerificationError(issues.front());
                for (const Point& q : queries) std::cout << q.str() << ' ' << dag.node(dag.locate(q)).region.str() << '\n';
            } else {
                Tst tree(domain);
                for (const Segment& s : segments) tree.leaf_insert(s);
                if (audit)
                    if (auto issues = tree.audit(); !issues.empty()) throw VerificationError(issues.front());
                for (const Point& q : queries) std::cout << q.str() << ' ' << tree.node(tree.locate(q)).region.str() << '\n';
            }
        }
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerification;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return kOk;
}
