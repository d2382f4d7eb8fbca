#include "dyntrap/bench.h"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dyntrap/dynamic.h"
#include "dyntrap/tsd.h"

namespace dyntrap {

namespace {

constexpr std::int64_t kSide = std::int64_t{1} << 32;

// Integer in [1, 2^32 - 1].
std::int64_t draw_coordinate(std::mt19937_64& rng) {
    while (true) {
        std::int64_t v = static_cast<std::int64_t>(rng() >> 32);
        if (v != 0) return v;
    }
}

// Uniform double in [0, 1).
double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::optional<Segment> draw(GeneratorKind kind, SegId id, std::mt19937_64& rng) {
    std::int64_t x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    switch (kind) {
    case GeneratorKind::Horizontal:
        y1 = y2 = draw_coordinate(rng);
        x1 = draw_coordinate(rng);
        x2 = draw_coordinate(rng);
        break;
    case GeneratorKind::Short: {
        x1 = draw_coordinate(rng);
        y1 = draw_coordinate(rng);
        double angle = 2.0 * M_PI * draw_unit(rng);
        // uniform on (0, 6%] of the side, mean 3%
        double length = 0.06 * static_cast<double>(kSide) * (1.0 - draw_unit(rng));
        x2 = x1 + std::llround(length * std::cos(angle));
        y2 = y1 + std::llround(length * std::sin(angle));
        if (x2 < 1 || x2 >= kSide || y2 < 1 || y2 >= kSide) return std::nullopt;
        break;
    }
    case GeneratorKind::Uniform:
        x1 = draw_coordinate(rng);
        y1 = draw_coordinate(rng);
        x2 = draw_coordinate(rng);
        y2 = draw_coordinate(rng);
        break;
    }
    if (x1 == x2 && y1 == y2) return std::nullopt;
    return Segment(id, Point(x1, y1), Point(x2, y2));
}

bool segments_cross(const Segment& a, const Segment& b) {
    if (orient(a.left(), a.right(), b.left()) * orient(a.left(), a.right(), b.right()) >= 0) return false;
    return orient(b.left(), b.right(), a.left()) * orient(b.left(), b.right(), a.right()) < 0;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Non-empty, comment-stripped lines split into tokens, with line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> tokenize(std::istream& in) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string t; fields >> t;) tokens.push_back(t);
        out.push_back({number, std::move(tokens)});
    }
    return out;
}

Rational parse_field(const std::string& text, std::size_t line) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument&) {
        throw ParseError("line " + std::to_string(line) + ": bad number '" + text + "'");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

void fail_audit(const char* what, const std::vector<std::string>& issues) {
    if (!issues.empty()) throw VerificationError(std::string(what) + " audit: " + issues.front());
}

}  // namespace

const char* to_string(GeneratorKind kind) {
    switch (kind) {
    case GeneratorKind::Horizontal: return "horizontal";
    case GeneratorKind::Short: return "short";
    case GeneratorKind::Uniform: return "uniform";
    }
    return "?";
}

const char* to_string(Structure structure) {
    switch (structure) {
    case Structure::TstStatic: return "tst-static";
    case Structure::TstDynamic: return "tst-dynamic";
    case Structure::Tsd: return "tsd";
    }
    return "?";
}

GeneratorKind parse_generator_kind(const std::string& text) {
    if (text == "horizontal") return GeneratorKind::Horizontal;
    if (text == "short") return GeneratorKind::Short;
    if (text == "uniform") return GeneratorKind::Uniform;
    throw std::invalid_argument("unknown generator kind '" + text + "'");
}

Structure parse_structure(const std::string& text) {
    if (text == "static" || text == "tst-static") return Structure::TstStatic;
    if (text == "dynamic" || text == "tst-dynamic") return Structure::TstDynamic;
    if (text == "tsd") return Structure::Tsd;
    throw std::invalid_argument("unknown structure '" + text + "'");
}

Domain generator_domain() { return Domain{Rational(0), Rational(0), Rational(kSide), Rational(kSide)}; }

std::vector<Segment> generate(const GeneratorSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("generator needs n >= 1");
    std::mt19937_64 rng(spec.seed);
    std::vector<Segment> out;
    out.reserve(spec.n);
    OverlapIndex overlaps;
    while (out.size() < spec.n) {
        auto s = draw(spec.kind, static_cast<SegId>(out.size()), rng);
        if (!s) continue;
        try {
            overlaps.check(*s);
        } catch (const OverlapError&) {
            continue;
        }
        overlaps.add(*s);
        out.push_back(*s);
    }
    return out;
}

std::size_t exact_crossings(const std::vector<Segment>& segments) {
    std::vector<const Segment*> by_left;
    for (const Segment& s : segments) by_left.push_back(&s);
    std::sort(by_left.begin(), by_left.end(),
              [](const Segment* a, const Segment* b) { return a->left().x() < b->left().x(); });
    std::size_t k = 0;
    for (std::size_t i = 0; i < by_left.size(); ++i) {
        const Rational& reach = by_left[i]->right().x();
        for (std::size_t j = i + 1; j < by_left.size() && by_left[j]->left().x() <= reach; ++j)
            if (segments_cross(*by_left[i], *by_left[j])) ++k;
    }
    return k;
}

RunRecord build_record(Structure structure, const std::vector<Segment>& segments,
                       const std::vector<std::size_t>& order, const BuildOptions& options) {
    std::vector<std::size_t> sequence = order;
    if (sequence.empty()) {
        sequence.resize(segments.size());
        std::iota(sequence.begin(), sequence.end(), 0);
    }
    Domain domain = bounding_domain(segments);
    RunRecord rec;
    rec.structure = structure;
    rec.n = segments.size();
    rec.seed = options.seed;

    VisitStats total;
    std::size_t step = 0;
    auto note = [&](const VisitStats& st, std::size_t size) {
        total += st;
        ++step;
        if (!options.per_insert) return;
        RunRecord r;
        r.n = step;
        r.k = total.crossings;
        r.structure = structure;
        r.size = size;
        r.search_visits = static_cast<double>(st.search_visits);
        r.update_visits = static_cast<double>(st.update_visits);
        r.seed = options.seed;
        options.per_insert->push_back(r);
    };

    auto start = std::chrono::steady_clock::now();
    TreeShape shape;
    if (structure == Structure::Tsd) {
        Tsd dag(domain, options.seed);
        for (std::size_t i : sequence) {
            VisitStats st = dag.leaf_insert(segments.at(i));
            note(st, dag.size());
            if (options.audit) fail_audit("search DAG", dag.audit());
        }
        shape = dag.shape();
    } else {
        Tst tree(domain, options.seed);
        std::mt19937_64 rng(options.seed ^ 0x5851f42d4c957f2dULL);
        for (std::size_t i : sequence) {
            const Segment& s = segments.at(i);
            VisitStats st = structure == Structure::TstStatic ? tree.leaf_insert(s) : insert(tree, s, rng);
            note(st, tree.size());
            if (options.audit) fail_audit("search tree", tree.audit(tree.segment_count() <= 2000));
        }
        shape = tree.shape();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    rec.size = shape.size;
    rec.max_depth = shape.max_depth;
    rec.mean_leaf_depth = shape.mean_leaf_depth;
    double steps = std::max<std::size_t>(step, 1);
    rec.search_visits = static_cast<double>(total.search_visits) / steps;
    rec.update_visits = static_cast<double>(total.update_visits) / steps;
    rec.k = segments.size() <= options.exact_cap ? exact_crossings(segments) : total.crossings;
    return rec;
}

std::vector<RunRecord> run_series(const SeriesOptions& options) {
    std::vector<RunRecord> out;
    for (std::size_t n : options.n_list) {
        for (std::uint64_t seed = 1; seed <= options.seeds; ++seed) {
            auto segments = generate({options.kind, n, seed});
            for (Structure structure : options.structures) {
                BuildOptions build;
                build.audit = options.audit;
                build.exact_cap = options.exact_cap;
                build.seed = seed;
                std::vector<RunRecord> steps;
                if (options.per_insert) build.per_insert = &steps;
                RunRecord rec = build_record(structure, segments, {}, build);
                out.insert(out.end(), steps.begin(), steps.end());
                out.push_back(rec);
            }
        }
    }
    return out;
}

const char* const kCsvHeader = "n,k,structure,size,max_depth,mean_leaf_depth,search_visits,update_visits,seed,wall_ms";

std::string csv_row(const RunRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%s,%zu,%zu,%.6f,%.6f,%.6f,%llu,%.3f", r.n, r.k, to_string(r.structure),
                  r.size, r.max_depth, r.mean_leaf_depth, r.search_visits, r.update_visits,
                  static_cast<unsigned long long>(r.seed), r.wall_ms);
    return buf;
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kCsvHeader << '\n';
    for (const RunRecord& r : records) out << csv_row(r) << '\n';
}

void write_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_csv(out, records);
    if (!out) throw IoError("write failed on " + path);
}

LogFit fit_log_powers(const std::vector<std::pair<double, double>>& samples) {
    std::set<double> distinct;
    for (const auto& [n, cost] : samples) {
        if (!(n > 0)) throw std::invalid_argument("fit needs positive n");
        distinct.insert(n);
    }
    if (distinct.size() < 3) throw DegenerateFit("fit needs at least three distinct n");

    Eigen::MatrixXd basis(samples.size(), 3);
    Eigen::VectorXd cost(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double l = std::log(samples[i].first);
        basis.row(i) << 1.0, l, l * l;
        cost(i) = samples[i].second;
    }
    Eigen::VectorXd c = basis.colPivHouseholderQr().solve(cost);
    double mean = cost.mean();
    double ss_res = (basis * c - cost).squaredNorm();
    double ss_tot = (cost.array() - mean).square().sum();

    LogFit fit;
    for (int i = 0; i < 3; ++i) fit.coefficients[i] = c(i);
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-18 ? 1.0 : 0.0);
    return fit;
}

EquivalenceReport check_equivalence(const std::vector<Segment>& segments, const std::vector<std::size_t>& order) {
    if (order.size() != segments.size()) throw ParseError("order length differs from the segment count");
    std::vector<std::size_t> position(segments.size());
    std::vector<Segment> ascending;
    for (std::size_t j = 0; j < order.size(); ++j) {
        position.at(order[j]) = j;
        ascending.push_back(segments.at(order[j]));
    }
    Domain domain = bounding_domain(segments);
    bool full_audit = segments.size() <= 2000;

    EquivalenceReport report;
    Tst ric(domain, 1);
    build_ric(ric, ascending);
    report.ric_issues = ric.audit(full_audit);

    Tst dynamic(domain, 2);
    std::vector<bool> placed(segments.size(), false);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        std::size_t rank = 1;
        for (std::size_t j = 0; j < position[i]; ++j) rank += placed[j];
        placed[position[i]] = true;
        report.dynamic_stats += insert_at(dynamic, segments[i], rank);
    }
    report.dynamic_issues = dynamic.audit(full_audit);
    report.equal = structural_equal(ric, dynamic);
    return report;
}

std::vector<Segment> read_segments(std::istream& in) {
    std::vector<Segment> out;
    for (auto& [line, tokens] : tokenize(in)) {
        if (tokens.size() != 4)
            throw ParseError("line " + std::to_string(line) + ": expected four values, got " +
                             std::to_string(tokens.size()));
        Point a(parse_field(tokens[0], line), parse_field(tokens[1], line));
        Point b(parse_field(tokens[2], line), parse_field(tokens[3], line));
        if (a == b) throw ParseError("line " + std::to_string(line) + ": degenerate segment");
        out.emplace_back(static_cast<SegId>(out.size()), a, b);
    }
    return out;
}

std::vector<Segment> read_segments(const std::string& path) {
    auto in = open_input(path);
    return read_segments(in);
}

void write_segments(std::ostream& out, const std::vector<Segment>& segments) {
    for (const Segment& s : segments)
        out << s.left().x().get_str() << ' ' << s.left().y().get_str() << ' ' << s.right().x().get_str() << ' '
            << s.right().y().get_str() << '\n';
}

std::vector<std::size_t> read_order(std::istream& in, std::size_t n) {
    std::vector<std::size_t> out;
    std::vector<bool> seen(n, false);
    for (auto& [line, tokens] : tokenize(in)) {
        if (tokens.size() != 1) throw ParseError("line " + std::to_string(line) + ": expected one index");
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tokens[0], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tokens[0].size() || tokens[0][0] == '-')
            throw ParseError("line " + std::to_string(line) + ": bad index '" + tokens[0] + "'");
        if (v >= n || seen[v])
            throw ParseError("line " + std::to_string(line) + ": index " + tokens[0] + " out of range or repeated");
        seen[v] = true;
        out.push_back(v);
    }
    if (out.size() != n) throw ParseError("order lists " + std::to_string(out.size()) + " of " + std::to_string(n));
    return out;
}

std::vector<std::size_t> read_order(const std::string& path, std::size_t n) {
    auto in = open_input(path);
    return read_order(in, n);
}

std::vector<Point> read_points(std::istream& in) {
    std::vector<Point> out;
    for (auto& [line, tokens] : tokenize(in)) {
        if (tokens.size() != 2) throw ParseError("line " + std::to_string(line) + ": expected two values");
        out.emplace_back(parse_field(tokens[0], line), parse_field(tokens[1], line));
    }
    return out;
}

std::vector<Point> read_points(const std::string& path) {
    auto in = open_input(path);
    return read_points(in);
}

Domain bounding_domain(const std::vector<Segment>& segments, const std::vector<Point>& points) {
    std::vector<const Point*> all;
    for (const Segment& s : segments) {
        all.push_back(&s.left());
        all.push_back(&s.right());
    }
    for (const Point& p : points) all.push_back(&p);
    if (all.empty()) return Domain{Rational(0), Rational(0), Rational(1), Rational(1)};
    Domain d{all[0]->x(), all[0]->y(), all[0]->x(), all[0]->y()};
    for (const Point* p : all) {
        d.xmin = std::min(d.xmin, p->x());
        d.ymin = std::min(d.ymin, p->y());
        d.xmax = std::max(d.xmax, p->x());
        d.ymax = std::max(d.ymax, p->y());
    }
    d.xmin -= 1;
    d.ymin -= 1;
    d.xmax += 1;
    d.ymax += 1;
    return d;
}

}  // namespace dyntrap
