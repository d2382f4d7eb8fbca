#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyntrap/geometry.h"
#include "dyntrap/tst.h"

namespace dyntrap {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateFit : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an audit or an equivalence check fails.
class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class GeneratorKind { Horizontal, Short, Uniform };
enum class Structure { TstStatic, TstDynamic, Tsd };

const char* to_string(GeneratorKind kind);
const char* to_string(Structure structure);
GeneratorKind parse_generator_kind(const std::string& text);
/// Accepts the CLI names static, dynamic, tsd and the CSV names.
Structure parse_structure(const std::string& text);

/// Square of side 2^32; generated coordinates are integers in [1, 2^32 - 1].
Domain generator_domain();

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::Uniform;
    std::size_t n = 1;
    std::uint64_t seed = 1;
};

/// Deterministic for a fixed spec. Degenerate and overlapping draws are
/// rejected and redrawn. Ids are 0..n-1 in generation order.
std::vector<Segment> generate(const GeneratorSpec& spec);

/// Exact number of properly crossing pairs; pairs with disjoint x-ranges
/// are skipped.
std::size_t exact_crossings(const std::vector<Segment>& segments);

struct RunRecord {
    std::size_t n = 0;
    std::size_t k = 0;
    Structure structure = Structure::TstStatic;
    std::size_t size = 0;
    std::size_t max_depth = 0;
    double mean_leaf_depth = 0.0;
    double search_visits = 0.0;  // mean per insertion
    double update_visits = 0.0;  // mean per insertion
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
};

struct BuildOptions {
    bool audit = false;
    std::size_t exact_cap = 5000;
    std::uint64_t seed = 1;
    /// Filled with one record per insertion when set (n is the size after it).
    std::vector<RunRecord>* per_insert = nullptr;
};

/// Builds one structure. Static and TSD builds insert in `order` (file order
/// when empty) with ascending priority; the dynamic build inserts in file
/// order at uniformly random ranks.
RunRecord build_record(Structure structure, const std::vector<Segment>& segments,
                       const std::vector<std::size_t>& order, const BuildOptions& options);

struct SeriesOptions {
    GeneratorKind kind = GeneratorKind::Horizontal;
    std::vector<std::size_t> n_list;
    std::size_t seeds = 1;
    std::vector<Structure> structures;
    bool audit = false;
    bool per_insert = false;
    std::size_t exact_cap = 5000;
};

std::vector<RunRecord> run_series(const SeriesOptions& options);

extern const char* const kCsvHeader;
std::string csv_row(const RunRecord& r);
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_csv(const std::string& path, const std::vector<RunRecord>& records);

struct LogFit {
    std::array<double, 3> coefficients{};  // basis 1, ln n, ln^2 n
    double r_squared = 0.0;
};

LogFit fit_log_powers(const std::vector<std::pair<double, double>>& samples);

struct EquivalenceReport {
    bool equal = false;
    std::vector<std::string> ric_issues;
    std::vector<std::string> dynamic_issues;
    VisitStats dynamic_stats;
    bool ok() const { return equal && ric_issues.empty() && dynamic_issues.empty(); }
};

/// RIC tree of the final order against a dynamic tree that receives the
/// segments in file order at the ranks realizing that order.
EquivalenceReport check_equivalence(const std::vector<Segment>& segments, const std::vector<std::size_t>& order);

/// Segment files: four values per line; '#' starts a comment.
std::vector<Segment> read_segments(std::istream& in);
std::vector<Segment> read_segments(const std::string& path);
void write_segments(std::ostream& out, const std::vector<Segment>& segments);
/// A permutation of 0..n-1, one index per line.
std::vector<std::size_t> read_order(std::istream& in, std::size_t n);
std::vector<std::size_t> read_order(const std::string& path, std::size_t n);
std::vector<Point> read_points(std::istream& in);
std::vector<Point> read_points(const std::string& path);

/// Open box around the segments and points with a margin of one unit.
Domain bounding_domain(const std::vector<Segment>& segments, const std::vector<Point>& points = {});

}  // namespace dyntrap
