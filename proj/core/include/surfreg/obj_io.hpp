#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "surfreg/mesh.hpp"
#include "surfreg/rigid.hpp"

namespace surfreg {

/// Structured parse failure. line() is 1-based; 0 means the failure is not
/// tied to a specific line (for example a config-level problem).
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what);
    int line() const { return line_; }

    /// Prefixes the path onto an existing error, keeping its line number.
    static ParseError in_file(const std::string& path, const ParseError& inner);

private:
    struct Preformatted {};
    ParseError(Preformatted, int line, const std::string& what);

    int line_;
};

/// OBJ subset: v, vn, f (1-based indices, negative counted from the end,
/// /t/n suffixes ignored, >3-gons fan-triangulated); every other line type is
/// skipped. vn lines become mesh normals only when their count matches the
/// vertex count.
Mesh parse_obj(std::string_view text);

/// Inverse of parse_obj up to float formatting; coordinates use the shortest
/// decimal that parses back to the identical double, so a round trip is exact.
std::string write_obj(const Mesh& mesh);

/// CSV with header iter,e_fit,e_rigid,e_arap,e_plane,e_total,step_rot,step_trans,rmsd.
std::string write_iteration_log(const std::vector<IterationReport>& reports);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Overlay of run settings: every field is optional so file values and
/// command-line flags can be merged over mode defaults.
struct RunConfig {
    std::optional<std::string> mode;
    std::optional<double> w1;
    std::optional<double> w2;
    std::optional<double> w3;
    std::optional<double> w4;
    std::optional<double> tikhonov;
    std::optional<int> max_iters;
    std::optional<double> stop_tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> source;
    std::optional<std::string> target;
    std::optional<std::string> output;
    std::optional<std::string> log;
};

/// Parses a flat JSON object with exactly the RunConfig key names; unknown
/// keys and wrong value types are ParseErrors.
RunConfig parse_run_config(const std::string& text);

/// Emits the fields present in cfg as a flat JSON object with sorted keys.
std::string write_run_config(const RunConfig& cfg);

/// Whole-file helpers; failures throw std::runtime_error naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

Mesh load_mesh(const std::string& path);
void save_mesh(const std::string& path, const Mesh& mesh);

}  // namespace surfreg
