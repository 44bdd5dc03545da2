#include "surfreg/obj_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace surfreg {

namespace {

std::string with_line(int line, const std::string& what) {
    if (line <= 0) {
        return what;
    }
    return "line " + std::to_string(line) + ": " + what;
}

/// Splits on spaces and tabs, skipping runs of separators.
std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            tokens.push_back(line.substr(start, i - start));
        }
    }
    return tokens;
}

double parse_coord(std::string_view token, int line_no) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError(line_no, "malformed numeric field '" + std::string(token) + "'");
    }
    return value;
}

Vec3 parse_vec3(const std::vector<std::string_view>& tokens, int line_no) {
    if (tokens.size() < 4) {
        throw ParseError(line_no, "expected 3 coordinates");
    }
    return Vec3(parse_coord(tokens[1], line_no), parse_coord(tokens[2], line_no),
                parse_coord(tokens[3], line_no));
}

/// Resolves one face corner "i", "i/t", "i//n" or "i/t/n" to a 0-based vertex
/// index; negative indices count back from the vertices seen so far.
int parse_face_index(std::string_view token, std::size_t vertex_count, int line_no) {
    const std::size_t slash = token.find('/');
    const std::string_view head = token.substr(0, slash);
    int idx = 0;
    const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
    if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
        throw ParseError(line_no, "malformed face index '" + std::string(token) + "'");
    }
    const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
    if (resolved < 0 || resolved >= static_cast<long>(vertex_count)) {
        throw ParseError(line_no, "face index out of range '" + std::string(token) + "'");
    }
    return static_cast<int>(resolved);
}

}  // namespace

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error(with_line(line, what)), line_(line) {}

ParseError::ParseError(Preformatted, int line, const std::string& what)
    : std::runtime_error(what), line_(line) {}

ParseError ParseError::in_file(const std::string& path, const ParseError& inner) {
    return ParseError(Preformatted{}, inner.line(), path + ": " + inner.what());
}

Mesh parse_obj(std::string_view text) {
    Mesh mesh;
    std::vector<Vec3> normals;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            if (pos == text.size()) {
                break;
            }
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }

        const std::vector<std::string_view> tokens = tokenize(line);
        if (tokens.empty() || tokens[0][0] == '#') {
            continue;
        }
        if (tokens[0] == "v") {
            mesh.vertices.push_back(parse_vec3(tokens, line_no));
        } else if (tokens[0] == "vn") {
            normals.push_back(parse_vec3(tokens, line_no));
        } else if (tokens[0] == "f") {
            if (tokens.size() < 4) {
                throw ParseError(line_no, "face needs at least 3 vertices");
            }
            std::vector<int> corners;
            corners.reserve(tokens.size() - 1);
            for (std::size_t t = 1; t < tokens.size(); ++t) {
                corners.push_back(parse_face_index(tokens[t], mesh.vertices.size(), line_no));
            }
            for (std::size_t t = 2; t < corners.size(); ++t) {
                mesh.faces.push_back(Face{corners[0], corners[t - 1], corners[t]});
            }
        }
        // Every other line type (vt, o, g, s, usemtl, ...) is skipped.
    }

    if (normals.size() == mesh.vertices.size()) {
        mesh.normals = std::move(normals);
    }
    return mesh;
}

std::string format_double(double value) {
    std::array<char, 32> buf;
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string write_obj(const Mesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices.size() * 24 + mesh.faces.size() * 12);
    for (const Vec3& v : mesh.vertices) {
        out += "v ";
        out += format_double(v.x());
        out += ' ';
        out += format_double(v.y());
        out += ' ';
        out += format_double(v.z());
        out += '\n';
    }
    if (mesh.has_normals()) {
        for (const Vec3& n : mesh.normals) {
            out += "vn ";
            out += format_double(n.x());
            out += ' ';
            out += format_double(n.y());
            out += ' ';
            out += format_double(n.z());
            out += '\n';
        }
    }
    for (const Face& f : mesh.faces) {
        out += "f ";
        out += std::to_string(f[0] + 1);
        out += ' ';
        out += std::to_string(f[1] + 1);
        out += ' ';
        out += std::to_string(f[2] + 1);
        out += '\n';
    }
    return out;
}

std::string write_iteration_log(const std::vector<IterationReport>& reports) {
    std::string out = "iter,e_fit,e_rigid,e_arap,e_plane,e_total,step_rot,step_trans,rmsd\n";
    for (const IterationReport& r : reports) {
        out += std::to_string(r.iter);
        for (double v : {r.energies.e_fit, r.energies.e_rigid, r.energies.e_arap,
                         r.energies.e_plane, r.energies.e_total, r.step_rot_norm,
                         r.step_trans_norm, r.rmsd_to_projection}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

RunConfig parse_run_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParseError(0, "config must be a JSON object");
    }

    RunConfig cfg;
    auto number = [&](const char* key, std::optional<double>& slot) {
        if (!j.contains(key)) {
            return;
        }
        if (!j[key].is_number()) {
            throw ParseError(0, std::string("config key '") + key + "' must be a number");
        }
        slot = j[key].get<double>();
    };
    auto string_field = [&](const char* key, std::optional<std::string>& slot) {
        if (!j.contains(key)) {
            return;
        }
        if (!j[key].is_string()) {
            throw ParseError(0, std::string("config key '") + key + "' must be a string");
        }
        slot = j[key].get<std::string>();
    };

    string_field("mode", cfg.mode);
    if (cfg.mode && *cfg.mode != "rigid" && *cfg.mode != "arap") {
        throw ParseError(0, "config key 'mode' must be \"rigid\" or \"arap\"");
    }
    number("w1", cfg.w1);
    number("w2", cfg.w2);
    number("w3", cfg.w3);
    number("w4", cfg.w4);
    number("tikhonov", cfg.tikhonov);
    if (j.contains("max_iters")) {
        if (!j["max_iters"].is_number_integer()) {
            throw ParseError(0, "config key 'max_iters' must be an integer");
        }
        cfg.max_iters = j["max_iters"].get<int>();
    }
    number("stop_tol", cfg.stop_tol);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) {
            throw ParseError(0, "config key 'seed' must be an integer");
        }
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    string_field("source", cfg.source);
    string_field("target", cfg.target);
    string_field("output", cfg.output);
    string_field("log", cfg.log);

    static const char* known[] = {"mode",      "w1",       "w2",   "w3",     "w4",
                                  "tikhonov",  "max_iters", "stop_tol", "seed", "source",
                                  "target",    "output",   "log"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ParseError(0, "unknown config key '" + key + "'");
        }
    }
    return cfg;
}

std::string write_run_config(const RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    if (cfg.mode) j["mode"] = *cfg.mode;
    if (cfg.w1) j["w1"] = *cfg.w1;
    if (cfg.w2) j["w2"] = *cfg.w2;
    if (cfg.w3) j["w3"] = *cfg.w3;
    if (cfg.w4) j["w4"] = *cfg.w4;
    if (cfg.tikhonov) j["tikhonov"] = *cfg.tikhonov;
    if (cfg.max_iters) j["max_iters"] = *cfg.max_iters;
    if (cfg.stop_tol) j["stop_tol"] = *cfg.stop_tol;
    if (cfg.seed) j["seed"] = *cfg.seed;
    if (cfg.source) j["source"] = *cfg.source;
    if (cfg.target) j["target"] = *cfg.target;
    if (cfg.output) j["output"] = *cfg.output;
    if (cfg.log) j["log"] = *cfg.log;
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw std::runtime_error("read failed for " + path);
    }
    return std::move(buffer).str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

Mesh load_mesh(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return parse_obj(text);
    } catch (const ParseError& e) {
        throw ParseError::in_file(path, e);
    }
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    write_text_file(path, write_obj(mesh));
}

}  // namespace surfreg
