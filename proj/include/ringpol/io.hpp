#pragma once

// Serialization: CSV emit/parse for the series produced by the engine, the
// KEY=VALUE run-configuration format, FNV-1a checksums, and the JSON run
// manifest that makes every invocation replayable.
//
// All floating-point output goes through std::to_chars (shortest round-trip
// form), so identical runs produce byte-identical files.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "engine.hpp"
#include "spectral.hpp"
#include "tomography.hpp"

namespace ringpol {

inline const char* kVersion = "0.1.0";

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    return v;
}

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[std::size_t(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline const double kDefaultNsPerTrip = 6.80;  // measured round-trip interval

/// Decay-series table; optionally appends a wall-clock column (ns) at a fixed
/// interval per round trip.
inline std::string decay_csv(const EvolutionResult& ev, bool time_column = false,
                             double ns_per_trip = kDefaultNsPerTrip) {
    std::string out = "n,purity,fidelity,px,py,pz,method,layout,theta,sigma_phi,phi0";
    if (time_column) out += ",t_ns";
    out += '\n';
    const std::string tail = "," + ev.method + "," + layout_name(ev.cavity.layout) + "," +
                             format_double(ev.cavity.theta.theta) + "," +
                             format_double(ev.dist.sigma_phi) + "," + format_double(ev.dist.phi0);
    for (const auto& r : ev.records) {
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.purity);
        out += ',';
        out += format_double(r.fidelity);
        out += ',';
        out += format_double(r.bloch.x);
        out += ',';
        out += format_double(r.bloch.y);
        out += ',';
        out += format_double(r.bloch.z);
        out += tail;
        if (time_column) {
            out += ',';
            out += format_double(r.n * ns_per_trip);
        }
        out += '\n';
    }
    return out;
}

struct ParsedDecaySeries {
    std::vector<DecayRecord> records;
    std::string method;
    std::string layout;
    double theta = 0.0;
    double sigma_phi = 0.0;
    double phi0 = 0.0;
};

namespace detail {
inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

inline std::vector<std::string_view> csv_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        std::string_view line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        start = pos + 1;
    }
    return lines;
}
}  // namespace detail

inline ParsedDecaySeries parse_decay_csv(std::string_view text) {
    auto lines = detail::csv_lines(text);
    if (lines.empty()) throw std::invalid_argument("empty decay CSV");
    auto header = detail::split_csv_line(lines[0]);
    const char* expect[] = {"n",      "purity", "fidelity", "px",        "py",  "pz",
                            "method", "layout", "theta",    "sigma_phi", "phi0"};
    if (header.size() < 11)
        throw std::invalid_argument("decay CSV header has too few columns");
    for (int i = 0; i < 11; ++i)
        if (header[std::size_t(i)] != expect[i])
            throw std::invalid_argument("unexpected decay CSV column '" +
                                        std::string(header[std::size_t(i)]) + "'");
    ParsedDecaySeries out;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        auto cells = detail::split_csv_line(lines[li]);
        if (cells.size() < 11) throw std::invalid_argument("short decay CSV row");
        DecayRecord r;
        r.n = int(parse_int(cells[0]));
        r.purity = parse_double(cells[1]);
        r.fidelity = parse_double(cells[2]);
        r.bloch = {parse_double(cells[3]), parse_double(cells[4]), parse_double(cells[5])};
        out.records.push_back(r);
        if (li == 1) {
            out.method = std::string(cells[6]);
            out.layout = std::string(cells[7]);
            out.theta = parse_double(cells[8]);
            out.sigma_phi = parse_double(cells[9]);
            out.phi0 = parse_double(cells[10]);
        }
    }
    return out;
}

struct CountRecord {
    int n_trip = 0;
    Counts counts{};
};

inline std::string counts_csv(const std::vector<CountRecord>& rows) {
    std::string out = "n_trip,H,V,D,A,R,L\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n_trip);
        for (double c : row.counts) {
            out += ',';
            out += format_double(c);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<CountRecord> parse_counts_csv(std::string_view text) {
    auto lines = detail::csv_lines(text);
    if (lines.empty()) throw std::invalid_argument("empty counts CSV");
    if (lines[0] != "n_trip,H,V,D,A,R,L")
        throw std::invalid_argument("counts CSV must start with header n_trip,H,V,D,A,R,L");
    std::vector<CountRecord> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        auto cells = detail::split_csv_line(lines[li]);
        if (cells.size() != 7) throw std::invalid_argument("counts CSV row needs 7 cells");
        CountRecord row;
        row.n_trip = int(parse_int(cells[0]));
        for (int k = 0; k < 6; ++k) row.counts[std::size_t(k)] = parse_double(cells[std::size_t(k) + 1]);
        rows.push_back(row);
    }
    return rows;
}

/// Closed-form prediction table: scalar factors plus the full 3x3 Bloch map.
inline std::string analytic_csv(const std::vector<AnalyticRecord>& rows, const Vec3& input) {
    std::string out =
        "n,D_n,gamma_n,purity,fidelity,v11,v12,v13,v21,v22,v23,v31,v32,v33\n";
    for (const auto& r : rows) {
        Vec3 p = r.v.apply(input);
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.d);
        out += ',';
        out += format_double(r.gamma);
        out += ',';
        out += format_double(0.5 * (1.0 + p.dot(p)));
        out += ',';
        out += format_double(0.5 * (1.0 + input.dot(p)));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                out += ',';
                out += format_double(r.v.m[std::size_t(i)][std::size_t(j)]);
            }
        out += '\n';
    }
    return out;
}

/// JSON rendering of a decay series (same content as decay_csv).
inline std::string decay_json(const EvolutionResult& ev, bool time_column = false,
                              double ns_per_trip = kDefaultNsPerTrip) {
    nlohmann::json j;
    j["method"] = ev.method;
    j["layout"] = layout_name(ev.cavity.layout);
    j["theta"] = ev.cavity.theta.theta;
    j["sigma_phi"] = ev.dist.sigma_phi;
    j["phi0"] = ev.dist.phi0;
    j["records"] = nlohmann::json::array();
    for (const auto& r : ev.records) {
        nlohmann::json rec{{"n", r.n},          {"purity", r.purity}, {"fidelity", r.fidelity},
                           {"px", r.bloch.x},   {"py", r.bloch.y},    {"pz", r.bloch.z}};
        if (time_column) rec["t_ns"] = r.n * ns_per_trip;
        j["records"].push_back(rec);
    }
    return j.dump(2) + "\n";
}

/// JSON rendering of the closed-form prediction table.
inline std::string analytic_json(const std::vector<AnalyticRecord>& rows, const Vec3& input) {
    nlohmann::json j;
    j["records"] = nlohmann::json::array();
    for (const auto& r : rows) {
        Vec3 p = r.v.apply(input);
        nlohmann::json rec{{"n", r.n},
                           {"D_n", r.d},
                           {"gamma_n", r.gamma},
                           {"purity", 0.5 * (1.0 + p.dot(p))},
                           {"fidelity", 0.5 * (1.0 + input.dot(p))}};
        nlohmann::json v = nlohmann::json::array();
        for (int i = 0; i < 3; ++i)
            for (int jj = 0; jj < 3; ++jj) v.push_back(r.v.m[std::size_t(i)][std::size_t(jj)]);
        rec["v"] = v;
        j["records"].push_back(rec);
    }
    return j.dump(2) + "\n";
}

/// One reconstructed state per count row.
struct ReconRecord {
    int n_trip = 0;
    Vec3 bloch{};
    double purity = 1.0;
};

inline std::string recon_csv(const std::vector<ReconRecord>& rows, const std::string& method) {
    std::string out = "n_trip,px,py,pz,purity,method\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n_trip);
        out += ',';
        out += format_double(r.bloch.x);
        out += ',';
        out += format_double(r.bloch.y);
        out += ',';
        out += format_double(r.bloch.z);
        out += ',';
        out += format_double(r.purity);
        out += ',';
        out += method;
        out += '\n';
    }
    return out;
}

inline std::string recon_json(const std::vector<ReconRecord>& rows, const std::string& method) {
    nlohmann::json j;
    j["method"] = method;
    j["records"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["records"].push_back({{"n_trip", r.n_trip},
                                {"px", r.bloch.x},
                                {"py", r.bloch.y},
                                {"pz", r.bloch.z},
                                {"purity", r.purity}});
    return j.dump(2) + "\n";
}

inline std::string spectral_csv(const SpectralAmplitudes& amps) {
    std::string out = "omega,re_h,im_h,re_v,im_v\n";
    for (std::size_t i = 0; i < amps.omega.size(); ++i) {
        out += format_double(amps.omega[i]);
        out += ',';
        out += format_double(amps.alpha_h[i].real());
        out += ',';
        out += format_double(amps.alpha_h[i].imag());
        out += ',';
        out += format_double(amps.alpha_v[i].real());
        out += ',';
        out += format_double(amps.alpha_v[i].imag());
        out += '\n';
    }
    return out;
}

inline SpectralAmplitudes parse_spectral_csv(std::string_view text) {
    auto lines = detail::csv_lines(text);
    if (lines.empty()) throw std::invalid_argument("empty spectral CSV");
    if (lines[0] != "omega,re_h,im_h,re_v,im_v")
        throw std::invalid_argument("spectral CSV must start with header omega,re_h,im_h,re_v,im_v");
    SpectralAmplitudes amps;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        auto cells = detail::split_csv_line(lines[li]);
        if (cells.size() != 5) throw std::invalid_argument("spectral CSV row needs 5 cells");
        amps.omega.push_back(parse_double(cells[0]));
        amps.alpha_h.emplace_back(parse_double(cells[1]), parse_double(cells[2]));
        amps.alpha_v.emplace_back(parse_double(cells[3]), parse_double(cells[4]));
    }
    return amps;
}

// ---------------------------------------------------------------------------
// Run configuration (KEY=VALUE lines, '#' comments)

struct ConfigMap {
    std::map<std::string, std::string> kv;

    static ConfigMap parse(std::string_view text) {
        ConfigMap cfg;
        std::size_t start = 0;
        int line_no = 0;
        while (start <= text.size()) {
            std::size_t pos = text.find('\n', start);
            if (pos == std::string_view::npos) pos = text.size();
            std::string_view line = text.substr(start, pos - start);
            start = pos + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            std::size_t h = line.find('#');
            if (h != std::string_view::npos) line = line.substr(0, h);
            while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
            while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
            if (line.empty()) {
                if (pos == text.size()) break;
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": expected KEY=VALUE");
            std::string_view key = line.substr(0, eq);
            std::string_view val = line.substr(eq + 1);
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
            while (!val.empty() && (val.front() == ' ' || val.front() == '\t')) val.remove_prefix(1);
            if (key.empty())
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
            if (!cfg.kv.emplace(std::string(key), std::string(val)).second)
                throw std::invalid_argument("duplicate config key '" + std::string(key) + "'");
            if (pos == text.size()) break;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }
    std::string require(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("missing config key '" + key + "'");
        return it->second;
    }
    double get_double(const std::string& key, double fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : parse_double(it->second);
    }
    long long get_int(const std::string& key, long long fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : parse_int(it->second);
    }
    bool get_bool(const std::string& key, bool fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
        if (it->second == "false" || it->second == "0" || it->second == "no") return false;
        throw std::invalid_argument("config key '" + key + "' is not a boolean: '" + it->second + "'");
    }

    /// Reject typos: every present key must be in the allowed set.
    void ensure_known(const std::vector<std::string>& allowed) const {
        for (const auto& [key, value] : kv) {
            bool ok = false;
            for (const auto& a : allowed)
                if (key == a) { ok = true; break; }
            if (!ok) throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
};

// ---------------------------------------------------------------------------
// Run manifest (JSON)

struct OutputRecord {
    std::string path;      // relative to the manifest's directory
    std::uint64_t bytes = 0;
    std::string fnv1a64;   // 16 hex digits
};

struct RunManifest {
    std::string command;                       // subcommand that produced the run
    std::string figure;                        // optional preset association
    std::map<std::string, std::string> config; // fully resolved configuration
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::vector<OutputRecord> outputs;
};

inline std::string manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = "ringpol";
    j["version"] = kVersion;
    j["command"] = m.command;
    if (!m.figure.empty()) j["figure"] = m.figure;
    j["config"] = m.config;
    j["seed"] = m.seed;
    j["wall_ms"] = m.wall_ms;
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : m.outputs)
        j["outputs"].push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a64}});
    return j.dump(2) + "\n";
}

inline RunManifest manifest_from_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RunManifest m;
    m.command = j.value("command", "");
    m.figure = j.value("figure", "");
    if (j.contains("config"))
        for (auto it = j["config"].begin(); it != j["config"].end(); ++it)
            m.config[it.key()] = it.value().get<std::string>();
    m.seed = j.value("seed", std::uint64_t{0});
    m.wall_ms = j.value("wall_ms", 0.0);
    if (j.contains("outputs"))
        for (const auto& o : j["outputs"])
            m.outputs.push_back({o.value("path", ""), o.value("bytes", std::uint64_t{0}),
                                 o.value("fnv1a64", "")});
    return m;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace ringpol
