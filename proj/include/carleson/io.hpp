#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleson/signal.hpp"

// Table and file plumbing for the experiment runner.  Cells are stored as
// already-formatted strings: doubles go through %.17g, which round-trips
// exactly, so a re-run that produces the same doubles produces byte-identical
// files.  Writes go to a temporary in the target directory followed by a
// rename, so readers never observe partial files.

namespace carleson {

inline constexpr const char* kToolName = "carleson";
inline constexpr const char* kToolVersion = "0.1.0";

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string g17(int v) { return std::to_string(v); }

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

inline std::string to_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    os << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw std::invalid_argument("table row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << '\n';
    }
    return os.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty csv");
    t.columns = split_csv_line(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != t.columns.size())
            throw std::invalid_argument("csv row width mismatch");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

// JSON rendering of a table: numeric-looking cells become JSON numbers,
// everything else stays a string.
inline nlohmann::json table_json(const Table& t) {
    nlohmann::json j;
    j["columns"] = t.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& cell : row) {
            try {
                r.push_back(parse_double(cell));
            } catch (const std::exception&) {
                r.push_back(cell);
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os.flush()) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// 2-D signals: row-major CSV with interleaved re,im columns, one pixel per
// line, plus a JSON header file carrying the grid metadata.
inline void save_signal2d(const std::filesystem::path& stem, const SampledSignal2D& f) {
    Table t;
    t.columns = {"re", "im"};
    for (const auto& v : f.samples) t.rows.push_back({g17(v.real()), g17(v.imag())});
    nlohmann::json h;
    h["origin1"] = f.origin1;
    h["origin2"] = f.origin2;
    h["spacing1"] = f.spacing1;
    h["spacing2"] = f.spacing2;
    h["n1"] = f.n1;
    h["n2"] = f.n2;
    h["order"] = "row-major";
    atomic_write(stem.string() + ".csv", to_csv(t));
    atomic_write(stem.string() + ".header.json", h.dump(2) + "\n");
}

inline SampledSignal2D load_signal2d(const std::filesystem::path& stem) {
    const nlohmann::json h = nlohmann::json::parse(read_file(stem.string() + ".header.json"));
    SampledSignal2D f = make_signal2d(h.at("origin1").get<double>(), h.at("origin2").get<double>(),
                                      h.at("spacing1").get<double>(), h.at("spacing2").get<double>(),
                                      h.at("n1").get<std::size_t>(), h.at("n2").get<std::size_t>());
    const Table t = parse_csv(read_file(stem.string() + ".csv"));
    if (t.columns != std::vector<std::string>{"re", "im"} || t.rows.size() != f.samples.size())
        throw std::invalid_argument("2-D signal table does not match its header");
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        f.samples[i] = complexd{parse_double(t.rows[i][0]), parse_double(t.rows[i][1])};
    return f;
}

}
