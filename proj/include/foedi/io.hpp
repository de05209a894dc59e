#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "foedi/error.hpp"
#include "foedi/graph.hpp"

namespace foedi::io {

// Shortest form is not needed; 17 significant digits round-trips every double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Writes through a sibling temp file and renames over the target.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::io_error, "cannot open " + tmp.string() + " for writing");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw Error(ErrorCode::io_error, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::io_error, "rename to " + path.string() + " failed: " + ec.message());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Minimal CSV builder: header row, comma separator, '\n' line endings.
// Fields produced by this project never contain separators or quotes.
class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) { row(header); }

    CsvWriter& cell(const std::string& s) {
        sep();
        out_ += s;
        return *this;
    }
    CsvWriter& cell(double x) { return cell(format_double(x)); }
    CsvWriter& cell(int x) { return cell(std::to_string(x)); }
    CsvWriter& cell(long long x) { return cell(std::to_string(x)); }
    CsvWriter& cell(std::size_t x) { return cell(std::to_string(x)); }
    CsvWriter& cell(bool b) { return cell(std::string(b ? "1" : "0")); }
    CsvWriter& cell(const char* s) { return cell(std::string(s)); }

    void end_row() {
        if (filled_ != columns_) {
            throw Error(ErrorCode::invalid_argument, "csv row has " + std::to_string(filled_) + " cells, expected " +
                                                         std::to_string(columns_));
        }
        out_ += '\n';
        filled_ = 0;
    }

    const std::string& str() const { return out_; }

private:
    void row(const std::vector<std::string>& cells) {
        for (const auto& c : cells) cell(c);
        end_row();
    }
    void sep() {
        if (filled_ > 0) out_ += ',';
        ++filled_;
    }

    std::size_t columns_;
    std::size_t filled_ = 0;
    std::string out_;
};

// Edge-list text: one "i j" pair per line, 0-indexed, '#' starts a comment
// line. A "# nodes N" comment fixes the node count (otherwise max index + 1),
// which keeps isolated trailing nodes across a round trip.
inline Graph parse_edge_list(std::string_view text) {
    std::vector<Edge> pairs;
    long long declared = -1;
    long long max_index = -1;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            std::istringstream c(line.substr(first + 1));
            std::string key;
            long long value = 0;
            if (c >> key && key == "nodes" && c >> value) declared = value;
            continue;
        }
        std::istringstream fields(line);
        long long a = 0;
        long long b = 0;
        if (!(fields >> a >> b)) {
            throw Error(ErrorCode::io_error, "edge list line " + std::to_string(line_no) + ": expected 'i j'");
        }
        if (a < 0 || b < 0 || a > 100'000'000 || b > 100'000'000) {
            throw Error(ErrorCode::invalid_node, "edge list line " + std::to_string(line_no) + ": index out of range");
        }
        max_index = std::max({max_index, a, b});
        pairs.push_back({static_cast<int>(a), static_cast<int>(b)});
    }
    const long long n = declared >= 0 ? declared : max_index + 1;
    return Graph(static_cast<int>(n), pairs);
}

inline Graph read_edge_list(const std::filesystem::path& path) { return parse_edge_list(read_file(path)); }

inline std::string format_edge_list(const Graph& g) {
    std::string out = "# nodes " + std::to_string(g.node_count()) + "\n";
    for (const Edge& e : g.edges()) {
        out += std::to_string(e.i);
        out += ' ';
        out += std::to_string(e.j);
        out += '\n';
    }
    return out;
}

}  // namespace foedi::io
