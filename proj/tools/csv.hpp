#ifndef TREELIKE_TOOLS_CSV_HPP
#define TREELIKE_TOOLS_CSV_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treelike::tools {

/// Decimal text with 12 significant digits; "nan" for missing values.
inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_cell(double v) { return format_number(v); }
inline std::string format_cell(int v) { return std::to_string(v); }
inline std::string format_cell(long v) { return std::to_string(v); }
inline std::string format_cell(long long v) { return std::to_string(v); }
inline std::string format_cell(unsigned v) { return std::to_string(v); }
inline std::string format_cell(unsigned long v) { return std::to_string(v); }
inline std::string format_cell(unsigned long long v) { return std::to_string(v); }
inline std::string format_cell(bool v) { return v ? "true" : "false"; }
inline std::string format_cell(const std::string& v) { return v; }
inline std::string format_cell(const char* v) { return v; }

/// Ordered key=value pairs written as the first line of every output file.
class Provenance {
public:
    void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string header() const
    {
        std::string line = "#";
        for (const auto& [k, v] : entries_) line += " " + k + "=" + v;
        return line;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses key=value text.  Tokens are separated by whitespace; a line
/// starting with '#' is read only when every token on it is key=value, so a
/// provenance header is valid configuration and prose comments are skipped.
inline std::map<std::string, std::string> parse_key_values(const std::string& text)
{
    std::map<std::string, std::string> out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        bool comment = false;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            comment = true;
            line = line.substr(first + 1);
        }
        std::istringstream tokens(line);
        std::vector<std::pair<std::string, std::string>> found;
        std::string tok;
        bool all_pairs = true;
        while (tokens >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0) {
                all_pairs = false;
                break;
            }
            found.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
        if (!all_pairs) {
            if (comment) continue;
            throw std::invalid_argument("config: expected key=value, got '" + tok + "'");
        }
        for (auto& [k, v] : found) out[k] = v;
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const Provenance& prov, const std::vector<std::string>& columns) : path_(path)
    {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << prov.header() << '\n';
        for (std::size_t c = 0; c < columns.size(); ++c) out_ << (c ? "," : "") << columns[c];
        out_ << '\n';
    }

    template <typename... Cells>
    void row(const Cells&... cells)
    {
        std::size_t c = 0;
        ((out_ << (c++ ? "," : "") << format_cell(cells)), ...);
        out_ << '\n';
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// A CSV file read back: provenance pairs, column names, rows of cells.
struct CsvTable {
    std::map<std::string, std::string> provenance;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c] == name) return c;
        }
        throw std::invalid_argument("csv: missing column " + name);
    }
};

inline CsvTable read_csv(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            for (auto& [k, v] : parse_key_values(line)) t.provenance[k] = v;
            continue;
        }
        if (t.columns.empty()) t.columns = split(line);
        else t.rows.push_back(split(line));
    }
    if (t.columns.empty()) throw std::invalid_argument("csv: no header row in " + path.string());
    return t;
}

}  // namespace treelike::tools

#endif
