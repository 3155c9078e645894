#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casret/element_path.hpp"

namespace casret {

/// One ranked answer: an element of one article, retrieved for one topic.
/// Scoreless strategies leave `score` empty.
struct RunEntry {
    int topic_id = 0;
    int rank = 0;
    std::string doc_id;
    ElementPath path;
    std::optional<double> score;

    bool operator==(const RunEntry&) const = default;
};

namespace detail {

inline constexpr const char* kRunHeader = "topic_id\trank\tdoc_id\tpath\tscore";

/// Fixed-width-free, locale-independent rendering used everywhere a score
/// or metric value lands in a file; 12 significant digits round-trip the
/// comparisons we make and keep files byte-stable across repeated runs.
inline std::string format_value(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

inline std::vector<std::string> split_tab(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

inline int parse_int_field(const std::string& text, const char* what, std::size_t line_no) {
    std::size_t consumed = 0;
    int value = 0;
    try {
        value = std::stoi(text, &consumed);
    } catch (const std::exception&) {
        consumed = std::string::npos;
    }
    if (consumed != text.size())
        throw std::runtime_error("line " + std::to_string(line_no) + ": invalid " + what + " \"" +
                                 text + "\"");
    return value;
}

} // namespace detail

/// Enforce the run invariants: per topic, ranks must read 1, 2, … in file
/// order (entries of different topics may interleave).
inline void validate_run(const std::vector<RunEntry>& entries) {
    std::map<int, int> last_rank;
    for (const RunEntry& entry : entries) {
        int expected = last_rank[entry.topic_id] + 1;
        if (entry.rank != expected)
            throw std::runtime_error("topic " + std::to_string(entry.topic_id) +
                                     ": expected rank " + std::to_string(expected) + ", found " +
                                     std::to_string(entry.rank));
        last_rank[entry.topic_id] = entry.rank;
    }
}

inline void write_run_file(std::ostream& out, const std::vector<RunEntry>& entries) {
    validate_run(entries);
    out << detail::kRunHeader << '\n';
    for (const RunEntry& entry : entries) {
        out << entry.topic_id << '\t' << entry.rank << '\t' << entry.doc_id << '\t'
            << entry.path.render() << '\t';
        if (entry.score)
            out << detail::format_value(*entry.score);
        out << '\n';
    }
}

inline void write_run_file(const std::filesystem::path& path,
                           const std::vector<RunEntry>& entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open run file for writing: " + path.string());
    write_run_file(out, entries);
    if (!out)
        throw std::runtime_error("failed writing run file: " + path.string());
}

inline std::vector<RunEntry> read_run_file(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("run file is empty (missing header)");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != detail::kRunHeader)
        throw std::runtime_error("run file header mismatch: expected \"" +
                                 std::string(detail::kRunHeader) + "\"");

    std::vector<RunEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> fields = detail::split_tab(line);
        if (fields.size() != 5)
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 5 fields, found " +
                                     std::to_string(fields.size()));
        RunEntry entry;
        entry.topic_id = detail::parse_int_field(fields[0], "topic_id", line_no);
        entry.rank = detail::parse_int_field(fields[1], "rank", line_no);
        entry.doc_id = fields[2];
        if (entry.doc_id.empty())
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty doc_id");
        try {
            entry.path = ElementPath::parse(fields[3]);
        } catch (const std::invalid_argument& err) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + err.what());
        }
        if (!fields[4].empty()) {
            std::size_t consumed = 0;
            double score = 0.0;
            try {
                score = std::stod(fields[4], &consumed);
            } catch (const std::exception&) {
                consumed = std::string::npos;
            }
            if (consumed != fields[4].size())
                throw std::runtime_error("line " + std::to_string(line_no) + ": invalid score \"" +
                                         fields[4] + "\"");
            entry.score = score;
        }
        entries.push_back(std::move(entry));
    }
    validate_run(entries);
    return entries;
}

inline std::vector<RunEntry> read_run_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open run file: " + path.string());
    try {
        return read_run_file(in);
    } catch (const std::runtime_error& err) {
        throw std::runtime_error(path.string() + ": " + err.what());
    }
}

} // namespace casret
