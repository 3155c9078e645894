#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "casret/element_path.hpp"
#include "casret/structural.hpp"

namespace casret {

struct CreOptions {
    // Heuristic 2 default prefers the shorter (less specific) path; setting
    // this flips the comparison to prefer deeper elements.
    bool prefer_deeper = false;
};

struct RankedCre {
    int rank = 0;
    ElementPath path;

    bool operator==(const RankedCre&) const = default;
};

struct CreResult {
    std::vector<RankedCre> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

namespace detail {

inline void validate_cre_input(const std::vector<ElementPath>& matching_paths) {
    if (matching_paths.empty())
        throw std::invalid_argument("coherent-element identification requires at least one path");
    for (const ElementPath& path : matching_paths) {
        if (path.steps.empty())
            throw std::invalid_argument("coherent-element identification given an empty path");
        if (path.steps.front() != matching_paths.front().steps.front())
            throw std::invalid_argument(
                "coherent-element identification given paths from different articles: " +
                matching_paths.front().render() + " vs " + path.render());
    }
    std::set<ElementPath> unique(matching_paths.begin(), matching_paths.end());
    if (unique.size() != matching_paths.size())
        throw std::invalid_argument("coherent-element identification given duplicate paths");
}

} // namespace detail

/// Identify the coherent elements of one article's matching-path list.
///
/// Built as a prefix tree of the paths: a proper prefix is coherent iff at
/// least two distinct steps follow it somewhere in the list, i.e. its node
/// branches. Each branch subtree ends in at least one matching path by
/// construction, so branching alone establishes that the element gathers
/// two or more matches (or nested coherent elements) under distinct
/// children. A single-path input returns that path itself.
inline std::set<ElementPath> identify_cres(const std::vector<ElementPath>& matching_paths) {
    detail::validate_cre_input(matching_paths);

    if (matching_paths.size() == 1)
        return {matching_paths.front()};

    std::map<ElementPath, std::set<PathStep>> children;
    for (const ElementPath& path : matching_paths) {
        ElementPath prefix;
        for (std::size_t depth = 0; depth + 1 < path.steps.size(); ++depth) {
            prefix.steps.push_back(path.steps[depth]);
            children[prefix].insert(path.steps[depth + 1]);
        }
    }

    std::set<ElementPath> cres;
    for (const auto& [prefix, next_steps] : children) {
        if (next_steps.size() >= 2)
            cres.insert(prefix);
    }
    return cres;
}

/// Number of matching paths the candidate properly contains; a candidate
/// that contains none but is itself one of the matching paths counts as 1
/// (the single-match case).
inline int cre_match_count(const ElementPath& candidate,
                           const std::vector<ElementPath>& matching_paths) {
    int count = 0;
    bool is_match = false;
    for (const ElementPath& path : matching_paths) {
        if (is_proper_ancestor(candidate, path))
            ++count;
        if (path == candidate)
            is_match = true;
    }
    if (count == 0 && is_match)
        return 1;
    return count;
}

/// Rank coherent elements: drop candidates whose final tag is outside the
/// target scope, then order by match count (descending), path depth
/// (ascending, or descending under prefer_deeper), and finally the paths'
/// canonical order, which coincides with document order for the same-tag
/// siblings the tie realistically involves. Ranks are contiguous from 1.
inline CreResult rank_cres(const std::set<ElementPath>& cres,
                           const std::vector<ElementPath>& matching_paths,
                           const TargetScope& scope, const CreOptions& options = {}) {
    struct Candidate {
        ElementPath path;
        int match_count;
        std::size_t depth;
    };

    std::vector<Candidate> candidates;
    for (const ElementPath& path : cres) {
        if (!scope.accepts(path.steps.back().tag))
            continue;
        candidates.push_back({path, cre_match_count(path, matching_paths), path.depth()});
    }

    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) {
                  if (a.match_count != b.match_count)
                      return a.match_count > b.match_count;
                  if (a.depth != b.depth)
                      return options.prefer_deeper ? a.depth > b.depth : a.depth < b.depth;
                  return a.path < b.path;
              });

    CreResult result;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        result.entries.push_back({static_cast<int>(i) + 1, std::move(candidates[i].path)});
    return result;
}

/// Convenience wrapper: identify then rank in one call.
inline CreResult coherent_elements(const std::vector<ElementPath>& matching_paths,
                                   const TargetScope& scope, const CreOptions& options = {}) {
    return rank_cres(identify_cres(matching_paths), matching_paths, scope, options);
}

/// Standalone post-processor for externally produced article-ordered match
/// lists. Reads newline-delimited "doc_id TAB path" records in which each
/// article's records are contiguous; writes "doc_id TAB rank TAB path"
/// records holding each article's ranked coherent elements. Blank lines and
/// `#` comment lines are skipped; duplicate paths within an article are
/// collapsed to their first occurrence. Returns the number of records
/// written.
inline std::size_t cre_filter_stream(std::istream& in, std::ostream& out,
                                     const TargetScope& scope, const CreOptions& options = {}) {
    std::size_t written = 0;
    std::set<std::string> finished_articles;
    std::string current_doc;
    std::vector<ElementPath> current_paths;
    std::set<ElementPath> current_seen;

    auto flush = [&] {
        if (current_paths.empty())
            return;
        CreResult ranked = rank_cres(identify_cres(current_paths), current_paths, scope, options);
        for (const RankedCre& entry : ranked.entries) {
            out << current_doc << '\t' << entry.rank << '\t' << entry.path.render() << '\n';
            ++written;
        }
        current_paths.clear();
        current_seen.clear();
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;

        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected \"doc_id<TAB>path\"");
        std::string doc_id = line.substr(0, tab);
        std::string path_text = line.substr(tab + 1);

        if (doc_id != current_doc) {
            flush();
            if (!finished_articles.insert(doc_id).second)
                throw std::runtime_error("line " + std::to_string(line_no) + ": records for \"" +
                                         doc_id + "\" are not contiguous");
            current_doc = doc_id;
        }

        ElementPath path;
        try {
            path = ElementPath::parse(path_text);
        } catch (const std::invalid_argument& err) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + err.what());
        }
        if (current_seen.insert(path).second)
            current_paths.push_back(std::move(path));
    }
    flush();
    return written;
}

} // namespace casret
