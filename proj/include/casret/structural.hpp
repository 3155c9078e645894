#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "casret/element_path.hpp"
#include "casret/tokenize.hpp"
#include "casret/xml.hpp"

namespace casret {

/// Interchangeable-tag table. The default class is {sec, ss1, ss2}; tags
/// without a class map to themselves.
class EquivalenceClasses {
public:
    static EquivalenceClasses defaults() {
        EquivalenceClasses eq;
        eq.add_class({"sec", "ss1", "ss2"});
        return eq;
    }

    static EquivalenceClasses none() { return EquivalenceClasses{}; }

    /// One class per line, tags whitespace-separated; '#' lines ignored.
    static EquivalenceClasses load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open equivalence classes file " + path.string());
        EquivalenceClasses eq;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] == '#')
                continue;
            std::istringstream ls(line);
            std::vector<std::string> tags;
            std::string tag;
            while (ls >> tag)
                tags.push_back(tag);
            if (!tags.empty())
                eq.add_class(tags);
        }
        return eq;
    }

    void add_class(const std::vector<std::string>& tags) {
        if (tags.empty())
            throw std::invalid_argument("equivalence class must not be empty");
        std::size_t class_id = classes_.size();
        std::set<std::string> members(tags.begin(), tags.end());
        for (const std::string& tag : members) {
            if (tag_to_class_.count(tag))
                throw std::invalid_argument("tag \"" + tag +
                                            "\" already belongs to an equivalence class");
        }
        for (const std::string& tag : members)
            tag_to_class_.emplace(tag, class_id);
        classes_.push_back(std::move(members));
    }

    std::set<std::string> expand(const std::string& tag) const {
        auto it = tag_to_class_.find(tag);
        if (it == tag_to_class_.end())
            return {tag};
        return classes_[it->second];
    }

private:
    std::vector<std::set<std::string>> classes_;
    std::map<std::string, std::size_t> tag_to_class_;
};

/// The configured equivalence class containing `tag` (identity class when
/// the tag has none).
inline std::set<std::string> expand_equivalents(const std::string& tag,
                                                const EquivalenceClasses& classes) {
    return classes.expand(tag);
}

enum class MatchMode {
    All, // every term must occur in the element's subtree text
    Any, // at least one term must occur
};

/// Either a set of acceptable tags (after equivalence expansion) or
/// any-element mode, which extracts the most specific satisfying elements.
struct TargetScope {
    bool any_element = false;
    std::set<std::string> tags;

    static TargetScope any() { return TargetScope{true, {}}; }

    static TargetScope for_tags(std::set<std::string> accepted) {
        if (accepted.empty())
            throw std::invalid_argument("TargetScope tag set must not be empty");
        return TargetScope{false, std::move(accepted)};
    }

    static TargetScope for_target(const std::string& tag, const EquivalenceClasses& classes) {
        return for_tags(classes.expand(tag));
    }

    bool accepts(const std::string& tag) const { return any_element || tags.count(tag) > 0; }
};

struct MatchQuery {
    std::vector<std::string> terms;
    MatchMode mode = MatchMode::Any;
    TargetScope scope = TargetScope::any();
};

namespace detail {

// Per-element satisfaction of the term-containment test, keyed by node
// address. Subtree text is concatenated before tokenisation so a term
// spanning an inline child-element boundary (so<b>lar</b>) still counts for
// the parent; adjacent sibling elements keep a token boundary between them
// so block elements never fuse terms.
struct SatisfactionMap {
    std::unordered_map<const XmlNode*, bool> satisfies;
    std::unordered_map<const XmlNode*, bool> any_child_satisfies;

    static SatisfactionMap evaluate(const XmlNode& root, const std::vector<std::string>& terms,
                                    MatchMode mode) {
        std::map<std::string, std::size_t> term_index;
        for (const std::string& term : terms)
            term_index.emplace(term, term_index.size());

        SatisfactionMap result;
        walk(root, term_index, mode, result);
        return result;
    }

private:
    struct Outcome {
        std::string text;
        bool satisfies = false;
    };

    static bool mode_test(const std::vector<bool>& mask, MatchMode mode) {
        if (mode == MatchMode::Any)
            return std::find(mask.begin(), mask.end(), true) != mask.end();
        return std::find(mask.begin(), mask.end(), false) == mask.end();
    }

    static Outcome walk(const XmlNode& node, const std::map<std::string, std::size_t>& term_index,
                        MatchMode mode, SatisfactionMap& result) {
        Outcome out;
        bool any_child = false;
        bool prev_was_element = false;
        for (const XmlNode& child : node.children) {
            if (child.is_text()) {
                out.text += child.text;
                prev_was_element = false;
                continue;
            }
            Outcome child_out = walk(child, term_index, mode, result);
            if (prev_was_element)
                out.text += ' ';
            out.text += child_out.text;
            prev_was_element = true;
            any_child = any_child || child_out.satisfies;
        }
        std::vector<bool> mask(term_index.size(), false);
        for (const std::string& token : tokenize(out.text)) {
            auto it = term_index.find(token);
            if (it != term_index.end())
                mask[it->second] = true;
        }
        out.satisfies = mode_test(mask, mode);
        result.satisfies[&node] = out.satisfies;
        result.any_child_satisfies[&node] = any_child;
        return out;
    }
};

} // namespace detail

/// Elements of `doc` satisfying the query, in document order.
///
/// TargetTags scope: every element whose tag is accepted and whose subtree
/// text satisfies the mode. AnyElement scope: the most specific satisfying
/// elements — those none of whose children's subtrees individually satisfy
/// the mode. Containment is over the element's full subtree text; attribute
/// values are excluded.
inline std::vector<ElementPath> match_elements(const Document& doc, const MatchQuery& query) {
    if (query.terms.empty())
        throw std::invalid_argument("match query terms must not be empty");

    detail::SatisfactionMap sat =
        detail::SatisfactionMap::evaluate(doc.root, query.terms, query.mode);

    std::vector<ElementPath> matches;
    for_each_element(doc.root, [&](const XmlNode& node, const ElementPath& path) {
        if (!sat.satisfies.at(&node))
            return;
        if (query.scope.any_element) {
            if (!sat.any_child_satisfies.at(&node))
                matches.push_back(path);
        } else if (query.scope.accepts(node.tag)) {
            matches.push_back(path);
        }
    });
    return matches;
}

/// AND-list elements in order, then OR-list elements not already present,
/// in order; the result is duplicate-free.
inline std::vector<ElementPath> merge_and_or(const std::vector<ElementPath>& and_list,
                                             const std::vector<ElementPath>& or_list) {
    std::vector<ElementPath> merged;
    std::set<ElementPath> seen;
    for (const auto* list : {&and_list, &or_list}) {
        for (const ElementPath& path : *list) {
            if (seen.insert(path).second)
                merged.push_back(path);
        }
    }
    return merged;
}

} // namespace casret
