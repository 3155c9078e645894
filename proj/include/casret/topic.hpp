#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "casret/tokenize.hpp"
#include "casret/xml.hpp"

namespace casret {

/// Raised when a topic title uses a construct outside the supported
/// grammar. The message names the offending construct; nothing is guessed.
class UnsupportedQueryError : public std::runtime_error {
public:
    explicit UnsupportedQueryError(const std::string& construct)
        : std::runtime_error("unsupported query construct: " + construct) {}
};

/// A content-and-structure topic as read from an INEX-style topic file.
struct CasTopic {
    int topic_id = 0;
    std::string title_expr;
    std::string description;
    std::string narrative;
    std::vector<std::string> keywords;
};

enum class Axis {
    descendant, // "//tag"
    child,      // "/tag"
};

struct QueryStep {
    Axis axis = Axis::descendant;
    std::string tag;

    bool operator==(const QueryStep&) const = default;
};

/// Parsed title expression: the target path plus the about-clause terms.
/// The final step carries the granularity constraint.
struct StructuredQuery {
    std::vector<QueryStep> target_steps;
    std::vector<std::string> about_terms;

    const std::string& target_tag() const { return target_steps.back().tag; }
};

enum class TopicCategory {
    Article,  // final target tag is "article": whole-article answers
    Specific, // anything else: sub-article answers
};

inline std::string_view to_string(TopicCategory category) {
    return category == TopicCategory::Article ? "Article" : "Specific";
}

namespace detail {

inline const XmlNode* find_child_element(const XmlNode& node, std::string_view tag) {
    for (const XmlNode& child : node.children) {
        if (child.is_element() && child.tag == tag)
            return &child;
    }
    return nullptr;
}

inline std::string trim(std::string_view s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos)
        return {};
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

} // namespace detail

/// Parses one topic file. The title element is mandatory; description,
/// narrative and keywords default to empty.
inline CasTopic parse_topic(std::string_view topic_xml, const XmlParseOptions& options = {}) {
    Document doc = parse_document(topic_xml, "topic", options);
    if (doc.root.tag != "inex_topic")
        throw std::runtime_error("topic root element must be <inex_topic>, got <" + doc.root.tag +
                                 ">");
    CasTopic topic;
    const std::string* id_attr = doc.root.attribute("topic_id");
    if (!id_attr)
        throw std::runtime_error("topic is missing the topic_id attribute");
    try {
        std::size_t used = 0;
        topic.topic_id = std::stoi(*id_attr, &used);
        if (used != id_attr->size())
            throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw std::runtime_error("topic_id is not an integer: \"" + *id_attr + "\"");
    }
    if (topic.topic_id <= 0)
        throw std::runtime_error("topic_id must be positive");

    const XmlNode* title = detail::find_child_element(doc.root, "title");
    if (!title)
        throw std::runtime_error("topic " + std::to_string(topic.topic_id) +
                                 " is missing the <title> element");
    topic.title_expr = extract_text(*title);
    if (topic.title_expr.empty())
        throw std::runtime_error("topic " + std::to_string(topic.topic_id) +
                                 " has an empty <title>");

    if (const XmlNode* d = detail::find_child_element(doc.root, "description"))
        topic.description = extract_text(*d);
    if (const XmlNode* n = detail::find_child_element(doc.root, "narrative"))
        topic.narrative = extract_text(*n);
    if (const XmlNode* k = detail::find_child_element(doc.root, "keywords")) {
        std::string joined = extract_text(*k);
        std::size_t start = 0;
        while (start <= joined.size()) {
            std::size_t comma = joined.find(',', start);
            std::string part = detail::trim(std::string_view(joined).substr(
                start, comma == std::string::npos ? std::string::npos : comma - start));
            if (!part.empty())
                topic.keywords.push_back(part);
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
    }
    return topic;
}

/// Parses a title expression of the supported grammar: a path of "//tag" or
/// "/tag" steps with exactly one about(., '...') predicate on the final
/// step. Everything else raises UnsupportedQueryError naming the construct.
inline StructuredQuery parse_title(std::string_view title_expr) {
    StructuredQuery query;
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < title_expr.size() &&
               (title_expr[pos] == ' ' || title_expr[pos] == '\t' || title_expr[pos] == '\r' ||
                title_expr[pos] == '\n'))
            ++pos;
    };
    auto is_name_start = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto is_name_char = [&](char c) {
        return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
    };

    skip_space();
    if (pos >= title_expr.size() || title_expr[pos] != '/')
        throw UnsupportedQueryError("title must start with '/' or '//'");

    bool saw_predicate = false;
    while (pos < title_expr.size()) {
        skip_space();
        if (pos >= title_expr.size())
            break;
        char c = title_expr[pos];
        if (c == '/') {
            if (saw_predicate)
                throw UnsupportedQueryError("path step after a predicate (about must be on the "
                                            "final step)");
            Axis axis = Axis::child;
            ++pos;
            if (pos < title_expr.size() && title_expr[pos] == '/') {
                axis = Axis::descendant;
                ++pos;
            }
            if (pos < title_expr.size() && title_expr[pos] == '@')
                throw UnsupportedQueryError("attribute test \"@\"");
            if (pos < title_expr.size() && title_expr[pos] == '*')
                throw UnsupportedQueryError("wildcard step \"*\"");
            if (pos >= title_expr.size() || !is_name_start(title_expr[pos]))
                throw UnsupportedQueryError("missing tag name after '" +
                                            std::string(axis == Axis::descendant ? "//" : "/") +
                                            "'");
            std::size_t start = pos;
            while (pos < title_expr.size() && is_name_char(title_expr[pos]))
                ++pos;
            query.target_steps.push_back(
                {axis, std::string(title_expr.substr(start, pos - start))});
        } else if (c == '[') {
            if (query.target_steps.empty())
                throw UnsupportedQueryError("predicate before any path step");
            if (saw_predicate)
                throw UnsupportedQueryError("multiple predicates");
            ++pos;
            skip_space();
            if (title_expr.substr(pos, 5) != "about")
                throw UnsupportedQueryError("predicate is not an about(...) clause");
            pos += 5;
            skip_space();
            if (pos >= title_expr.size() || title_expr[pos] != '(')
                throw UnsupportedQueryError("about without argument list");
            ++pos;
            skip_space();
            if (pos >= title_expr.size() || title_expr[pos] != '.')
                throw UnsupportedQueryError("about path other than \".\"");
            ++pos;
            if (pos < title_expr.size() &&
                (title_expr[pos] == '/' || title_expr[pos] == '.' ||
                 is_name_start(title_expr[pos])))
                throw UnsupportedQueryError("about path other than \".\"");
            skip_space();
            if (pos >= title_expr.size() || title_expr[pos] != ',')
                throw UnsupportedQueryError("about without a term string");
            ++pos;
            skip_space();
            if (pos >= title_expr.size() || title_expr[pos] != '\'')
                throw UnsupportedQueryError(pos < title_expr.size() && title_expr[pos] == '"'
                                                ? "double-quoted about string"
                                                : "about terms must be a single-quoted string");
            ++pos;
            std::size_t end_quote = title_expr.find('\'', pos);
            if (end_quote == std::string_view::npos)
                throw UnsupportedQueryError("unterminated about string");
            query.about_terms = tokenize(title_expr.substr(pos, end_quote - pos));
            pos = end_quote + 1;
            skip_space();
            if (pos >= title_expr.size() || title_expr[pos] != ')')
                throw UnsupportedQueryError("unterminated about(...) clause");
            ++pos;
            skip_space();
            if (pos >= title_expr.size() || title_expr[pos] != ']')
                throw UnsupportedQueryError("unterminated predicate");
            ++pos;
            saw_predicate = true;
        } else {
            throw UnsupportedQueryError("unexpected character '" + std::string(1, c) + "'");
        }
    }

    if (query.target_steps.empty())
        throw UnsupportedQueryError("empty path");
    if (!saw_predicate)
        throw UnsupportedQueryError("missing about(...) predicate on the final step");
    if (query.about_terms.empty())
        throw UnsupportedQueryError("about string contains no terms");
    return query;
}

/// Article iff the final target tag is "article".
inline TopicCategory categorize(const StructuredQuery& query) {
    return query.target_tag() == "article" ? TopicCategory::Article : TopicCategory::Specific;
}

/// Loads every .xml topic file under `dir`, sorted by topic_id.
inline std::vector<CasTopic> load_topics_dir(const std::filesystem::path& dir,
                                             const XmlParseOptions& options = {}) {
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("topic directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<CasTopic> topics;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open " + file.string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        try {
            topics.push_back(parse_topic(buffer.str(), options));
        } catch (const std::exception& e) {
            throw std::runtime_error(file.string() + ": " + e.what());
        }
    }
    std::sort(topics.begin(), topics.end(),
              [](const CasTopic& a, const CasTopic& b) { return a.topic_id < b.topic_id; });
    for (std::size_t i = 1; i < topics.size(); ++i) {
        if (topics[i].topic_id == topics[i - 1].topic_id)
            throw std::runtime_error("duplicate topic_id " + std::to_string(topics[i].topic_id));
    }
    return topics;
}

} // namespace casret
