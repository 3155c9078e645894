#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace casret {

/// One location step: an element tag plus its position among same-tag
/// siblings (1-based). Ordinals count per tag, so a parent with children
/// ip1, p, p yields ip1[1], p[1], p[2].
struct PathStep {
    std::string tag;
    int ordinal = 1;

    auto operator<=>(const PathStep&) const = default;
};

/// Absolute path of an element, rendered as "/tag[n]/tag[n]/...".
///
/// The default ordering (lexicographic over steps, prefix first) is the
/// canonical document order used for ranking ties: exact for same-tag
/// siblings, tag-name order where sibling tags differ.
struct ElementPath {
    std::vector<PathStep> steps;

    auto operator<=>(const ElementPath&) const = default;

    std::size_t depth() const { return steps.size(); }
    bool empty() const { return steps.empty(); }

    std::string render() const {
        std::string out;
        for (const auto& step : steps) {
            out += '/';
            out += step.tag;
            out += '[';
            out += std::to_string(step.ordinal);
            out += ']';
        }
        return out;
    }

    static ElementPath parse(std::string_view text) {
        ElementPath path;
        std::size_t pos = 0;
        auto fail = [&](const std::string& what) {
            throw std::invalid_argument("invalid element path \"" + std::string(text) + "\": " +
                                        what);
        };
        if (text.empty())
            fail("empty");
        while (pos < text.size()) {
            if (text[pos] != '/')
                fail("expected '/' at position " + std::to_string(pos));
            ++pos;
            std::size_t tag_start = pos;
            while (pos < text.size() && is_name_char(text[pos], pos == tag_start))
                ++pos;
            if (pos == tag_start)
                fail("expected tag name at position " + std::to_string(pos));
            PathStep step;
            step.tag = std::string(text.substr(tag_start, pos - tag_start));
            if (pos >= text.size() || text[pos] != '[')
                fail("expected '[' after tag \"" + step.tag + "\"");
            ++pos;
            std::size_t num_start = pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9')
                ++pos;
            if (pos == num_start)
                fail("expected ordinal after '['");
            step.ordinal = std::stoi(std::string(text.substr(num_start, pos - num_start)));
            if (step.ordinal < 1)
                fail("ordinal must be >= 1");
            if (pos >= text.size() || text[pos] != ']')
                fail("expected ']' after ordinal");
            ++pos;
            path.steps.push_back(std::move(step));
        }
        return path;
    }

private:
    static bool is_name_char(char c, bool first) {
        bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
        if (first)
            return alpha;
        return alpha || (c >= '0' && c <= '9') || c == '-' || c == '.';
    }
};

/// True iff a's steps are a strict prefix of b's steps.
inline bool is_proper_ancestor(const ElementPath& a, const ElementPath& b) {
    if (a.steps.size() >= b.steps.size())
        return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        if (a.steps[i] != b.steps[i])
            return false;
    }
    return true;
}

} // namespace casret
