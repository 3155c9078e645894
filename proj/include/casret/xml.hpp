#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "casret/element_path.hpp"
#include "casret/tokenize.hpp"

namespace casret {

/// Raised on malformed XML; carries the byte offset of the failure.
class XmlParseError : public std::runtime_error {
public:
    XmlParseError(const std::string& message, std::size_t offset)
        : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Tree node: an element (tag, attributes, children) or a text fragment
/// (empty tag, `text` holds the characters). Children keep document order,
/// with text fragments interleaved between child elements.
struct XmlNode {
    std::string tag;
    std::string text;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlNode> children;

    bool is_text() const { return tag.empty(); }
    bool is_element() const { return !tag.empty(); }

    const std::string* attribute(std::string_view name) const {
        for (const auto& [k, v] : attributes) {
            if (k == name)
                return &v;
        }
        return nullptr;
    }
};

struct XmlParseOptions {
    /// When set, an undefined named entity reference is kept as literal
    /// "&name;" text instead of raising XmlParseError.
    bool lenient_entities = false;
};

/// A parsed article: corpus-relative identifier plus the element tree.
struct Document {
    std::string doc_id;
    XmlNode root;
};

namespace detail {

class XmlParser {
public:
    XmlParser(std::string_view input, XmlParseOptions options)
        : in_(input), options_(options) {}

    XmlNode parse() {
        if (in_.empty())
            fail("empty input");
        skip_bom();
        skip_prolog();
        if (eof() || peek() != '<')
            fail("expected root element");
        XmlNode root = parse_element();
        skip_misc();
        if (!eof())
            fail("content after root element");
        return root;
    }

private:
    std::string_view in_;
    XmlParseOptions options_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw XmlParseError(message, pos_);
    }

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    bool looking_at(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
    static bool is_name_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':';
    }
    static bool is_name_char(char c) {
        return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
    }

    void skip_space() {
        while (!eof() && is_space(peek()))
            ++pos_;
    }

    void skip_bom() {
        if (in_.substr(0, 3) == "\xEF\xBB\xBF")
            pos_ = 3;
    }

    void expect(std::string_view s) {
        if (!looking_at(s))
            fail("expected \"" + std::string(s) + "\"");
        pos_ += s.size();
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek()))
            fail("expected name");
        std::size_t start = pos_;
        while (!eof() && is_name_char(peek()))
            ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    void skip_until(std::string_view terminator, const char* what) {
        std::size_t found = in_.find(terminator, pos_);
        if (found == std::string_view::npos)
            fail(std::string("unterminated ") + what);
        pos_ = found + terminator.size();
    }

    // <!DOCTYPE ...>, including an optional [...] internal subset.
    void skip_doctype() {
        pos_ += 9; // "<!DOCTYPE"
        int bracket_depth = 0;
        while (!eof()) {
            char c = peek();
            if (c == '[') {
                ++bracket_depth;
            } else if (c == ']') {
                --bracket_depth;
            } else if (c == '>' && bracket_depth == 0) {
                ++pos_;
                return;
            }
            ++pos_;
        }
        fail("unterminated DOCTYPE");
    }

    void skip_misc() {
        while (!eof()) {
            if (is_space(peek())) {
                ++pos_;
            } else if (looking_at("<!--")) {
                pos_ += 4;
                skip_until("-->", "comment");
            } else if (looking_at("<?")) {
                pos_ += 2;
                skip_until("?>", "processing instruction");
            } else {
                return;
            }
        }
    }

    void skip_prolog() {
        while (!eof()) {
            skip_misc();
            if (looking_at("<!DOCTYPE")) {
                skip_doctype();
            } else {
                return;
            }
        }
    }

    void append_utf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    void parse_entity(std::string& out) {
        std::size_t amp = pos_;
        ++pos_; // '&'
        std::size_t semi = in_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 32) {
            pos_ = amp;
            fail("malformed entity reference");
        }
        std::string_view name = in_.substr(pos_, semi - pos_);
        if (name.empty()) {
            pos_ = amp;
            fail("malformed entity reference");
        }
        if (name[0] == '#') {
            unsigned long cp = 0;
            try {
                cp = (name.size() > 1 && (name[1] == 'x' || name[1] == 'X'))
                         ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                         : std::stoul(std::string(name.substr(1)), nullptr, 10);
            } catch (const std::exception&) {
                pos_ = amp;
                fail("malformed character reference");
            }
            if (cp == 0 || cp > 0x10FFFF) {
                pos_ = amp;
                fail("character reference out of range");
            }
            append_utf8(out, cp);
        } else if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "amp") {
            out.push_back('&');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (options_.lenient_entities) {
            out += "&";
            out += std::string(name);
            out += ";";
        } else {
            pos_ = amp;
            fail("undefined entity \"&" + std::string(name) + ";\"");
        }
        pos_ = semi + 1;
    }

    std::string parse_attribute_value() {
        char quote = peek();
        if (quote != '"' && quote != '\'')
            fail("expected quoted attribute value");
        ++pos_;
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '&') {
                parse_entity(value);
            } else if (peek() == '<') {
                fail("'<' in attribute value");
            } else {
                value.push_back(peek());
                ++pos_;
            }
        }
        if (eof())
            fail("unterminated attribute value");
        ++pos_;
        return value;
    }

    XmlNode parse_element() {
        expect("<");
        XmlNode node;
        node.tag = parse_name();
        while (true) {
            skip_space();
            if (eof())
                fail("unexpected end of input in tag \"" + node.tag + "\"");
            if (looking_at("/>")) {
                pos_ += 2;
                return node;
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string attr_name = parse_name();
            for (const auto& [k, v] : node.attributes) {
                if (k == attr_name)
                    fail("duplicate attribute \"" + attr_name + "\"");
            }
            skip_space();
            expect("=");
            skip_space();
            node.attributes.emplace_back(std::move(attr_name), parse_attribute_value());
        }
        parse_content(node);
        return node;
    }

    void parse_content(XmlNode& node) {
        std::string text;
        auto flush_text = [&] {
            if (!text.empty()) {
                XmlNode fragment;
                fragment.text = std::move(text);
                node.children.push_back(std::move(fragment));
                text.clear();
            }
        };
        while (true) {
            if (eof())
                fail("unexpected end of input inside element \"" + node.tag + "\"");
            char c = peek();
            if (c == '<') {
                if (looking_at("</")) {
                    flush_text();
                    pos_ += 2;
                    std::size_t name_pos = pos_;
                    std::string closing = parse_name();
                    if (closing != node.tag) {
                        pos_ = name_pos;
                        fail("mismatched closing tag \"" + closing + "\" for element \"" +
                             node.tag + "\"");
                    }
                    skip_space();
                    expect(">");
                    return;
                }
                if (looking_at("<!--")) {
                    pos_ += 4;
                    skip_until("-->", "comment");
                    continue;
                }
                if (looking_at("<![CDATA[")) {
                    pos_ += 9;
                    std::size_t end = in_.find("]]>", pos_);
                    if (end == std::string_view::npos)
                        fail("unterminated CDATA section");
                    text += std::string(in_.substr(pos_, end - pos_));
                    pos_ = end + 3;
                    continue;
                }
                if (looking_at("<?")) {
                    pos_ += 2;
                    skip_until("?>", "processing instruction");
                    continue;
                }
                if (looking_at("<!"))
                    fail("unexpected markup declaration in content");
                flush_text();
                node.children.push_back(parse_element());
                continue;
            }
            if (c == '&') {
                parse_entity(text);
                continue;
            }
            text.push_back(c);
            ++pos_;
        }
    }
};

} // namespace detail

/// Parses one well-formed XML document. Malformed input raises XmlParseError
/// with the byte offset of the problem.
inline Document parse_document(std::string_view xml_bytes, std::string doc_id,
                               const XmlParseOptions& options = {}) {
    detail::XmlParser parser(xml_bytes, options);
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.root = parser.parse();
    return doc;
}

/// Pre-order walk over the element tree; the callback receives each element
/// together with its absolute path (per-tag sibling ordinals).
inline void for_each_element(const XmlNode& root,
                             const std::function<void(const XmlNode&, const ElementPath&)>& fn) {
    ElementPath path;
    path.steps.push_back({root.tag, 1});

    std::function<void(const XmlNode&)> walk = [&](const XmlNode& node) {
        fn(node, path);
        std::map<std::string, int> tag_counts;
        for (const XmlNode& child : node.children) {
            if (!child.is_element())
                continue;
            int ordinal = ++tag_counts[child.tag];
            path.steps.push_back({child.tag, ordinal});
            walk(child);
            path.steps.pop_back();
        }
    };
    walk(root);
}

/// Resolves a path against a document tree; nullptr when no such element.
inline const XmlNode* resolve_path(const XmlNode& root, const ElementPath& path) {
    if (path.empty() || path.steps.front() != PathStep{root.tag, 1})
        return nullptr;
    const XmlNode* node = &root;
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        const PathStep& step = path.steps[i];
        const XmlNode* next = nullptr;
        int seen = 0;
        for (const XmlNode& child : node->children) {
            if (child.is_element() && child.tag == step.tag && ++seen == step.ordinal) {
                next = &child;
                break;
            }
        }
        if (!next)
            return nullptr;
        node = next;
    }
    return node;
}

/// Absolute path of a node owned by `doc`. Walks the tree to locate the node.
inline ElementPath absolute_path(const Document& doc, const XmlNode& node) {
    ElementPath found;
    for_each_element(doc.root, [&](const XmlNode& candidate, const ElementPath& path) {
        if (&candidate == &node)
            found = path;
    });
    if (found.empty())
        throw std::invalid_argument("node does not belong to document \"" + doc.doc_id + "\"");
    return found;
}

/// In-order concatenation of every descendant text fragment, unprocessed.
/// Attribute values are not part of element text.
inline void extract_raw_text(const XmlNode& node, std::string& out) {
    if (node.is_text()) {
        out += node.text;
        return;
    }
    for (const XmlNode& child : node.children)
        extract_raw_text(child, out);
}

/// Subtree text with whitespace collapsed to single spaces.
inline std::string extract_text(const XmlNode& node) {
    std::string raw;
    extract_raw_text(node, raw);
    return collapse_whitespace(raw);
}

} // namespace casret
