#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace casret {

/// Optional term-normalisation hooks. Both are off by default; the plain
/// pipeline is lowercase + split on non-alphanumerics + drop empties.
struct TokenizeOptions {
    bool stem = false;
    std::unordered_set<std::string> stopwords;
};

namespace detail {

// Plural-stripping stemmer: the longest matching suffix rule decides, and its
// exception list protects the word outright (no fall-through to later rules).
inline void s_stem(std::string& t) {
    auto ends_with = [&](std::string_view suf) {
        return t.size() >= suf.size() && std::string_view(t).substr(t.size() - suf.size()) == suf;
    };
    if (t.size() > 3 && ends_with("ies")) {
        if (!ends_with("eies") && !ends_with("aies"))
            t.replace(t.size() - 3, 3, "y");
    } else if (t.size() > 3 && ends_with("es")) {
        if (!ends_with("aes") && !ends_with("ees") && !ends_with("oes"))
            t.pop_back();
    } else if (t.size() > 2 && ends_with("s")) {
        if (!ends_with("us") && !ends_with("ss"))
            t.pop_back();
    }
}

} // namespace detail

/// Splits text into lowercase terms on non-alphanumeric boundaries.
/// Bytes outside ASCII letters/digits act as separators.
inline std::vector<std::string> tokenize(std::string_view text,
                                         const TokenizeOptions& options = {}) {
    std::vector<std::string> terms;
    std::string current;
    auto flush = [&] {
        if (current.empty())
            return;
        if (options.stopwords.empty() || options.stopwords.find(current) == options.stopwords.end()) {
            if (options.stem)
                detail::s_stem(current);
            terms.push_back(current);
        }
        current.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c) && c < 128) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return terms;
}

/// Collapses whitespace runs to single spaces and trims the ends.
inline std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space)
                out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

} // namespace casret
