#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casret/corpus.hpp"
#include "casret/tokenize.hpp"
#include "casret/xml.hpp"

namespace casret {

/// Article-level inverted index. Document lengths count tokens after
/// tokenisation; collection statistics are kept as exact integers so that
/// derived values do not depend on ingestion order.
class FullTextIndex {
public:
    struct DocInfo {
        std::string doc_id;
        std::string root_tag;
        std::uint64_t length = 0;
    };

    struct Posting {
        std::uint32_t doc = 0; // storage-order index
        std::uint32_t freq = 0;
    };

    std::vector<DocInfo> docs;
    std::map<std::string, std::vector<Posting>> postings; // term -> (doc, f_dt)
    std::uint64_t total_tokens = 0;
    TokenizeOptions tokenizer;

    std::size_t doc_count() const { return docs.size(); }
    double avg_doc_length() const {
        return static_cast<double>(total_tokens) / static_cast<double>(docs.size());
    }

    std::size_t doc_index(const std::string& doc_id) const {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (docs[i].doc_id == doc_id)
                return i;
        }
        throw std::invalid_argument("doc_id not in index: \"" + doc_id + "\"");
    }

    std::uint32_t doc_frequency(const std::string& term) const {
        auto it = postings.find(term);
        return it == postings.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
    }

    std::uint32_t term_frequency(const std::string& term, std::size_t doc) const {
        auto it = postings.find(term);
        if (it == postings.end())
            return 0;
        const auto& list = it->second;
        auto pos = std::lower_bound(list.begin(), list.end(), doc,
                                    [](const Posting& p, std::size_t d) { return p.doc < d; });
        if (pos == list.end() || pos->doc != doc)
            return 0;
        return pos->freq;
    }

    /// Applies the index's tokenizer options to already-tokenised terms and
    /// drops duplicates, preserving first occurrence.
    std::vector<std::string> normalize_terms(const std::vector<std::string>& terms) const {
        std::vector<std::string> out;
        std::set<std::string> seen;
        for (const std::string& term : terms) {
            for (std::string& t : tokenize(term, tokenizer)) {
                if (seen.insert(t).second)
                    out.push_back(std::move(t));
            }
        }
        return out;
    }
};

struct RankedArticle {
    std::string doc_id;
    double score = 0.0;
};

/// Indexes the subtree text of every article (tags stripped).
inline FullTextIndex build_fulltext_index(const Corpus& corpus,
                                          const TokenizeOptions& tokenizer = {}) {
    if (corpus.empty())
        throw std::invalid_argument("cannot index an empty corpus");
    FullTextIndex index;
    index.tokenizer = tokenizer;
    for (const Document& doc : corpus.documents()) {
        std::string raw;
        extract_raw_text(doc.root, raw);
        std::vector<std::string> tokens = tokenize(raw, tokenizer);

        std::uint32_t doc_idx = static_cast<std::uint32_t>(index.docs.size());
        index.docs.push_back({doc.doc_id, doc.root.tag, tokens.size()});
        index.total_tokens += tokens.size();

        std::map<std::string, std::uint32_t> freqs;
        for (const std::string& t : tokens)
            ++freqs[t];
        for (auto& [term, freq] : freqs)
            index.postings[term].push_back({doc_idx, freq});
    }
    return index;
}

namespace detail {

inline void check_slope(double slope) {
    if (!(slope >= 0.0 && slope <= 1.0))
        throw std::invalid_argument("slope must be within [0, 1]");
}

inline double pivoted_denominator(const FullTextIndex& index, std::uint64_t doc_length,
                                  double slope) {
    return (1.0 - slope) * index.avg_doc_length() +
           slope * static_cast<double>(doc_length);
}

inline double term_weight(const FullTextIndex& index, std::uint32_t f_dt, std::uint32_t f_t) {
    double tf = 1.0 + std::log(static_cast<double>(f_dt));
    double idf = std::log(1.0 + static_cast<double>(index.doc_count()) / static_cast<double>(f_t));
    return tf * idf;
}

} // namespace detail

/// Pivoted cosine score of one document:
///   sum over matched terms of (1 + ln f_dt) * ln(1 + N / f_t),
/// divided by (1 - slope) * avg_dl + slope * dl_d.
/// Duplicate query terms are counted once.
inline double pivoted_score(const std::vector<std::string>& query_terms, const std::string& doc_id,
                            const FullTextIndex& index, double slope) {
    detail::check_slope(slope);
    std::size_t doc = index.doc_index(doc_id);
    std::set<std::string> unique_terms(query_terms.begin(), query_terms.end());
    double numerator = 0.0;
    for (const std::string& term : unique_terms) {
        std::uint32_t f_dt = index.term_frequency(term, doc);
        if (f_dt == 0)
            continue;
        numerator += detail::term_weight(index, f_dt, index.doc_frequency(term));
    }
    if (numerator == 0.0)
        return 0.0;
    return numerator / detail::pivoted_denominator(index, index.docs[doc].length, slope);
}

/// Top-k articles with positive score, descending; ties break on ascending
/// doc_id. Query terms go through the index's tokenizer options first.
inline std::vector<RankedArticle> search_articles(const std::vector<std::string>& query_terms,
                                                  const FullTextIndex& index, std::size_t k = 100,
                                                  double slope = 0.25) {
    detail::check_slope(slope);
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    std::vector<std::string> terms = index.normalize_terms(query_terms);
    std::sort(terms.begin(), terms.end());

    // Accumulation order per document equals sorted term order, so scores do
    // not depend on ingestion order.
    std::vector<double> numerators(index.doc_count(), 0.0);
    for (const std::string& term : terms) {
        auto it = index.postings.find(term);
        if (it == index.postings.end())
            continue;
        std::uint32_t f_t = static_cast<std::uint32_t>(it->second.size());
        for (const FullTextIndex::Posting& p : it->second)
            numerators[p.doc] += detail::term_weight(index, p.freq, f_t);
    }

    std::vector<RankedArticle> ranked;
    for (std::size_t d = 0; d < index.doc_count(); ++d) {
        if (numerators[d] == 0.0)
            continue;
        double score = numerators[d] / detail::pivoted_denominator(index, index.docs[d].length,
                                                                   slope);
        ranked.push_back({index.docs[d].doc_id, score});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedArticle& a, const RankedArticle& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (ranked.size() > k)
        ranked.resize(k);
    return ranked;
}

// --- persistence -----------------------------------------------------------
//
// Plain-text format, versioned:
//   casret-fulltext-index 1
//   stem 0|1
//   stopwords <count> [terms...]
//   ndocs <N>
//   total_tokens <T>
//   doc <doc_id> <root_tag> <length>            (N lines, storage order)
//   term <term> <df> <doc>:<freq> ...           (sorted by term)

inline void save_index(const FullTextIndex& index, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "casret-fulltext-index 1\n";
    out << "stem " << (index.tokenizer.stem ? 1 : 0) << '\n';
    std::vector<std::string> stopwords(index.tokenizer.stopwords.begin(),
                                       index.tokenizer.stopwords.end());
    std::sort(stopwords.begin(), stopwords.end());
    out << "stopwords " << stopwords.size();
    for (const std::string& w : stopwords)
        out << ' ' << w;
    out << '\n';
    out << "ndocs " << index.docs.size() << '\n';
    out << "total_tokens " << index.total_tokens << '\n';
    for (const auto& doc : index.docs)
        out << "doc " << doc.doc_id << ' ' << doc.root_tag << ' ' << doc.length << '\n';
    for (const auto& [term, list] : index.postings) {
        out << "term " << term << ' ' << list.size();
        for (const FullTextIndex::Posting& p : list)
            out << ' ' << p.doc << ':' << p.freq;
        out << '\n';
    }
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

inline FullTextIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open index " + path.string());
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("bad index file " + path.string() + ": " + what);
    };

    FullTextIndex index;
    std::string line;
    if (!std::getline(in, line) || line != "casret-fulltext-index 1")
        fail("unknown format or version");

    if (!std::getline(in, line))
        fail("missing stem line");
    {
        std::istringstream ls(line);
        std::string key;
        int flag = 0;
        if (!(ls >> key >> flag) || key != "stem")
            fail("missing stem line");
        index.tokenizer.stem = flag != 0;
    }
    if (!std::getline(in, line))
        fail("missing stopwords line");
    {
        std::istringstream ls(line);
        std::string key, word;
        std::size_t count = 0;
        if (!(ls >> key >> count) || key != "stopwords")
            fail("missing stopwords line");
        for (std::size_t i = 0; i < count; ++i) {
            if (!(ls >> word))
                fail("truncated stopword list");
            index.tokenizer.stopwords.insert(word);
        }
    }

    std::size_t ndocs = 0;
    if (!std::getline(in, line))
        fail("missing ndocs");
    {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key >> ndocs) || key != "ndocs")
            fail("missing ndocs");
    }
    if (!std::getline(in, line))
        fail("missing total_tokens");
    {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key >> index.total_tokens) || key != "total_tokens")
            fail("missing total_tokens");
    }
    for (std::size_t i = 0; i < ndocs; ++i) {
        if (!std::getline(in, line))
            fail("truncated doc table");
        std::istringstream ls(line);
        std::string key;
        FullTextIndex::DocInfo doc;
        if (!(ls >> key >> doc.doc_id >> doc.root_tag >> doc.length) || key != "doc")
            fail("bad doc line: " + line);
        index.docs.push_back(std::move(doc));
    }
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string key, term;
        std::size_t count = 0;
        if (!(ls >> key >> term >> count) || key != "term")
            fail("bad term line: " + line);
        std::vector<FullTextIndex::Posting> list;
        list.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::string pair;
            if (!(ls >> pair))
                fail("truncated postings for term \"" + term + "\"");
            std::size_t colon = pair.find(':');
            if (colon == std::string::npos)
                fail("bad posting \"" + pair + "\"");
            FullTextIndex::Posting p;
            p.doc = static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon)));
            p.freq = static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)));
            if (p.doc >= ndocs)
                fail("posting references unknown doc " + std::to_string(p.doc));
            list.push_back(p);
        }
        index.postings.emplace(std::move(term), std::move(list));
    }
    return index;
}

} // namespace casret
