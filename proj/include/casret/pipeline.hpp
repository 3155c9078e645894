#pragma once

#include <algorithm>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casret/corpus.hpp"
#include "casret/cre.hpp"
#include "casret/fulltext.hpp"
#include "casret/run_file.hpp"
#include "casret/structural.hpp"
#include "casret/topic.hpp"

namespace casret {

/// The five retrieval strategies compared by the artifact: article-level
/// full-text ranking, element retrieval in storage order, the same with
/// coherent-element post-processing, and the hybrid pair that feeds
/// element retrieval with the full-text article ranking.
enum class Strategy {
    Fulltext,
    Native,
    NativeCre,
    Hybrid,
    HybridCre,
};

inline const char* strategy_name(Strategy s) {
    switch (s) {
    case Strategy::Fulltext: return "fulltext";
    case Strategy::Native: return "native";
    case Strategy::NativeCre: return "native-cre";
    case Strategy::Hybrid: return "hybrid";
    case Strategy::HybridCre: return "hybrid-cre";
    }
    throw std::logic_error("unreachable strategy");
}

inline Strategy parse_strategy(const std::string& name) {
    for (Strategy s : {Strategy::Fulltext, Strategy::Native, Strategy::NativeCre,
                       Strategy::Hybrid, Strategy::HybridCre}) {
        if (name == strategy_name(s))
            return s;
    }
    throw std::invalid_argument(
        "unknown strategy \"" + name +
        "\" (expected fulltext, native, native-cre, hybrid or hybrid-cre)");
}

inline bool strategy_needs_corpus(Strategy s) { return s != Strategy::Fulltext; }

inline bool strategy_needs_index(Strategy s) {
    return s == Strategy::Fulltext || s == Strategy::Hybrid || s == Strategy::HybridCre;
}

/// A topic reduced to what retrieval needs: its id and parsed title query.
struct TopicQuery {
    int topic_id = 0;
    StructuredQuery query;
};

inline TopicQuery make_topic_query(const CasTopic& topic) {
    return {topic.topic_id, parse_title(topic.title_expr)};
}

struct RetrievalConfig {
    int k = 100;         // answer-list cap per topic
    double slope = 0.25; // pivoted-normalisation slope
    EquivalenceClasses equivalence = EquivalenceClasses::defaults();
    CreOptions cre;
};

/// One article's matching elements, in document order — the unit the
/// coherent-element stage consumes.
struct ArticleMatches {
    std::string doc_id;
    std::vector<ElementPath> paths;
};

namespace detail {

inline ElementPath root_path(const std::string& root_tag) {
    ElementPath path;
    path.steps.push_back({root_tag, 1});
    return path;
}

/// AND matches first, then OR-only matches, under the given scope.
inline std::vector<ElementPath> merged_matches(const Document& doc,
                                               const std::vector<std::string>& terms,
                                               const TargetScope& scope) {
    std::vector<ElementPath> and_list =
        match_elements(doc, MatchQuery{terms, MatchMode::All, scope});
    std::vector<ElementPath> or_list =
        match_elements(doc, MatchQuery{terms, MatchMode::Any, scope});
    return merge_and_or(and_list, or_list);
}

/// Element entries for articles visited in the given order, stopping at k.
inline std::vector<RunEntry> element_entries(const TopicQuery& topic,
                                             const std::vector<const Document*>& articles,
                                             const TargetScope& scope, int k) {
    std::vector<RunEntry> entries;
    for (const Document* doc : articles) {
        if (static_cast<int>(entries.size()) >= k)
            break;
        for (ElementPath& path : merged_matches(*doc, topic.query.about_terms, scope)) {
            if (static_cast<int>(entries.size()) >= k)
                break;
            entries.push_back({topic.topic_id, static_cast<int>(entries.size()) + 1, doc->doc_id,
                               std::move(path), std::nullopt});
        }
    }
    return entries;
}

inline std::vector<const Document*> storage_order(const Corpus& corpus) {
    std::vector<const Document*> articles;
    articles.reserve(corpus.size());
    for (const Document& doc : corpus.documents())
        articles.push_back(&doc);
    return articles;
}

inline std::vector<const Document*> fulltext_order(const TopicQuery& topic, const Corpus& corpus,
                                                   const FullTextIndex& index,
                                                   const RetrievalConfig& config) {
    std::vector<const Document*> articles;
    for (const RankedArticle& ranked :
         search_articles(topic.query.about_terms, index, config.k, config.slope)) {
        const Document* doc = corpus.find(ranked.doc_id);
        if (!doc)
            throw std::runtime_error("article \"" + ranked.doc_id +
                                     "\" is indexed but missing from the corpus");
        articles.push_back(doc);
    }
    return articles;
}

/// Per-article most-specific match lists (no tag constraint — the
/// content-only reading), in the given article order; articles without
/// matches are dropped.
inline std::vector<ArticleMatches> collect_matches(const TopicQuery& topic,
                                                   const std::vector<const Document*>& articles) {
    std::vector<ArticleMatches> result;
    for (const Document* doc : articles) {
        std::vector<ElementPath> merged =
            merged_matches(*doc, topic.query.about_terms, TargetScope::any());
        if (!merged.empty())
            result.push_back({doc->doc_id, std::move(merged)});
    }
    return result;
}

} // namespace detail

/// Top-k articles by pivoted-cosine score, as whole-article entries.
inline std::vector<RunEntry> run_fulltext(const TopicQuery& topic, const FullTextIndex& index,
                                          const RetrievalConfig& config = {}) {
    std::vector<RunEntry> entries;
    for (const RankedArticle& article :
         search_articles(topic.query.about_terms, index, config.k, config.slope)) {
        const std::string& root_tag = index.docs[index.doc_index(article.doc_id)].root_tag;
        entries.push_back({topic.topic_id, static_cast<int>(entries.size()) + 1, article.doc_id,
                           detail::root_path(root_tag), article.score});
    }
    return entries;
}

/// Target-tag elements article by article in storage order, scoreless,
/// AND matches before OR-only matches within each article.
inline std::vector<RunEntry> run_native(const TopicQuery& topic, const Corpus& corpus,
                                        const RetrievalConfig& config = {}) {
    TargetScope scope = TargetScope::for_target(topic.query.target_tag(), config.equivalence);
    return detail::element_entries(topic, detail::storage_order(corpus), scope, config.k);
}

/// As run_native, but visiting articles in full-text ranking order.
inline std::vector<RunEntry> run_hybrid(const TopicQuery& topic, const Corpus& corpus,
                                        const FullTextIndex& index,
                                        const RetrievalConfig& config = {}) {
    TargetScope scope = TargetScope::for_target(topic.query.target_tag(), config.equivalence);
    return detail::element_entries(
        topic, detail::fulltext_order(topic, corpus, index, config), scope, config.k);
}

/// Replace each article's match list with its ranked coherent elements,
/// preserving article order and capping the total at k. Articles whose
/// coherent elements all fail the granularity filter contribute nothing.
inline std::vector<RunEntry> apply_cre(const std::vector<ArticleMatches>& per_article,
                                       const TopicQuery& topic,
                                       const RetrievalConfig& config = {}) {
    TargetScope granularity =
        TargetScope::for_target(topic.query.target_tag(), config.equivalence);
    std::vector<RunEntry> entries;
    for (const ArticleMatches& article : per_article) {
        if (static_cast<int>(entries.size()) >= config.k)
            break;
        CreResult ranked = coherent_elements(article.paths, granularity, config.cre);
        for (RankedCre& cre : ranked.entries) {
            if (static_cast<int>(entries.size()) >= config.k)
                break;
            entries.push_back({topic.topic_id, static_cast<int>(entries.size()) + 1,
                               article.doc_id, std::move(cre.path), std::nullopt});
        }
    }
    return entries;
}

inline std::vector<RunEntry> run_native_cre(const TopicQuery& topic, const Corpus& corpus,
                                            const RetrievalConfig& config = {}) {
    return apply_cre(detail::collect_matches(topic, detail::storage_order(corpus)), topic,
                     config);
}

inline std::vector<RunEntry> run_hybrid_cre(const TopicQuery& topic, const Corpus& corpus,
                                            const FullTextIndex& index,
                                            const RetrievalConfig& config = {}) {
    return apply_cre(
        detail::collect_matches(topic,
                                detail::fulltext_order(topic, corpus, index, config)),
        topic, config);
}

/// Run one strategy over a topic set; entries are grouped by ascending
/// topic id with contiguous ranks per topic. Pass only the inputs the
/// strategy needs (corpus for element strategies, index for scored ones).
inline std::vector<RunEntry> execute_strategy(Strategy strategy,
                                              const std::vector<TopicQuery>& topics,
                                              const Corpus* corpus, const FullTextIndex* index,
                                              const RetrievalConfig& config = {}) {
    if (config.k < 1)
        throw std::invalid_argument("answer-list cap k must be at least 1");
    if (strategy_needs_corpus(strategy) && corpus == nullptr)
        throw std::invalid_argument(std::string(strategy_name(strategy)) +
                                    " requires an ingested corpus");
    if (strategy_needs_index(strategy) && index == nullptr)
        throw std::invalid_argument(std::string(strategy_name(strategy)) +
                                    " requires a full-text index");

    std::vector<TopicQuery> ordered = topics;
    std::sort(ordered.begin(), ordered.end(),
              [](const TopicQuery& a, const TopicQuery& b) { return a.topic_id < b.topic_id; });

    std::vector<RunEntry> run;
    for (const TopicQuery& topic : ordered) {
        std::vector<RunEntry> entries;
        switch (strategy) {
        case Strategy::Fulltext: entries = run_fulltext(topic, *index, config); break;
        case Strategy::Native: entries = run_native(topic, *corpus, config); break;
        case Strategy::NativeCre: entries = run_native_cre(topic, *corpus, config); break;
        case Strategy::Hybrid: entries = run_hybrid(topic, *corpus, *index, config); break;
        case Strategy::HybridCre:
            entries = run_hybrid_cre(topic, *corpus, *index, config);
            break;
        }
        run.insert(run.end(), std::make_move_iterator(entries.begin()),
                   std::make_move_iterator(entries.end()));
    }
    return run;
}

} // namespace casret
