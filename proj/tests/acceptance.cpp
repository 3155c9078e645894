// Acceptance gate: one self-contained check per shipped guarantee, each
// printed as a single PASS/FAIL line with its elapsed time. Exits nonzero
// if any check fails or overruns its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "casret/corpus.hpp"
#include "casret/cre.hpp"
#include "casret/element_path.hpp"
#include "casret/eval.hpp"
#include "casret/fixtures.hpp"
#include "casret/fulltext.hpp"
#include "casret/pipeline.hpp"
#include "casret/run_file.hpp"
#include "casret/structural.hpp"
#include "casret/topic.hpp"

using namespace casret;

namespace {

struct Checker {
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok)
            failures.push_back(what);
    }
};

// --- criterion 1: golden branching-sections ranking -------------------------

std::optional<std::string> golden_ranking(Checker& c) {
    fixtures::GoldenCreCase golden = fixtures::branching_sections_case();
    std::set<ElementPath> cres = identify_cres(golden.matching_paths);

    ElementPath bdy = ElementPath::parse("/article[1]/bdy[1]");
    ElementPath sec4 = ElementPath::parse("/article[1]/bdy[1]/sec[4]");
    c.check(cres.count(bdy) == 1, "bdy[1] must be identified as a coherent element");
    c.check(cres.count(sec4) == 0, "sec[4] holds one match and must not be coherent");

    CreResult ranked = coherent_elements(
        golden.matching_paths, TargetScope::for_target("sec", EquivalenceClasses::defaults()));
    c.check(ranked.entries == golden.expected_ranking,
            "section ranking must be sec[2], sec[1], sec[3]");
    for (const RankedCre& entry : ranked.entries)
        c.check(entry.path != bdy, "bdy[1] must be removed by the granularity filter");
    return std::nullopt;
}

// --- criterion 2: single-match special case ---------------------------------

std::optional<std::string> single_match(Checker& c) {
    ElementPath lone = ElementPath::parse("/article[1]/bdy[1]/sec[2]/p[7]");
    std::set<ElementPath> cres = identify_cres({lone});
    c.check(cres == std::set<ElementPath>{lone},
            "a one-path input must return that path");
    CreResult ranked = coherent_elements({lone}, TargetScope::any());
    c.check(ranked.entries == std::vector<RankedCre>{{1, lone}},
            "the lone path must be ranked first");
    return std::nullopt;
}

// --- criterion 3: coherent-element oracle equivalence -----------------------

std::set<ElementPath> oracle_cres(const std::vector<ElementPath>& paths) {
    if (paths.size() == 1)
        return {paths.front()};
    std::set<ElementPath> candidates;
    for (const ElementPath& path : paths)
        for (std::size_t depth = 1; depth < path.steps.size(); ++depth)
            candidates.insert(
                ElementPath{{path.steps.begin(), path.steps.begin() + depth}});
    std::set<ElementPath> out;
    for (const ElementPath& candidate : candidates) {
        std::set<PathStep> next_steps;
        for (const ElementPath& path : paths)
            if (is_proper_ancestor(candidate, path))
                next_steps.insert(path.steps[candidate.steps.size()]);
        if (next_steps.size() >= 2)
            out.insert(candidate);
    }
    return out;
}

std::optional<std::string> cre_oracle(Checker& c) {
    std::mt19937_64 rng(20250341);
    const std::vector<std::string> tags = {"bdy", "fm", "sec", "p", "ip1"};
    std::uniform_int_distribution<int> path_count(1, 12);
    std::uniform_int_distribution<int> extra_steps(0, 4); // total depth <= 5
    std::uniform_int_distribution<std::size_t> tag_pick(0, tags.size() - 1);
    std::uniform_int_distribution<int> ordinal(1, 2);

    for (int round = 0; round < 1000; ++round) {
        std::set<ElementPath> unique;
        const int want = path_count(rng);
        for (int attempt = 0; attempt < 200 && static_cast<int>(unique.size()) < want;
             ++attempt) {
            ElementPath path;
            path.steps.push_back({"article", 1});
            const int extra = extra_steps(rng);
            for (int s = 0; s < extra; ++s)
                path.steps.push_back({tags[tag_pick(rng)], ordinal(rng)});
            unique.insert(path);
        }
        std::vector<ElementPath> paths(unique.begin(), unique.end());
        std::shuffle(paths.begin(), paths.end(), rng);

        if (identify_cres(paths) != oracle_cres(paths)) {
            c.check(false, "identification diverged from the pairwise oracle at round " +
                               std::to_string(round));
            return std::nullopt;
        }

        std::vector<ElementPath> permuted = paths;
        std::shuffle(permuted.begin(), permuted.end(), rng);
        TargetScope scopes[2] = {TargetScope::any(), TargetScope::for_tags({tags[tag_pick(rng)]})};
        for (const TargetScope& scope : scopes) {
            if (coherent_elements(paths, scope).entries !=
                coherent_elements(permuted, scope).entries) {
                c.check(false, "ranking changed under input permutation at round " +
                                   std::to_string(round));
                return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

// --- criterion 4: AND/OR merge semantics ------------------------------------

std::optional<std::string> merge_semantics(Checker& c) {
    std::vector<ElementPath> pool;
    for (const char* text : {"/a[1]", "/a[1]/b[1]", "/a[1]/b[2]", "/a[1]/b[1]/c[1]",
                             "/a[1]/b[1]/c[2]", "/a[1]/d[1]", "/a[1]/d[1]/c[1]",
                             "/a[1]/d[2]", "/a[1]/b[3]", "/a[1]/d[1]/c[3]"})
        pool.push_back(ElementPath::parse(text));

    std::mt19937_64 rng(411700);
    std::uniform_int_distribution<std::size_t> count(0, 6);
    for (int round = 0; round < 500; ++round) {
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<ElementPath> and_list(pool.begin(), pool.begin() + count(rng));
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<ElementPath> or_list(pool.begin(), pool.begin() + count(rng));

        std::vector<ElementPath> merged = merge_and_or(and_list, or_list);

        std::vector<ElementPath> expected = and_list;
        for (const ElementPath& path : or_list)
            if (std::find(and_list.begin(), and_list.end(), path) == and_list.end())
                expected.push_back(path);
        if (merged != expected) {
            c.check(false, "merge must equal AND followed by OR-minus-AND (round " +
                               std::to_string(round) + ")");
            return std::nullopt;
        }
        c.check(std::set<ElementPath>(merged.begin(), merged.end()).size() == merged.size(),
                "merged list must be duplicate-free");
        if (and_list.empty())
            c.check(merged == or_list, "empty AND list must yield the OR list unchanged");
    }
    return std::nullopt;
}

// --- criterion 5: pivoted-cosine scoring ------------------------------------

Corpus tokens_corpus(const std::vector<std::pair<std::string, std::string>>& docs) {
    Corpus corpus;
    for (const auto& [doc_id, text] : docs)
        corpus.add(parse_document("<article>" + text + "</article>", doc_id));
    return corpus;
}

std::optional<std::string> pivoted_scoring(Checker& c) {
    // (a) pivot identity: documents at the average length keep their raw weight.
    Corpus equal = tokens_corpus({{"e1", "u v w x"}, {"e2", "u u v v"}, {"e3", "w w w w"}});
    FullTextIndex equal_index = build_fulltext_index(equal);
    for (double slope : {0.0, 0.25, 0.55, 1.0}) {
        double denominator = detail::pivoted_denominator(equal_index, 4, slope);
        c.check(std::abs(denominator - 4.0) <= 1e-12,
                "denominator must equal avg_dl at the pivot (slope " +
                    std::to_string(slope) + ")");
    }

    // (b) hand-computed scores on the two-document corpus.
    Corpus two = tokens_corpus({{"d1", "a b"}, {"d2", "b b"}});
    FullTextIndex two_index = build_fulltext_index(two);
    double repeat_score = pivoted_score({"b"}, "d2", two_index, 0.25);
    c.check(std::abs(repeat_score - 0.5868000972390733) <= 1e-9,
            "score(d2, {b}) must equal (1+ln 2)ln 2 / 2");
    double single_score = pivoted_score({"a"}, "d1", two_index, 0.25);
    c.check(std::abs(single_score - 0.5493061443340549) <= 1e-9,
            "score(d1, {a}) must equal ln 3 / 2");

    // (c) ranked search equals independent brute-force scoring.
    std::mt19937_64 rng(556021);
    const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
    std::uniform_int_distribution<std::size_t> vocab_pick(0, vocab.size() - 1);
    std::uniform_int_distribution<int> doc_count(1, 20);
    std::uniform_int_distribution<int> doc_length(1, 8);
    std::uniform_int_distribution<int> query_length(1, 4);
    std::uniform_int_distribution<std::size_t> k_pick(1, 25);

    for (int round = 0; round < 60; ++round) {
        const int n = doc_count(rng);
        std::vector<std::vector<std::string>> doc_tokens(n);
        std::vector<std::pair<std::string, std::string>> raw;
        for (int d = 0; d < n; ++d) {
            std::string text;
            const int len = doc_length(rng);
            for (int t = 0; t < len; ++t) {
                doc_tokens[d].push_back(vocab[vocab_pick(rng)]);
                if (t)
                    text += ' ';
                text += doc_tokens[d].back();
            }
            char name[8];
            std::snprintf(name, sizeof name, "r%02d", d);
            raw.push_back({name, text});
        }
        Corpus corpus = tokens_corpus(raw);
        FullTextIndex index = build_fulltext_index(corpus);

        std::vector<std::string> query;
        const int qlen = query_length(rng);
        for (int t = 0; t < qlen; ++t)
            query.push_back(vocab[vocab_pick(rng)]);
        const double slope = 0.25;
        const std::size_t k = k_pick(rng);

        // Independent scorer: term statistics recomputed from the raw tokens.
        double total_tokens = 0;
        for (const auto& tokens : doc_tokens)
            total_tokens += static_cast<double>(tokens.size());
        const double avg_dl = total_tokens / n;
        std::set<std::string> terms(query.begin(), query.end());
        std::vector<RankedArticle> expected;
        for (int d = 0; d < n; ++d) {
            double numerator = 0;
            for (const std::string& term : terms) {
                const auto tf = static_cast<double>(
                    std::count(doc_tokens[d].begin(), doc_tokens[d].end(), term));
                if (tf == 0)
                    continue;
                int df = 0;
                for (const auto& tokens : doc_tokens)
                    df += std::count(tokens.begin(), tokens.end(), term) > 0 ? 1 : 0;
                numerator += (1.0 + std::log(tf)) * std::log(1.0 + n / static_cast<double>(df));
            }
            if (numerator <= 0)
                continue;
            const double dl = static_cast<double>(doc_tokens[d].size());
            expected.push_back({raw[d].first, numerator / ((1.0 - slope) * avg_dl + slope * dl)});
        }
        std::sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) {
            if (x.score != y.score)
                return x.score > y.score;
            return x.doc_id < y.doc_id;
        });
        if (expected.size() > k)
            expected.resize(k);

        std::vector<RankedArticle> got = search_articles(query, index, k, slope);
        bool same = got.size() == expected.size();
        for (std::size_t i = 0; same && i < got.size(); ++i)
            same = got[i].doc_id == expected[i].doc_id &&
                   std::abs(got[i].score - expected[i].score) <= 1e-12;
        if (!same) {
            c.check(false, "ranked search diverged from brute-force scoring at round " +
                               std::to_string(round));
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// --- criterion 6: average-precision oracle ----------------------------------

double direct_interpolated_ap(const std::vector<double>& gains, double total) {
    std::vector<double> cumulative(gains.size());
    double running = 0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        running += gains[i];
        cumulative[i] = running;
    }
    double sum = 0;
    for (int level = 1; level <= 100; ++level) {
        double best = 0;
        for (std::size_t i = 0; i < gains.size(); ++i)
            if (100.0 * cumulative[i] >= static_cast<double>(level) * total)
                best = std::max(best, cumulative[i] / static_cast<double>(i + 1));
        sum += best;
    }
    return sum / 100.0;
}

std::optional<std::string> ap_oracle(Checker& c) {
    c.check(average_precision({1.0, 1.0}, 2.0) == 1.0, "a perfect run must score 1.0");
    c.check(average_precision({0.0, 0.0, 0.0}, 2.0) == 0.0, "an all-miss run must score 0.0");
    c.check(!average_precision({1.0}, 0.0).has_value(),
            "a zero recall base must be reported as unevaluable");

    const std::vector<double> levels = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> gains;
    long checked = 0;
    // Enumerate every gain sequence of length <= 6 over the quantised levels.
    std::function<void()> recurse = [&]() {
        if (!gains.empty()) {
            double sum = 0;
            for (double g : gains)
                sum += g;
            if (sum <= 3.0 + 1e-12) {
                for (double total : {sum, std::min(3.0, sum + 0.5), 3.0}) {
                    if (total <= 0.0)
                        continue;
                    std::optional<double> got = average_precision(gains, total);
                    if (!got.has_value() ||
                        std::abs(*got - direct_interpolated_ap(gains, total)) > 1e-9) {
                        c.check(false, "average precision diverged from the 100-level loop");
                        return;
                    }
                    ++checked;
                }
            }
        }
        if (gains.size() == 6 || !c.failures.empty())
            return;
        for (double g : levels) {
            gains.push_back(g);
            recurse();
            gains.pop_back();
        }
    };
    recurse();
    c.check(checked > 10000, "enumeration must cover the full sequence space");
    return std::nullopt;
}

// --- criterion 7: end-to-end determinism ------------------------------------

std::string run_bytes(Strategy strategy, const Corpus& corpus,
                      const std::vector<TopicQuery>& topics) {
    FullTextIndex index = build_fulltext_index(corpus);
    std::ostringstream out;
    write_run_file(out, execute_strategy(strategy, topics, &corpus, &index));
    return out.str();
}

std::optional<std::string> determinism(Checker& c) {
    std::vector<TopicQuery> topics;
    for (const CasTopic& topic : fixtures::mini_topics())
        topics.push_back(make_topic_query(topic));

    std::vector<std::string> ids = fixtures::mini_doc_ids();
    std::vector<std::vector<std::string>> orders;
    orders.push_back(ids);
    orders.push_back({ids.rbegin(), ids.rend()});
    std::mt19937_64 rng(90210);
    std::vector<std::string> shuffled = ids;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    orders.push_back(shuffled);

    for (Strategy strategy : {Strategy::Fulltext, Strategy::Native, Strategy::NativeCre,
                              Strategy::Hybrid, Strategy::HybridCre}) {
        std::vector<std::string> outputs;
        for (const std::vector<std::string>& order : orders) {
            Corpus corpus;
            for (const std::string& doc_id : order)
                corpus.add(parse_document(fixtures::mini_document_xml(doc_id), doc_id));
            outputs.push_back(run_bytes(strategy, corpus, topics));
            outputs.push_back(run_bytes(strategy, corpus, topics)); // repeat execution
        }
        for (std::size_t i = 1; i < outputs.size(); ++i)
            if (outputs[i] != outputs.front()) {
                c.check(false, std::string("run bytes changed for strategy ") +
                                   strategy_name(strategy));
                break;
            }
    }
    return std::nullopt;
}

// --- criterion 8: strategy order relationships ------------------------------

std::vector<std::string> distinct_doc_order(const std::vector<RunEntry>& run) {
    std::vector<std::string> order;
    for (const RunEntry& entry : run)
        if (order.empty() || order.back() != entry.doc_id)
            order.push_back(entry.doc_id);
    return order;
}

std::vector<std::string> filtered(const std::vector<std::string>& order,
                                  const std::vector<std::string>& keep) {
    std::set<std::string> wanted(keep.begin(), keep.end());
    std::vector<std::string> out;
    for (const std::string& doc_id : order)
        if (wanted.count(doc_id))
            out.push_back(doc_id);
    return out;
}

std::optional<std::string> order_relationships(Checker& c) {
    Corpus corpus = fixtures::build_mini_corpus();
    FullTextIndex index = build_fulltext_index(corpus);
    std::vector<std::string> storage_order;
    for (const Document& doc : corpus.documents())
        storage_order.push_back(doc.doc_id);

    for (const CasTopic& topic : fixtures::mini_topics()) {
        TopicQuery query = make_topic_query(topic);
        std::vector<RunEntry> fulltext = run_fulltext(query, index);
        std::vector<RunEntry> native = run_native(query, corpus);
        std::vector<RunEntry> hybrid = run_hybrid(query, corpus, index);

        std::vector<std::string> hybrid_docs = distinct_doc_order(hybrid);
        std::vector<std::string> native_docs = distinct_doc_order(native);
        c.check(hybrid_docs == filtered(distinct_doc_order(fulltext), hybrid_docs),
                "hybrid must visit articles in full-text order (topic " +
                    std::to_string(topic.topic_id) + ")");
        c.check(native_docs == filtered(storage_order, native_docs),
                "native must visit articles in storage order (topic " +
                    std::to_string(topic.topic_id) + ")");

        std::map<std::string, std::multiset<std::string>> native_paths, hybrid_paths;
        for (const RunEntry& entry : native)
            native_paths[entry.doc_id].insert(entry.path.render());
        for (const RunEntry& entry : hybrid)
            hybrid_paths[entry.doc_id].insert(entry.path.render());
        c.check(native_paths == hybrid_paths,
                "native and hybrid must carry identical per-article entries (topic " +
                    std::to_string(topic.topic_id) + ")");
    }
    return std::nullopt;
}

// --- criterion 9: collection trend ordering (opt-in) ------------------------

std::optional<std::string> collection_trend(Checker& c) {
    const char* dir = std::getenv("CASRET_INEX_DIR");
    if (dir == nullptr || *dir == '\0')
        return "set CASRET_INEX_DIR to a directory holding corpus/, topics/ and "
               "assessments.tsv to enable this check";

    try {
        std::filesystem::path root(dir);
        Corpus corpus = ingest_corpus_dir(root / "corpus");
        FullTextIndex index = build_fulltext_index(corpus);
        std::vector<Assessment> assessments = load_assessments(root / "assessments.tsv");

        std::vector<TopicQuery> topics;
        for (const CasTopic& topic : load_topics_dir(root / "topics")) {
            try {
                topics.push_back(make_topic_query(topic));
            } catch (const UnsupportedQueryError&) {
                // out-of-scope construct; evaluated engines skip it uniformly
            }
        }
        if (topics.empty()) {
            c.check(false, "no usable topics under " + root.string());
            return std::nullopt;
        }

        std::map<Strategy, double> means;
        std::ostringstream summary;
        for (Strategy strategy : {Strategy::Fulltext, Strategy::Native, Strategy::NativeCre,
                                  Strategy::Hybrid, Strategy::HybridCre}) {
            std::vector<RunEntry> run = execute_strategy(strategy, topics, &corpus, &index);
            EvalReport report = evaluate_runs(run, assessments, Quantisation::strict());
            if (!report.all.has_value()) {
                c.check(false, std::string("no evaluable topics for strategy ") +
                                   strategy_name(strategy));
                return std::nullopt;
            }
            means[strategy] = report.all->mean;
            summary << ' ' << strategy_name(strategy) << '=' << std::setprecision(4)
                    << report.all->mean;
        }
        std::cout << "    strict means:" << summary.str() << '\n';
        c.check(means[Strategy::HybridCre] > means[Strategy::Hybrid],
                "hybrid-cre must beat hybrid");
        c.check(means[Strategy::Hybrid] > means[Strategy::Fulltext],
                "hybrid must beat fulltext");
        c.check(means[Strategy::Fulltext] > means[Strategy::NativeCre],
                "fulltext must beat native-cre");
        c.check(means[Strategy::NativeCre] > means[Strategy::Native],
                "native-cre must beat native");
    } catch (const std::exception& err) {
        c.check(false, std::string("collection check failed: ") + err.what());
    }
    return std::nullopt;
}

struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<std::optional<std::string>(Checker&)> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"golden branching-sections ranking", 1.0, golden_ranking},
        {"single-match special case", 1.0, single_match},
        {"coherent-element oracle equivalence", 30.0, cre_oracle},
        {"AND/OR merge semantics", 5.0, merge_semantics},
        {"pivoted-cosine scoring", 5.0, pivoted_scoring},
        {"average-precision oracle", 10.0, ap_oracle},
        {"end-to-end determinism", 10.0, determinism},
        {"strategy order relationships", 10.0, order_relationships},
        {"collection trend ordering (opt-in)", 600.0, collection_trend},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& criterion = criteria[i];
        Checker checker;
        std::optional<std::string> skipped;
        const auto start = std::chrono::steady_clock::now();
        try {
            skipped = criterion.body(checker);
        } catch (const std::exception& err) {
            checker.check(false, std::string("unexpected exception: ") + err.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.limit_seconds)
            checker.check(false, "exceeded the " + std::to_string(criterion.limit_seconds) +
                                     "s time budget");

        std::cout << "criterion " << (i + 1) << " (" << criterion.name << "): ";
        if (skipped.has_value()) {
            std::cout << "SKIP — " << *skipped << '\n';
        } else if (checker.failures.empty()) {
            std::cout << "PASS [" << std::fixed << std::setprecision(2) << elapsed << "s]\n";
            std::cout.unsetf(std::ios::fixed);
        } else {
            ++failed;
            std::cout << "FAIL [" << std::fixed << std::setprecision(2) << elapsed << "s]\n";
            std::cout.unsetf(std::ios::fixed);
            for (const std::string& failure : checker.failures)
                std::cout << "    - " << failure << '\n';
        }
    }
    if (failed != 0) {
        std::cout << failed << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
