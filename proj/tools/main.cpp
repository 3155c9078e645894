// casret — content-and-structure retrieval over XML article collections.
//
// Subcommands:
//   index       ingest a corpus directory, build and store the full-text index
//   run         execute one retrieval strategy over a topic directory
//   eval        score a run file against graded assessments
//   cre-filter  re-rank externally produced match lists (stdin -> stdout)

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casret/corpus.hpp"
#include "casret/cre.hpp"
#include "casret/eval.hpp"
#include "casret/fulltext.hpp"
#include "casret/pipeline.hpp"
#include "casret/run_file.hpp"
#include "casret/structural.hpp"
#include "casret/tokenize.hpp"
#include "casret/topic.hpp"

namespace {

namespace fs = std::filesystem;

struct IndexMeta {
    fs::path corpus_root;
    bool lenient_entities = false;
};

constexpr const char* kManifestFile = "manifest.txt";
constexpr const char* kIndexFile = "fulltext.idx";
constexpr const char* kMetaFile = "meta.txt";

void write_meta(const fs::path& index_dir, const IndexMeta& meta) {
    std::ofstream out(index_dir / kMetaFile, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + (index_dir / kMetaFile).string());
    out << "corpus_root\t" << meta.corpus_root.generic_string() << '\n';
    out << "lenient_entities\t" << (meta.lenient_entities ? 1 : 0) << '\n';
}

IndexMeta read_meta(const fs::path& index_dir) {
    fs::path path = index_dir / kMetaFile;
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string() +
                                 " (is this an index directory produced by `index`?)");
    IndexMeta meta;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            continue;
        std::string key = line.substr(0, tab);
        std::string value = line.substr(tab + 1);
        if (key == "corpus_root")
            meta.corpus_root = fs::path(value);
        else if (key == "lenient_entities")
            meta.lenient_entities = (value == "1");
    }
    if (meta.corpus_root.empty())
        throw std::runtime_error(path.string() + ": missing corpus_root entry");
    return meta;
}

std::unordered_set<std::string> read_stopwords(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open stopword file " + path.string());
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        for (const std::string& token : casret::tokenize(line))
            words.insert(token);
    }
    return words;
}

casret::EquivalenceClasses load_equivalence(const std::string& file) {
    if (file.empty())
        return casret::EquivalenceClasses::defaults();
    return casret::EquivalenceClasses::load(file);
}

/// Topics whose titles parse; unsupported ones are reported and skipped so
/// one exotic topic does not sink a whole batch.
std::vector<casret::TopicQuery> usable_topics(const std::vector<casret::CasTopic>& topics) {
    std::vector<casret::TopicQuery> queries;
    for (const casret::CasTopic& topic : topics) {
        try {
            queries.push_back(casret::make_topic_query(topic));
        } catch (const casret::UnsupportedQueryError& err) {
            std::cerr << "warning: topic " << topic.topic_id << " skipped: " << err.what()
                      << '\n';
        }
    }
    return queries;
}

int cmd_index(const std::string& corpus_dir, const std::string& out_dir, bool stem,
              const std::string& stopwords_file, bool lenient) {
    casret::XmlParseOptions parse_options;
    parse_options.lenient_entities = lenient;
    casret::Corpus corpus = casret::ingest_corpus_dir(corpus_dir, parse_options);

    casret::TokenizeOptions tokenizer;
    tokenizer.stem = stem;
    if (!stopwords_file.empty())
        tokenizer.stopwords = read_stopwords(stopwords_file);

    casret::FullTextIndex index = casret::build_fulltext_index(corpus, tokenizer);

    fs::create_directories(out_dir);
    casret::write_manifest(corpus, fs::path(out_dir) / kManifestFile);
    casret::save_index(index, fs::path(out_dir) / kIndexFile);
    write_meta(out_dir, {fs::absolute(corpus_dir), lenient});

    std::cout << "indexed " << index.doc_count() << " articles, " << index.postings.size()
              << " distinct terms, " << index.total_tokens << " tokens\n";
    return 0;
}

int cmd_run(const std::string& strategy_name, const std::string& topics_dir,
            const std::string& index_dir, int k, double slope, const std::string& equiv_file,
            bool prefer_deeper, const std::string& out_file) {
    casret::Strategy strategy = casret::parse_strategy(strategy_name);

    casret::RetrievalConfig config;
    config.k = k;
    config.slope = slope;
    config.equivalence = load_equivalence(equiv_file);
    config.cre.prefer_deeper = prefer_deeper;

    std::vector<casret::TopicQuery> topics =
        usable_topics(casret::load_topics_dir(topics_dir));
    if (topics.empty())
        throw std::runtime_error("no usable topics under " + topics_dir);

    IndexMeta meta = read_meta(index_dir);

    std::optional<casret::FullTextIndex> index;
    if (casret::strategy_needs_index(strategy))
        index = casret::load_index(fs::path(index_dir) / kIndexFile);

    std::optional<casret::Corpus> corpus;
    if (casret::strategy_needs_corpus(strategy)) {
        casret::XmlParseOptions parse_options;
        parse_options.lenient_entities = meta.lenient_entities;
        corpus = casret::load_corpus_from_manifest(
            meta.corpus_root, casret::read_manifest(fs::path(index_dir) / kManifestFile),
            parse_options);
    }

    std::vector<casret::RunEntry> entries = casret::execute_strategy(
        strategy, topics, corpus ? &*corpus : nullptr, index ? &*index : nullptr, config);
    casret::write_run_file(fs::path(out_file), entries);

    std::cout << "wrote " << entries.size() << " entries for " << topics.size()
              << " topics to " << out_file << '\n';
    return 0;
}

int cmd_eval(const std::string& run_file, const std::string& assessments_file,
             const std::string& quantisation_name, const std::string& category,
             const std::string& topics_dir, const std::string& out_file) {
    std::vector<casret::RunEntry> run = casret::read_run_file(fs::path(run_file));
    std::vector<casret::Assessment> assessments =
        casret::load_assessments(fs::path(assessments_file));
    casret::Quantisation q = quantisation_name == "strict" ? casret::Quantisation::strict()
                                                           : casret::Quantisation::generalised();

    std::map<int, casret::TopicCategory> category_map;
    if (!topics_dir.empty()) {
        for (const casret::CasTopic& topic : casret::load_topics_dir(topics_dir)) {
            try {
                category_map[topic.topic_id] =
                    casret::categorize(casret::parse_title(topic.title_expr));
            } catch (const casret::UnsupportedQueryError&) {
                // unsupported titles stay uncategorised
            }
        }
    }

    if (category != "all") {
        if (category_map.empty())
            throw std::runtime_error("--category " + category +
                                     " needs --topics to categorise topics");
        casret::TopicCategory wanted = category == "article" ? casret::TopicCategory::Article
                                                             : casret::TopicCategory::Specific;
        std::vector<casret::RunEntry> sliced;
        for (casret::RunEntry& entry : run) {
            auto it = category_map.find(entry.topic_id);
            if (it != category_map.end() && it->second == wanted)
                sliced.push_back(std::move(entry));
        }
        run = std::move(sliced);
    }

    casret::EvalReport report = casret::evaluate_runs(run, assessments, q, category_map);
    casret::write_report(std::cout, report);
    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write report file " + out_file);
        casret::write_report_tsv(out, report);
    }
    return 0;
}

int cmd_cre_filter(const std::string& target, const std::string& equiv_file,
                   bool prefer_deeper) {
    casret::TargetScope scope =
        target.empty() ? casret::TargetScope::any()
                       : casret::TargetScope::for_target(target, load_equivalence(equiv_file));
    casret::CreOptions options;
    options.prefer_deeper = prefer_deeper;
    casret::cre_filter_stream(std::cin, std::cout, scope, options);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"content-and-structure retrieval over XML article collections"};
    app.require_subcommand(1);

    auto* index_cmd =
        app.add_subcommand("index", "ingest a corpus directory and build the full-text index");
    std::string corpus_dir, index_out;
    bool stem = false, lenient = false;
    std::string stopwords_file;
    index_cmd->add_option("corpus_dir", corpus_dir, "directory of .xml articles")
        ->required()
        ->check(CLI::ExistingDirectory);
    index_cmd->add_option("--out", index_out, "index directory to create")->required();
    index_cmd->add_flag("--stem", stem, "apply plural-stripping stemming");
    index_cmd->add_option("--stopwords", stopwords_file, "stopword list, one word per line")
        ->check(CLI::ExistingFile);
    index_cmd->add_flag("--lenient-entities", lenient,
                        "pass unknown XML entities through instead of failing");

    auto* run_cmd = app.add_subcommand("run", "execute a retrieval strategy over a topic set");
    std::string strategy, topics_dir, run_index_dir, run_out, run_equiv;
    int k = 100;
    double slope = 0.25;
    bool run_prefer_deeper = false;
    run_cmd
        ->add_option("--strategy", strategy,
                     "fulltext, native, native-cre, hybrid or hybrid-cre")
        ->required()
        ->check(CLI::IsMember({"fulltext", "native", "native-cre", "hybrid", "hybrid-cre"}));
    run_cmd->add_option("--topics", topics_dir, "directory of topic .xml files")
        ->required()
        ->check(CLI::ExistingDirectory);
    run_cmd->add_option("--index", run_index_dir, "index directory from `index`")
        ->required()
        ->check(CLI::ExistingDirectory);
    run_cmd->add_option("--k", k, "answer-list cap per topic")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run_cmd->add_option("--slope", slope, "pivoted normalisation slope in [0,1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    run_cmd->add_option("--equiv", run_equiv, "equivalence-class file (default: sec ss1 ss2)")
        ->check(CLI::ExistingFile);
    run_cmd->add_flag("--cre-prefer-deeper", run_prefer_deeper,
                      "prefer deeper coherent elements over shallower ones");
    run_cmd->add_option("--out", run_out, "run file to write")->required();

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a run file against assessments");
    std::string eval_run, eval_assessments, quantisation = "strict", eval_category = "all";
    std::string eval_topics, eval_out;
    eval_cmd->add_option("--run", eval_run, "run file from `run`")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--assessments", eval_assessments, "graded assessments TSV")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--quantisation", quantisation, "strict or generalised")
        ->check(CLI::IsMember({"strict", "generalised"}))
        ->capture_default_str();
    eval_cmd->add_option("--category", eval_category, "slice topics: all, article or specific")
        ->check(CLI::IsMember({"all", "article", "specific"}))
        ->capture_default_str();
    eval_cmd
        ->add_option("--topics", eval_topics,
                     "topic directory (enables per-category means and slicing)")
        ->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--out", eval_out, "also write a machine-readable TSV report here");

    auto* filter_cmd = app.add_subcommand(
        "cre-filter", "read doc_id<TAB>path records on stdin, write ranked coherent elements");
    std::string filter_target, filter_equiv;
    bool filter_prefer_deeper = false;
    filter_cmd->add_option("--target", filter_target,
                           "granularity tag (expanded by equivalence classes); "
                           "omit to keep every coherent element");
    filter_cmd->add_option("--equiv", filter_equiv,
                           "equivalence-class file (default: sec ss1 ss2)")
        ->check(CLI::ExistingFile);
    filter_cmd->add_flag("--prefer-deeper", filter_prefer_deeper,
                         "prefer deeper coherent elements over shallower ones");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*index_cmd)
            return cmd_index(corpus_dir, index_out, stem, stopwords_file, lenient);
        if (*run_cmd)
            return cmd_run(strategy, topics_dir, run_index_dir, k, slope, run_equiv,
                           run_prefer_deeper, run_out);
        if (*eval_cmd)
            return cmd_eval(eval_run, eval_assessments, quantisation, eval_category, eval_topics,
                            eval_out);
        if (*filter_cmd)
            return cmd_cre_filter(filter_target, filter_equiv, filter_prefer_deeper);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
