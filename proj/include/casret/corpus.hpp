#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casret/xml.hpp"

namespace casret {

/// Article store. Storage order — the order the native strategy iterates —
/// is always lexicographic in doc_id, whatever order documents are added
/// in, so runs never depend on filesystem enumeration order.
class Corpus {
public:
    void add(Document doc) {
        if (doc.doc_id.empty())
            throw std::invalid_argument("doc_id must be non-empty");
        if (doc.doc_id.find_first_of(" \t\r\n") != std::string::npos)
            throw std::invalid_argument("doc_id must not contain whitespace: \"" + doc.doc_id +
                                        "\"");
        auto pos = std::lower_bound(docs_.begin(), docs_.end(), doc.doc_id,
                                    [](const Document& d, const std::string& id) {
                                        return d.doc_id < id;
                                    });
        if (pos != docs_.end() && pos->doc_id == doc.doc_id)
            throw std::invalid_argument("duplicate doc_id \"" + doc.doc_id + "\"");
        docs_.insert(pos, std::move(doc));
    }

    const std::vector<Document>& documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

    const Document* find(const std::string& doc_id) const {
        auto pos = std::lower_bound(docs_.begin(), docs_.end(), doc_id,
                                    [](const Document& d, const std::string& id) {
                                        return d.doc_id < id;
                                    });
        return pos != docs_.end() && pos->doc_id == doc_id ? &*pos : nullptr;
    }

    const Document& at(const std::string& doc_id) const {
        const Document* doc = find(doc_id);
        if (!doc)
            throw std::invalid_argument("unknown doc_id \"" + doc_id + "\"");
        return *doc;
    }

private:
    std::vector<Document> docs_; // kept sorted by doc_id
};

namespace detail {

inline std::string doc_id_for(const std::filesystem::path& file,
                              const std::filesystem::path& root) {
    std::filesystem::path rel = std::filesystem::relative(file, root);
    rel.replace_extension();
    return rel.generic_string();
}

inline Document parse_document_file(const std::filesystem::path& file, std::string doc_id,
                                    const XmlParseOptions& options) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_document(buffer.str(), std::move(doc_id), options);
    } catch (const XmlParseError& e) {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
}

} // namespace detail

/// Recursively ingests every .xml file under `root`. doc_id is the relative
/// path without the extension ("ic/2000/w6074"); storage order is
/// lexicographic over doc_ids so ingestion is deterministic.
inline Corpus ingest_corpus_dir(const std::filesystem::path& root,
                                const XmlParseOptions& options = {}) {
    if (!std::filesystem::is_directory(root))
        throw std::runtime_error("corpus directory not found: " + root.string());
    std::vector<std::pair<std::string, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
            files.emplace_back(detail::doc_id_for(entry.path(), root), entry.path());
    }
    if (files.empty())
        throw std::runtime_error("no .xml files under " + root.string());
    std::sort(files.begin(), files.end());
    Corpus corpus;
    for (auto& [doc_id, file] : files)
        corpus.add(detail::parse_document_file(file, doc_id, options));
    return corpus;
}

/// Writes the storage-order manifest: one doc_id per line.
inline void write_manifest(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    for (const Document& doc : corpus.documents())
        out << doc.doc_id << '\n';
}

inline std::vector<std::string> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open manifest " + path.string());
    std::vector<std::string> doc_ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            doc_ids.push_back(line);
    }
    return doc_ids;
}

/// Reloads the manifest's documents; storage order stays canonical
/// (lexicographic doc_id) whatever order the manifest lists them in.
inline Corpus load_corpus_from_manifest(const std::filesystem::path& corpus_root,
                                        const std::vector<std::string>& manifest,
                                        const XmlParseOptions& options = {}) {
    Corpus corpus;
    for (const std::string& doc_id : manifest) {
        std::filesystem::path file = corpus_root / (doc_id + ".xml");
        corpus.add(detail::parse_document_file(file, doc_id, options));
    }
    return corpus;
}

} // namespace casret
