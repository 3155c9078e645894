#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "casret/element_path.hpp"
#include "casret/run_file.hpp"
#include "casret/topic.hpp"

namespace casret {

/// One graded judgment: how exhaustively and how specifically the element
/// answers the topic, each on the 0–3 scale.
struct Assessment {
    int topic_id = 0;
    std::string doc_id;
    ElementPath path;
    int exhaustiveness = 0;
    int specificity = 0;

    bool operator==(const Assessment&) const = default;
};

/// Total mapping from an (exhaustiveness, specificity) grade pair to a
/// scalar gain in [0, 1]. Tables must be monotone non-decreasing in each
/// argument with gain(0,0) = 0 and gain(3,3) = 1.
class Quantisation {
public:
    using Table = std::array<std::array<double, 4>, 4>;

    /// Full credit for (3,3) only.
    static Quantisation strict() {
        Table table{};
        table[3][3] = 1.0;
        return Quantisation("strict", table);
    }

    /// Graded credit. The default table steps by quarters:
    /// (3,3)=1; (2,3)=(3,2)=0.75; (1,3)=(2,2)=(3,1)=0.5;
    /// (1,2)=(2,1)=(1,1)=0.25; any grade of 0 yields 0.
    static Quantisation generalised() {
        Table table{};
        table[3][3] = 1.0;
        table[2][3] = table[3][2] = 0.75;
        table[1][3] = table[2][2] = table[3][1] = 0.5;
        table[1][2] = table[2][1] = table[1][1] = 0.25;
        return Quantisation("generalised", table);
    }

    /// Custom table, validated like the built-ins.
    static Quantisation from_table(std::string name, const Table& table) {
        return Quantisation(std::move(name), table);
    }

    double gain(int exhaustiveness, int specificity) const {
        if (exhaustiveness < 0 || exhaustiveness > 3 || specificity < 0 || specificity > 3)
            throw std::invalid_argument("grades must lie in 0-3, got (" +
                                        std::to_string(exhaustiveness) + ", " +
                                        std::to_string(specificity) + ")");
        return table_[static_cast<std::size_t>(exhaustiveness)]
                     [static_cast<std::size_t>(specificity)];
    }

    double gain(const Assessment& a) const { return gain(a.exhaustiveness, a.specificity); }

    const std::string& name() const { return name_; }

private:
    Quantisation(std::string name, const Table& table) : name_(std::move(name)), table_(table) {
        if (table_[0][0] != 0.0)
            throw std::invalid_argument("quantisation table must map (0,0) to 0");
        if (table_[3][3] != 1.0)
            throw std::invalid_argument("quantisation table must map (3,3) to 1");
        for (int e = 0; e <= 3; ++e) {
            for (int s = 0; s <= 3; ++s) {
                double value = table_[e][s];
                if (value < 0.0 || value > 1.0)
                    throw std::invalid_argument("quantisation gains must lie in [0,1]");
                if (e > 0 && table_[e - 1][s] > value)
                    throw std::invalid_argument(
                        "quantisation table must be monotone in exhaustiveness");
                if (s > 0 && table_[e][s - 1] > value)
                    throw std::invalid_argument(
                        "quantisation table must be monotone in specificity");
            }
        }
    }

    std::string name_;
    Table table_;
};

/// TAB-separated topic_id, doc_id, path, exhaustiveness, specificity.
/// Blank lines and `#` comments are skipped. Duplicate (topic, doc, path)
/// triples are rejected. Result is sorted for deterministic downstream use.
inline std::vector<Assessment> load_assessments(std::istream& in) {
    std::vector<Assessment> assessments;
    std::set<std::tuple<int, std::string, ElementPath>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> fields = detail::split_tab(line);
        if (fields.size() != 5)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 5 fields, found " +
                                     std::to_string(fields.size()));
        Assessment a;
        a.topic_id = detail::parse_int_field(fields[0], "topic_id", line_no);
        a.doc_id = fields[1];
        if (a.doc_id.empty())
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty doc_id");
        try {
            a.path = ElementPath::parse(fields[2]);
        } catch (const std::invalid_argument& err) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + err.what());
        }
        a.exhaustiveness = detail::parse_int_field(fields[3], "exhaustiveness", line_no);
        a.specificity = detail::parse_int_field(fields[4], "specificity", line_no);
        if (a.exhaustiveness < 0 || a.exhaustiveness > 3 || a.specificity < 0 ||
            a.specificity > 3)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": grades must lie in 0-3");
        if (!seen.insert({a.topic_id, a.doc_id, a.path}).second)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": duplicate assessment for topic " +
                                     std::to_string(a.topic_id) + ", " + a.doc_id + ", " +
                                     a.path.render());
        assessments.push_back(std::move(a));
    }
    std::sort(assessments.begin(), assessments.end(), [](const Assessment& x, const Assessment& y) {
        return std::tie(x.topic_id, x.doc_id, x.path) < std::tie(y.topic_id, y.doc_id, y.path);
    });
    return assessments;
}

inline std::vector<Assessment> load_assessments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open assessments file: " + path.string());
    try {
        return load_assessments(in);
    } catch (const std::runtime_error& err) {
        throw std::runtime_error(path.string() + ": " + err.what());
    }
}

/// Sum of quantised gains over every assessment of the topic — the recall
/// base R.
inline double total_relevance(const std::vector<Assessment>& topic_assessments,
                              const Quantisation& q) {
    double total = 0.0;
    for (const Assessment& a : topic_assessments)
        total += q.gain(a);
    return total;
}

/// Per-rank gains of one topic's run slice: the quantised grade of the
/// assessment exactly matching (doc_id, path), else 0. A repeated element
/// earns its gain only at the first occurrence, keeping accumulated gain
/// within the recall base.
inline std::vector<double> topic_gains(const std::vector<RunEntry>& topic_run,
                                       const std::vector<Assessment>& topic_assessments,
                                       const Quantisation& q) {
    std::map<std::pair<std::string, ElementPath>, double> remaining;
    for (const Assessment& a : topic_assessments)
        remaining.emplace(std::make_pair(a.doc_id, a.path), q.gain(a));

    std::vector<double> gains;
    gains.reserve(topic_run.size());
    for (const RunEntry& entry : topic_run) {
        auto it = remaining.find({entry.doc_id, entry.path});
        if (it == remaining.end()) {
            gains.push_back(0.0);
        } else {
            gains.push_back(it->second);
            remaining.erase(it);
        }
    }
    return gains;
}

/// Interpolated average precision over the 100 recall levels 0.01 … 1.00.
///
/// With cumulative gain C_i and precision C_i / i at rank i, the
/// interpolated precision at level t is the maximum precision over ranks
/// whose recall C_i / R reaches t (0 when no rank does), and the result is
/// the mean over the 100 levels. Recall is non-decreasing in rank, so each
/// level's qualifying ranks form a suffix; a suffix-maximum table plus one
/// forward sweep covers all levels, and the threshold test is the
/// cross-multiplied 100·C_i ≥ k·R to avoid dividing per level. Returns
/// nothing when R ≤ 0 (recall undefined).
inline std::optional<double> average_precision(const std::vector<double>& gains, double R) {
    if (R <= 0.0)
        return std::nullopt;

    const std::size_t n = gains.size();
    std::vector<double> cumulative(n, 0.0);
    std::vector<double> precision(n, 0.0);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += gains[i];
        cumulative[i] = running;
        precision[i] = running / static_cast<double>(i + 1);
    }
    std::vector<double> best_from(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;)
        best_from[i] = std::max(precision[i], best_from[i + 1]);

    double sum = 0.0;
    std::size_t i = 0;
    for (int level = 1; level <= 100; ++level) {
        while (i < n && 100.0 * cumulative[i] < static_cast<double>(level) * R)
            ++i;
        if (i == n)
            break; // this and all higher levels are unreachable
        sum += best_from[i];
    }
    return sum / 100.0;
}

/// Convenience overload working directly on a topic's run slice.
inline std::optional<double> average_precision(const std::vector<RunEntry>& topic_run,
                                               const std::vector<Assessment>& topic_assessments,
                                               const Quantisation& q) {
    return average_precision(topic_gains(topic_run, topic_assessments, q),
                             total_relevance(topic_assessments, q));
}

struct TopicEval {
    int topic_id = 0;
    double avg_precision = 0.0;
    std::size_t entries = 0;
    std::optional<TopicCategory> category;
};

struct CategoryMean {
    double mean = 0.0;
    std::size_t topics = 0;
};

struct EvalReport {
    std::string quantisation;
    std::vector<TopicEval> topics;
    std::optional<CategoryMean> all;
    std::optional<CategoryMean> article;
    std::optional<CategoryMean> specific;
    std::vector<std::string> warnings;
};

/// Evaluate every topic present in the run. Topics without assessments, or
/// whose quantised recall base is zero, are skipped with a warning rather
/// than scored. Macro-means cover the evaluated topics; per-category means
/// appear when a non-empty category map is supplied.
inline EvalReport evaluate_runs(const std::vector<RunEntry>& run,
                                const std::vector<Assessment>& assessments,
                                const Quantisation& q,
                                const std::map<int, TopicCategory>& category_map = {}) {
    validate_run(run);

    std::map<int, std::vector<RunEntry>> run_by_topic;
    for (const RunEntry& entry : run)
        run_by_topic[entry.topic_id].push_back(entry);
    std::map<int, std::vector<Assessment>> assessments_by_topic;
    for (const Assessment& a : assessments)
        assessments_by_topic[a.topic_id].push_back(a);

    EvalReport report;
    report.quantisation = q.name();

    double sum_all = 0.0, sum_article = 0.0, sum_specific = 0.0;
    std::size_t n_all = 0, n_article = 0, n_specific = 0;

    for (const auto& [topic_id, topic_run] : run_by_topic) {
        auto judged = assessments_by_topic.find(topic_id);
        if (judged == assessments_by_topic.end()) {
            report.warnings.push_back("topic " + std::to_string(topic_id) +
                                      ": no assessments; skipped");
            continue;
        }
        double R = total_relevance(judged->second, q);
        std::optional<double> ap =
            average_precision(topic_gains(topic_run, judged->second, q), R);
        if (!ap) {
            report.warnings.push_back("topic " + std::to_string(topic_id) +
                                      ": no relevant elements under " + q.name() +
                                      " quantisation; skipped");
            continue;
        }

        TopicEval row;
        row.topic_id = topic_id;
        row.avg_precision = *ap;
        row.entries = topic_run.size();
        if (!category_map.empty()) {
            auto cat = category_map.find(topic_id);
            if (cat == category_map.end()) {
                report.warnings.push_back("topic " + std::to_string(topic_id) +
                                          ": not in the category map; counted in All only");
            } else {
                row.category = cat->second;
            }
        }
        sum_all += row.avg_precision;
        ++n_all;
        if (row.category == TopicCategory::Article) {
            sum_article += row.avg_precision;
            ++n_article;
        } else if (row.category == TopicCategory::Specific) {
            sum_specific += row.avg_precision;
            ++n_specific;
        }
        report.topics.push_back(std::move(row));
    }

    if (n_all > 0)
        report.all = CategoryMean{sum_all / static_cast<double>(n_all), n_all};
    if (n_article > 0)
        report.article = CategoryMean{sum_article / static_cast<double>(n_article), n_article};
    if (n_specific > 0)
        report.specific = CategoryMean{sum_specific / static_cast<double>(n_specific), n_specific};
    return report;
}

namespace detail {

inline const char* category_label(const std::optional<TopicCategory>& category) {
    if (!category)
        return "-";
    return *category == TopicCategory::Article ? "article" : "specific";
}

} // namespace detail

/// Human-readable report table.
inline void write_report(std::ostream& out, const EvalReport& report) {
    out << "quantisation: " << report.quantisation << '\n';
    out << '\n';
    out << "topic    entries  avg_precision  category\n";
    for (const TopicEval& row : report.topics) {
        out << std::left << std::setw(9) << row.topic_id << std::setw(9) << row.entries
            << std::setw(15) << std::fixed << std::setprecision(4) << row.avg_precision
            << detail::category_label(row.category) << '\n';
        out.unsetf(std::ios::floatfield);
    }
    out << '\n';
    auto mean_line = [&](const char* label, const std::optional<CategoryMean>& mean) {
        if (!mean)
            return;
        out << "mean avg_precision (" << label << "): " << std::fixed << std::setprecision(4)
            << mean->mean << "  over " << mean->topics << " topic"
            << (mean->topics == 1 ? "" : "s") << '\n';
        out.unsetf(std::ios::floatfield);
    };
    mean_line("all", report.all);
    mean_line("article", report.article);
    mean_line("specific", report.specific);
    if (!report.all)
        out << "no topics evaluated\n";
    for (const std::string& warning : report.warnings)
        out << "warning: " << warning << '\n';
}

/// Machine-readable report: `topic` rows then `mean` rows, full precision.
inline void write_report_tsv(std::ostream& out, const EvalReport& report) {
    out << "# kind\tkey\tavg_precision\tdetail\n";
    out << "quantisation\t" << report.quantisation << "\t\t\n";
    for (const TopicEval& row : report.topics)
        out << "topic\t" << row.topic_id << '\t' << detail::format_value(row.avg_precision)
            << '\t' << detail::category_label(row.category) << '\n';
    auto mean_row = [&](const char* label, const std::optional<CategoryMean>& mean) {
        if (!mean)
            return;
        out << "mean\t" << label << '\t' << detail::format_value(mean->mean) << '\t'
            << mean->topics << '\n';
    };
    mean_row("all", report.all);
    mean_row("article", report.article);
    mean_row("specific", report.specific);
}

} // namespace casret
