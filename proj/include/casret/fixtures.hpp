#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "casret/corpus.hpp"
#include "casret/cre.hpp"
#include "casret/element_path.hpp"
#include "casret/topic.hpp"

namespace casret::fixtures {

/// FNV-1a 64-bit digest; pins fixture bytes so accidental edits fail loudly.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

// ---------------------------------------------------------------------------
// Golden coherent-element case
// ---------------------------------------------------------------------------

/// A hand-checked input/output pair for the coherent-element ranker.
struct GoldenCreCase {
    std::string name;
    std::string provenance;
    std::string doc_id;
    std::vector<ElementPath> matching_paths;
    std::vector<RankedCre> expected_ranking; // under the sec-class target scope
};

/// Nine leaf matches spread over four sections of one article. The branching
/// sections rank sec[2] (four matches), then sec[1] over sec[3] (two matches
/// each, earlier section wins); bdy[1] branches too but fails the sec-class
/// granularity filter, and sec[4] holds only one match so it is no coherent
/// element at all.
inline GoldenCreCase branching_sections_case() {
    GoldenCreCase golden;
    golden.name = "branching-sections";
    golden.provenance = "hand-checked worked example for article ic/2000/w6074";
    golden.doc_id = "ic/2000/w6074";
    for (const char* text : {
             "/article[1]/bdy[1]/sec[1]/ip1[1]",
             "/article[1]/bdy[1]/sec[1]/p[2]",
             "/article[1]/bdy[1]/sec[2]/ip1[1]",
             "/article[1]/bdy[1]/sec[2]/p[2]",
             "/article[1]/bdy[1]/sec[2]/p[5]",
             "/article[1]/bdy[1]/sec[2]/p[6]",
             "/article[1]/bdy[1]/sec[3]/ip1[1]",
             "/article[1]/bdy[1]/sec[3]/p[2]",
             "/article[1]/bdy[1]/sec[4]/p[3]",
         })
        golden.matching_paths.push_back(ElementPath::parse(text));
    golden.expected_ranking = {
        {1, ElementPath::parse("/article[1]/bdy[1]/sec[2]")},
        {2, ElementPath::parse("/article[1]/bdy[1]/sec[1]")},
        {3, ElementPath::parse("/article[1]/bdy[1]/sec[3]")},
    };
    return golden;
}

// ---------------------------------------------------------------------------
// Synthetic mini corpus
// ---------------------------------------------------------------------------
//
// Ten small articles with fully known term placements. The query themes:
//   - "fusion reactors"      (topic 201, target //article)
//   - "solar sail propulsion" (topic 202, target //sec)
//   - "ion thruster"         (topic 203, target //article//p)
//
// d01  all three sail terms present but split between front and body: the
//      only AND-minimal element is the whole article.
// d02  noise; contains no query term of any topic.
// d03  sail terms split across two sections: AND-minimal element is bdy.
// d04  the branching workhorse; its sail-term leaves reproduce the golden
//      case's nine-path shape exactly (no "propulsion" anywhere, so AND
//      fails and the merged list is the OR list).
// d05  one paragraph holding all three sail terms under sec/ss1/ss2:
//      exercises equivalence tags and nested target matches.
// d06  long fusion article, both fusion terms several times.
// d07  a single paragraph mentions "sail": the one-match special case whose
//      lone path then fails the sec-class granularity filter.
// d08  short fusion article that outscores d06 under pivoted ranking while
//      following it in storage order.
// d09  ion/thruster spread over three paragraphs; only p[3] holds both.
// d10  one paragraph with both ion terms (one-match case that passes the
//      p-granularity filter) plus "fusion" without "reactors" (an OR-only
//      article match) and "propulsion" only in the front matter.

inline const std::vector<std::string>& mini_doc_ids() {
    static const std::vector<std::string> ids = {"d01", "d02", "d03", "d04", "d05",
                                                 "d06", "d07", "d08", "d09", "d10"};
    return ids;
}

inline std::string_view mini_document_xml(std::string_view doc_id) {
    if (doc_id == "d01")
        return R"(<article>
  <fm>
    <ti>Photon pressure</ti>
    <abs>Momentum transfer from solar photons.</abs>
  </fm>
  <bdy>
    <sec>
      <st>Background</st>
      <p>A sail large enough converts light pressure into propulsion.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d02")
        return R"(<article>
  <fm>
    <ti>Coffee roasting</ti>
  </fm>
  <bdy>
    <sec>
      <st>Beans</st>
      <p>Grinding beans evenly matters more than the roast curve.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d03")
        return R"(<article>
  <fm>
    <ti>Sail craft</ti>
  </fm>
  <bdy>
    <sec>
      <st>Power</st>
      <p>Solar flux provides steady propulsion thrust.</p>
    </sec>
    <sec>
      <st>Rigging</st>
      <p>The sail membrane unfurls from a spool.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d04")
        return R"(<article>
  <fm>
    <ti>Deployment studies</ti>
  </fm>
  <bdy>
    <sec>
      <ip1>Solar arrays shade the hull.</ip1>
      <p>Mounting brackets and torque limits.</p>
      <p>The sail boom extends aft.</p>
    </sec>
    <sec>
      <ip1>Solar wind gusts complicate steering.</ip1>
      <p>Telemetry cadence doubles during manoeuvres.</p>
      <p>A sail panel flexes under load.</p>
      <p>Ground rehearsal notes follow.</p>
      <p>Thermal soak margins stay positive.</p>
      <p>Solar tracking resumes after eclipse.</p>
      <p>The sail tension settles within an hour.</p>
    </sec>
    <sec>
      <ip1>Sail stowage volume is tight.</ip1>
      <p>Crew checklist revisions pending.</p>
      <p>Solar exposure timing is critical.</p>
    </sec>
    <sec>
      <p>Battery swap procedure unchanged.</p>
      <p>Antenna gimbal rates nominal.</p>
      <p>Solar flare advisories continue.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d05")
        return R"(<article>
  <fm>
    <ti>Mission notes</ti>
  </fm>
  <bdy>
    <sec>
      <st>Subsystems</st>
      <ss1>
        <st>Sail module</st>
        <ss2>
          <st>Detail</st>
          <p>Solar sail propulsion in one line.</p>
        </ss2>
      </ss1>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d06")
        return R"(<article>
  <fm>
    <ti>Fusion reactors survey</ti>
    <abs>Reactors confining plasma by magnetic fields.</abs>
  </fm>
  <bdy>
    <sec>
      <st>Tokamaks</st>
      <p>Toroidal fusion reactors sustain long pulses.</p>
      <p>Divertor plates absorb heat loads from the plasma edge region.</p>
    </sec>
    <sec>
      <st>Stellarators</st>
      <p>Twisted coils shape the confinement volume without driven current.</p>
      <p>Optimised stellarator reactors promise steady operation in future fusion plants.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d07")
        return R"(<article>
  <fm>
    <ti>Rigging anecdotes</ti>
  </fm>
  <bdy>
    <sec>
      <st>Stories</st>
      <p>The sail ripped during the regatta.</p>
      <p>We rowed home instead.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d08")
        return R"(<article>
  <fm>
    <ti>Compact fusion</ti>
  </fm>
  <bdy>
    <sec>
      <p>Small fusion reactors fit on trucks.</p>
      <p>Fusion reactors heat spacecraft bays.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d09")
        return R"(<article>
  <fm>
    <ti>Electric propulsion lab</ti>
  </fm>
  <bdy>
    <sec>
      <st>Gridded designs</st>
      <p>Xenon ion beams neutralise downstream.</p>
      <p>A hall thruster erodes its channel walls.</p>
      <p>The ion thruster throttles smoothly.</p>
    </sec>
  </bdy>
</article>
)";
    if (doc_id == "d10")
        return R"(<article>
  <fm>
    <ti>Propulsion miscellany</ti>
  </fm>
  <bdy>
    <sec>
      <st>Notes</st>
      <p>An ion thruster hums on the bench.</p>
    </sec>
    <sec>
      <st>Asides</st>
      <p>Cold fusion claims resurface periodically.</p>
    </sec>
  </bdy>
</article>
)";
    throw std::invalid_argument("unknown mini-corpus doc_id \"" + std::string(doc_id) + "\"");
}

inline const std::vector<int>& mini_topic_ids() {
    static const std::vector<int> ids = {201, 202, 203};
    return ids;
}

inline std::string_view mini_topic_xml(int topic_id) {
    switch (topic_id) {
    case 201:
        return R"(<inex_topic topic_id="201">
  <title>//article[about(., 'fusion reactors')]</title>
  <description>Articles about fusion reactor technology.</description>
  <narrative>Relevant articles discuss the design or operation of fusion reactors.</narrative>
  <keywords>fusion, reactors, plasma</keywords>
</inex_topic>
)";
    case 202:
        return R"(<inex_topic topic_id="202">
  <title>//sec[about(., 'solar sail propulsion')]</title>
  <description>Sections covering solar sail propulsion.</description>
  <narrative>Relevant sections describe propelling spacecraft with solar sails.</narrative>
  <keywords>solar, sail, propulsion</keywords>
</inex_topic>
)";
    case 203:
        return R"(<inex_topic topic_id="203">
  <title>//article//p[about(., 'ion thruster')]</title>
  <description>Paragraphs mentioning ion thrusters.</description>
  <narrative>Relevant paragraphs describe ion thruster behaviour or use.</narrative>
  <keywords>ion, thruster</keywords>
</inex_topic>
)";
    default:
        throw std::invalid_argument("unknown mini-corpus topic " + std::to_string(topic_id));
    }
}

/// Graded judgments for the mini corpus, exercising matched and unmatched
/// entries and both quantisations.
inline std::string_view mini_assessments_tsv() {
    return R"(# topic_id	doc_id	path	exhaustiveness	specificity
201	d06	/article[1]	3	3
201	d08	/article[1]	2	3
201	d10	/article[1]	1	1
201	d02	/article[1]	0	0
202	d04	/article[1]/bdy[1]/sec[2]	3	3
202	d04	/article[1]/bdy[1]/sec[1]	2	2
202	d05	/article[1]/bdy[1]/sec[1]/ss1[1]	3	3
202	d01	/article[1]	3	1
202	d07	/article[1]/bdy[1]/sec[1]	1	2
202	d03	/article[1]/bdy[1]	2	3
203	d09	/article[1]/bdy[1]/sec[1]/p[3]	3	3
203	d10	/article[1]/bdy[1]/sec[1]/p[1]	3	3
203	d09	/article[1]/bdy[1]/sec[1]/p[1]	1	2
203	d09	/article[1]/bdy[1]/sec[1]/p[2]	1	1
)";
}

/// The default interchangeable-tag table, as a loadable configuration file.
inline std::string_view default_equivalence_file() {
    return R"(# one equivalence class per line, tags whitespace-separated
sec ss1 ss2
)";
}

/// An alternate table that additionally folds ip1 into the paragraph class;
/// used to exercise configuration loading.
inline std::string_view alternate_equivalence_file() {
    return R"(sec ss1 ss2
p ip1
)";
}

inline Corpus build_mini_corpus() {
    Corpus corpus;
    for (const std::string& doc_id : mini_doc_ids())
        corpus.add(parse_document(mini_document_xml(doc_id), doc_id));
    return corpus;
}

inline std::vector<CasTopic> mini_topics() {
    std::vector<CasTopic> topics;
    for (int id : mini_topic_ids())
        topics.push_back(parse_topic(mini_topic_xml(id)));
    return topics;
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write fixture file " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("failed writing fixture file " + path.string());
}

} // namespace detail

/// Materialise the fixture set as plain files:
///   <dir>/corpus/dNN.xml, <dir>/topics/topic_NNN.xml,
///   <dir>/assessments.tsv, <dir>/equivalence.txt, <dir>/equivalence_alt.txt
inline void write_fixture_tree(const std::filesystem::path& dir) {
    for (const std::string& doc_id : mini_doc_ids())
        detail::write_text_file(dir / "corpus" / (doc_id + ".xml"), mini_document_xml(doc_id));
    for (int id : mini_topic_ids())
        detail::write_text_file(dir / "topics" / ("topic_" + std::to_string(id) + ".xml"),
                                mini_topic_xml(id));
    detail::write_text_file(dir / "assessments.tsv", mini_assessments_tsv());
    detail::write_text_file(dir / "equivalence.txt", default_equivalence_file());
    detail::write_text_file(dir / "equivalence_alt.txt", alternate_equivalence_file());
}

} // namespace casret::fixtures
