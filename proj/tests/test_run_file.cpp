#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "casret/run_file.hpp"

using casret::ElementPath;
using casret::RunEntry;

namespace {

RunEntry entry(int topic, int rank, const char* doc, const char* path,
               std::optional<double> score = std::nullopt) {
    return RunEntry{topic, rank, doc, ElementPath::parse(path), score};
}

std::string write_to_string(const std::vector<RunEntry>& entries) {
    std::ostringstream out;
    casret::write_run_file(out, entries);
    return out.str();
}

} // namespace

TEST_CASE("run files round-trip") {
    std::vector<RunEntry> entries = {
        entry(201, 1, "d06", "/article[1]", 0.75),
        entry(201, 2, "d08", "/article[1]", 0.5),
        entry(202, 1, "d04", "/article[1]/bdy[1]/sec[2]"),
    };
    std::string text = write_to_string(entries);
    CHECK(text == "topic_id\trank\tdoc_id\tpath\tscore\n"
                  "201\t1\td06\t/article[1]\t0.75\n"
                  "201\t2\td08\t/article[1]\t0.5\n"
                  "202\t1\td04\t/article[1]/bdy[1]/sec[2]\t\n");

    std::istringstream in(text);
    CHECK(casret::read_run_file(in) == entries);
}

TEST_CASE("score rendering is stable and precise") {
    std::vector<RunEntry> entries = {entry(1, 1, "d", "/a[1]", 0.5868000972390733)};
    std::string text = write_to_string(entries);
    CHECK(text.find("0.586800097239") != std::string::npos);

    std::istringstream in(text);
    std::vector<RunEntry> back = casret::read_run_file(in);
    REQUIRE(back.size() == 1);
    REQUIRE(back[0].score.has_value());
    CHECK_THAT(*back[0].score, Catch::Matchers::WithinAbs(0.5868000972390733, 1e-12));
}

TEST_CASE("rank contiguity is enforced") {
    SECTION("gap within a topic") {
        CHECK_THROWS_WITH(write_to_string({entry(1, 1, "d", "/a[1]"), entry(1, 3, "d", "/b[1]")}),
                          Catch::Matchers::ContainsSubstring("expected rank 2"));
    }
    SECTION("first rank must be 1") {
        CHECK_THROWS(write_to_string({entry(1, 2, "d", "/a[1]")}));
    }
    SECTION("duplicate rank") {
        CHECK_THROWS(write_to_string({entry(1, 1, "d", "/a[1]"), entry(1, 1, "e", "/a[1]")}));
    }
    SECTION("topics may interleave") {
        CHECK_NOTHROW(write_to_string({entry(1, 1, "d", "/a[1]"), entry(2, 1, "d", "/a[1]"),
                                       entry(1, 2, "e", "/a[1]"), entry(2, 2, "e", "/a[1]")}));
    }
}

TEST_CASE("reader validation") {
    SECTION("empty input") {
        std::istringstream in("");
        CHECK_THROWS_WITH(casret::read_run_file(in),
                          Catch::Matchers::ContainsSubstring("missing header"));
    }
    SECTION("header mismatch") {
        std::istringstream in("topic\trank\n1\t1\n");
        CHECK_THROWS_WITH(casret::read_run_file(in),
                          Catch::Matchers::ContainsSubstring("header mismatch"));
    }
    SECTION("header only is a valid empty run") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\n");
        CHECK(casret::read_run_file(in).empty());
    }
    SECTION("wrong field count") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\n1\t1\td\n");
        CHECK_THROWS_WITH(casret::read_run_file(in),
                          Catch::Matchers::ContainsSubstring("expected 5 fields"));
    }
    SECTION("bad integer fields") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\nX\t1\td\t/a[1]\t\n");
        CHECK_THROWS_WITH(casret::read_run_file(in),
                          Catch::Matchers::ContainsSubstring("invalid topic_id"));
        std::istringstream in2("topic_id\trank\tdoc_id\tpath\tscore\n1\t1.5\td\t/a[1]\t\n");
        CHECK_THROWS_WITH(casret::read_run_file(in2),
                          Catch::Matchers::ContainsSubstring("invalid rank"));
    }
    SECTION("empty doc_id") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\n1\t1\t\t/a[1]\t\n");
        CHECK_THROWS_WITH(casret::read_run_file(in),
                          Catch::Matchers::ContainsSubstring("empty doc_id"));
    }
    SECTION("bad path") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\n1\t1\td\ta[1]\t\n");
        CHECK_THROWS(casret::read_run_file(in));
    }
    SECTION("bad score") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\n1\t1\td\t/a[1]\t1.5x\n");
        CHECK_THROWS_WITH(casret::read_run_file(in),
                          Catch::Matchers::ContainsSubstring("invalid score"));
    }
    SECTION("rank gap caught at read time") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\n"
                              "1\t1\td\t/a[1]\t\n"
                              "1\t3\td\t/b[1]\t\n");
        CHECK_THROWS_WITH(casret::read_run_file(in),
                          Catch::Matchers::ContainsSubstring("expected rank 2"));
    }
    SECTION("CRLF and trailing blank lines tolerated") {
        std::istringstream in("topic_id\trank\tdoc_id\tpath\tscore\r\n"
                              "1\t1\td\t/a[1]\t0.5\r\n"
                              "\n");
        std::vector<RunEntry> entries = casret::read_run_file(in);
        REQUIRE(entries.size() == 1);
        CHECK(entries[0] == entry(1, 1, "d", "/a[1]", 0.5));
    }
}
