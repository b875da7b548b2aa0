#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "metrica/metrica.hpp"

using namespace metrica;
namespace fs = std::filesystem;

namespace {

std::string sonnet_tei(const std::string& id, int lines, bool skip_third_met = false)
{
    std::string doc = "<?xml version=\"1.0\"?>\n<TEI xmlns=\"http://www.tei-c.org/ns/1.0\">\n"
                      "<teiHeader><fileDesc><publicationStmt><idno>"
        + id + "</idno></publicationStmt></fileDesc></teiHeader>\n<text><body><lg type=\"sonnet\">\n";
    for (int i = 1; i <= lines; ++i) {
        doc += "<l n=\"" + std::to_string(i) + "\"";
        if (!(skip_third_met && i == 3))
            doc += " met=\"+--+---+-+-\"";
        doc += ">verso número " + std::to_string(i) + "</l>\n";
    }
    return doc + "</lg></body></text>\n</TEI>\n";
}

CorpusLine line(std::string poem, int n, std::string text, std::string pattern = "-+---+---+-")
{
    return {std::move(poem), n, std::move(text), MetricalPattern(std::move(pattern)), false};
}

} // namespace

TEST(NormalizeMet, FixedPointsAndEndingRules)
{
    EXPECT_EQ(normalize_met("+--+---+-+-").str(), "+--+---+-+-");
    EXPECT_EQ(normalize_met("-+---+---+").str(), "-+---+---+-");
    EXPECT_EQ(normalize_met("-+---+---+--").str(), "-+---+---+-");
    EXPECT_EQ(normalize_met("01000100010").str(), "-+---+---+-");
    EXPECT_EQ(normalize_met(" -+---+---+- ").str(), "-+---+---+-");
}

TEST(NormalizeMet, RejectsOtherShapes)
{
    for (const char* bad : {"+-+", "", "-----------", "-+---+---+---", "-+---+---+-+", "-+-x-+---+-", "-+---+----"}) {
        try {
            normalize_met(bad);
            ADD_FAILURE() << "accepted '" << bad << "'";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::UnnormalizableMet) << bad;
        }
    }
}

TEST(ParseTei, OneSonnetGivesFourteenLines)
{
    const auto r = parse_tei_string(sonnet_tei("garcilaso-23", 14), "fallback");
    ASSERT_EQ(r.lines.size(), 14u);
    EXPECT_EQ(r.lines.front().poem_id, "garcilaso-23");
    EXPECT_EQ(r.lines.front().line_no, 1);
    EXPECT_EQ(r.lines.back().line_no, 14);
    EXPECT_EQ(r.lines.back().text, "verso número 14");
    EXPECT_TRUE(r.warnings.empty());
}

TEST(ParseTei, ExampleLineGold)
{
    const auto r = parse_tei_string(
        "<TEI><text><body><l met=\"+--+---+-+-\">cubra de nieve la hermosa cumbre.</l></body></text></TEI>", "p");
    ASSERT_EQ(r.lines.size(), 1u);
    EXPECT_EQ(r.lines[0].gold.str(), "+--+---+-+-");
    EXPECT_EQ(r.lines[0].poem_id, "p");
}

TEST(ParseTei, MissingMetIsSkippedWithWarning)
{
    const auto r = parse_tei_string(sonnet_tei("x", 14, true), "x");
    EXPECT_EQ(r.lines.size(), 13u);
    EXPECT_EQ(r.missing_met, 1u);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("x:3"), std::string::npos);
}

TEST(ParseTei, ManualFlagAndEntities)
{
    const auto r = parse_tei_string("<TEI><teiHeader><note type=\"annotation\">manual</note></teiHeader>"
                                    "<text><l met=\"-+---+---+-\">a &amp; b &#241;</l><!-- c --></text></TEI>",
        "p");
    ASSERT_EQ(r.lines.size(), 1u);
    EXPECT_TRUE(r.lines[0].manual);
    EXPECT_EQ(r.lines[0].text, "a & b ñ");
}

TEST(ParseTei, MalformedXmlReportsLine)
{
    try {
        parse_tei_string("<TEI>\n<text>\n<l met=\"+\">x</text></TEI>", "p");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedXml);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    EXPECT_THROW(parse_tei_string("<TEI><l met='x'>", "p"), Error);
    EXPECT_THROW(parse_tei_string("", "p"), Error);
}

TEST(ParseTei, CorpusWithSeveralPoems)
{
    std::ostringstream out;
    write_tei(out, {line("a", 1, "uno"), line("a", 2, "dos"), line("b", 1, "tres")});
    const auto r = parse_tei_string(out.str(), "corpus");
    ASSERT_EQ(r.lines.size(), 3u);
    EXPECT_EQ(r.lines[2].poem_id, "b");
}

TEST(ParseTei, DirectoryAndMissingDirectory)
{
    const fs::path dir = fs::temp_directory_path() / "metrica_tei_dir_test";
    fs::remove_all(dir);
    fs::create_directories(dir / "sub");
    std::ofstream(dir / "b.xml") << sonnet_tei("b", 2);
    std::ofstream(dir / "sub" / "a.xml") << sonnet_tei("a", 3);
    std::ofstream(dir / "notes.txt") << "ignored";
    const auto r = parse_tei_directory(dir);
    EXPECT_EQ(r.lines.size(), 5u);
    EXPECT_EQ(r.lines.front().poem_id, "b"); // "b.xml" sorts before "sub/a.xml"
    fs::remove_all(dir);
    try {
        parse_tei_directory(dir);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Io);
    }
}

TEST(DedupeAndClean, KeepsFirstAndStripsPunctuation)
{
    auto out = dedupe_and_clean({line("a", 1, "¡Oh dulces prendas...!"), line("a", 2, "Oh, dulces prendas"), line("b", 1, "otra")});
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].text, "oh dulces prendas");
    EXPECT_EQ(out[0].line_no, 1);
    EXPECT_EQ(out[1].text, "otra");

    std::vector<CorpusLine> clean{line("a", 1, "uno"), line("a", 2, "dos")};
    EXPECT_EQ(dedupe_and_clean(clean), clean);
}

TEST(Split, AllTrainRatio)
{
    std::vector<CorpusLine> lines;
    for (int p = 0; p < 5; ++p)
        for (int i = 1; i <= 3; ++i)
            lines.push_back(line("p" + std::to_string(p), i, "p" + std::to_string(p) + " l" + std::to_string(i)));
    const auto s = split(lines, {1.0, 0.0, 0.0}, 7);
    EXPECT_EQ(s.train.size(), lines.size());
    EXPECT_TRUE(s.eval.empty());
    EXPECT_TRUE(s.test.empty());
}

TEST(Split, KeepsPoemsTogetherAndIsDeterministic)
{
    std::vector<CorpusLine> lines;
    for (int p = 0; p < 40; ++p)
        for (int i = 1; i <= 14; ++i)
            lines.push_back(line("poem" + std::to_string(p), i, std::to_string(p) + "/" + std::to_string(i)));
    const auto a = split(lines, default_split_ratios, 42);
    const auto b = split(lines, default_split_ratios, 42);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    std::set<std::string> train_poems, test_poems;
    for (const auto& l : a.train)
        train_poems.insert(l.poem_id);
    for (const auto& l : a.test)
        test_poems.insert(l.poem_id);
    for (const auto& p : test_poems)
        EXPECT_FALSE(train_poems.contains(p));
    // within one poem of the requested share
    EXPECT_NEAR(static_cast<double>(a.train.size()), 0.646 * 560, 14.0);
    EXPECT_NEAR(static_cast<double>(a.eval.size()), 0.216 * 560, 14.0);
    EXPECT_NEAR(static_cast<double>(a.test.size()), 0.138 * 560, 14.0);
}

TEST(Split, ErrorsOnBadRatiosOrTooFewPoems)
{
    std::vector<CorpusLine> two{line("a", 1, "x"), line("b", 1, "y")};
    try {
        split(two, default_split_ratios, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
    }
    EXPECT_THROW(split(two, {0.5, 0.2, 0.2}, 1), Error);
    EXPECT_THROW(split(two, {1.2, -0.1, -0.1}, 1), Error);
}

TEST(Tsv, RoundTripWithManualFlag)
{
    std::vector<CorpusLine> lines{line("a", 1, "uno dos"), line("a", 2, "tres")};
    lines[1].manual = true;
    std::stringstream buf;
    write_tsv(buf, lines);
    EXPECT_EQ(read_tsv(buf), lines);
    EXPECT_EQ(only_manual(lines).size(), 1u);
}

TEST(Tsv, RejectsMalformedRows)
{
    std::istringstream short_row("a\t1\tuno\n");
    EXPECT_THROW(read_tsv(short_row), Error);
    std::istringstream bad_no("a\tx\tuno\t-+---+---+-\n");
    EXPECT_THROW(read_tsv(bad_no), Error);
    EXPECT_THROW(read_tsv(fs::path("/nonexistent/gold.tsv")), Error);
}

TEST(BundledGold, WellFormed)
{
    const auto gold = read_tsv(fs::path(METRICA_DATA_DIR "/mini_gold.tsv"));
    EXPECT_GE(gold.size(), 50u);
    std::set<std::pair<std::string, int>> ids;
    for (const auto& l : gold) {
        EXPECT_EQ(l.gold.size(), 11u);
        EXPECT_TRUE(ids.insert({l.poem_id, l.line_no}).second) << l.poem_id << ":" << l.line_no;
    }
}
