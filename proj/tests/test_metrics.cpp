#include <gtest/gtest.h>

#include <sstream>

#include "metrica/metrica.hpp"

using namespace metrica;

namespace {

MetricalPattern P(const char* s) { return MetricalPattern(s); }

std::vector<CorpusLine> gold_lines()
{
    return {
        {"a", 1, "uno", P("-+---+---+-"), false},
        {"a", 2, "dos", P("+--+---+-+-"), false},
        {"b", 1, "tres", P("--+--+---+-"), false},
    };
}

} // namespace

TEST(ExactMatch, StrictAndLengthChecked)
{
    EXPECT_TRUE(line_exact_match(P("+--+---+-+-"), P("+--+---+-+-")));
    EXPECT_FALSE(line_exact_match(P("+--+---+-+-"), P("+--+---+--+")));
    try {
        line_exact_match(P("+--+---+-+"), P("+--+---+-+-"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
    }
}

TEST(Pattern, RejectsBadSymbols)
{
    EXPECT_THROW(MetricalPattern("-----------"), Error);
    EXPECT_THROW(MetricalPattern("-+-x"), Error);
    EXPECT_FALSE(MetricalPattern::try_make("").has_value());
    EXPECT_TRUE(MetricalPattern::try_make("+").has_value());
}

TEST(Evaluate, HalfCorrect)
{
    std::vector<EvalPair> pairs{
        {P("-+---+---+-"), P("-+---+---+-"), "a"},
        {P("+--+---+-+-"), P("+--+---+-+-"), "b"},
        {P("+--+---+-+-"), P("-+---+---+-"), "c"},
        {std::nullopt, P("-+---+---+-"), "d"},
    };
    const auto r = evaluate(pairs);
    EXPECT_EQ(r.total, 4u);
    EXPECT_EQ(r.correct, 2u);
    EXPECT_DOUBLE_EQ(r.accuracy, 50.0);
    EXPECT_EQ(format_percent(r.accuracy), "50.00");
    ASSERT_EQ(r.error_examples.size(), 2u);
    EXPECT_EQ(r.error_examples[1].predicted, "(none)");
}

TEST(Evaluate, AllCorrect)
{
    std::vector<EvalPair> pairs{{P("-+---+---+-"), P("-+---+---+-"), ""}, {P("+--+---+-+-"), P("+--+---+-+-"), ""}};
    const auto r = evaluate(pairs);
    EXPECT_EQ(format_percent(r.accuracy), "100.00");
    for (double p : r.per_position_accuracy)
        EXPECT_DOUBLE_EQ(p, 1.0);
}

TEST(Evaluate, DifferOnlyAtOnePosition)
{
    // the sixth position (index 5) flips in every pair
    std::vector<EvalPair> pairs{{P("-+-------+-"), P("-+---+---+-"), ""}, {P("+--+-+-+-+-"), P("+--+---+-+-"), ""}};
    const auto r = evaluate(pairs);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.0);
    for (std::size_t i = 0; i < 11; ++i)
        EXPECT_DOUBLE_EQ(r.per_position_accuracy[i], i == 5 ? 0.0 : 1.0) << i;
}

TEST(Evaluate, EmptyInputAndExampleCap)
{
    try {
        evaluate({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
    std::vector<EvalPair> wrong(80, EvalPair{P("+----------"), P("-+---+---+-"), "x"});
    EXPECT_EQ(evaluate(wrong).error_examples.size(), default_error_example_cap);
    EXPECT_EQ(evaluate(wrong, 3).error_examples.size(), 3u);
}

TEST(ScorePredictions, KeyedBareAndGoldFormat)
{
    const auto gold = gold_lines();
    std::istringstream keyed("b\t1\t--+--+---+-\na\t1\t-+---+---+-\na\t2\t+--+---+-+-\n");
    EXPECT_DOUBLE_EQ(score_predictions(keyed, gold).accuracy, 100.0);

    std::istringstream bare("-+---+---+-\n+--+---+-+-\n--+--+---+\n");
    EXPECT_DOUBLE_EQ(score_predictions(bare, gold).accuracy, 100.0);

    std::stringstream full;
    write_tsv(full, gold);
    EXPECT_DOUBLE_EQ(score_predictions(full, gold).accuracy, 100.0);
}

TEST(ScorePredictions, MissingAndExtraKeyedRows)
{
    std::istringstream keyed("a\t1\t-+---+---+-\nz\t9\t-+---+---+-\n");
    const auto r = score_predictions(keyed, gold_lines());
    EXPECT_EQ(r.correct, 1u);
    EXPECT_EQ(r.unmatched_gold, 2u);
    EXPECT_EQ(r.unmatched_predictions, 1u);
}

TEST(ScorePredictions, MisalignedBareFileFails)
{
    std::istringstream bare("-+---+---+-\n+--+---+-+-\n");
    try {
        score_predictions(bare, gold_lines());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AlignmentError);
    }
    std::istringstream garbage("a\t1\tnot-a-pattern\n");
    EXPECT_THROW(score_predictions(garbage, gold_lines()), Error);
}

TEST(Report, TextAndJsonForms)
{
    std::vector<EvalPair> pairs{{P("-+---+---+-"), P("-+---+---+-"), "a"}, {P("+--+---+-+-"), P("-+---+---+-"), "b"}};
    const auto r = evaluate(pairs);
    std::ostringstream text;
    print_report(text, r);
    EXPECT_NE(text.str().find("accuracy:  50.00"), std::string::npos);
    const auto j = to_json(r);
    EXPECT_EQ(j["correct"], 1);
    EXPECT_EQ(j["accuracy_display"], "50.00");
    EXPECT_EQ(j["per_position_accuracy"].size(), 11u);
}
