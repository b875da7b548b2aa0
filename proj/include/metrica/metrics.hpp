#pragma once

// Exact-match evaluation of metrical patterns.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "metrica/corpus.hpp"
#include "metrica/error.hpp"
#include "metrica/pattern.hpp"

namespace metrica {

inline bool line_exact_match(const MetricalPattern& predicted, const MetricalPattern& gold)
{
    if (predicted.size() != hendecasyllable_length || gold.size() != hendecasyllable_length)
        throw Error(ErrorCode::LengthMismatch,
            "comparing '" + predicted.str() + "' with '" + gold.str() + "': both must have 11 positions");
    return predicted == gold;
}

struct EvalPair {
    std::optional<MetricalPattern> predicted; // empty when the system produced nothing
    MetricalPattern gold;
    std::string text;
};

struct ErrorExample {
    std::string text;
    std::string gold;
    std::string predicted;
};

struct EvalReport {
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0; // percent
    std::array<double, hendecasyllable_length> per_position_accuracy{};
    std::vector<ErrorExample> error_examples;
    std::size_t unmatched_gold = 0;
    std::size_t unmatched_predictions = 0;
};

inline constexpr std::size_t default_error_example_cap = 50;

inline EvalReport evaluate(const std::vector<EvalPair>& pairs, std::size_t max_examples = default_error_example_cap)
{
    if (pairs.empty())
        throw Error(ErrorCode::EmptyInput, "nothing to evaluate");
    EvalReport report;
    std::array<std::size_t, hendecasyllable_length> hits{};
    for (const auto& pair : pairs) {
        if (pair.gold.size() != hendecasyllable_length)
            throw Error(ErrorCode::LengthMismatch, "gold pattern '" + pair.gold.str() + "' is not 11 positions");
        bool match = false;
        if (pair.predicted) {
            match = line_exact_match(*pair.predicted, pair.gold);
            for (std::size_t i = 0; i < hendecasyllable_length; ++i)
                hits[i] += (*pair.predicted)[i] == pair.gold[i];
        }
        ++report.total;
        if (match) {
            ++report.correct;
        } else if (report.error_examples.size() < max_examples) {
            report.error_examples.push_back(
                {pair.text, pair.gold.str(), pair.predicted ? pair.predicted->str() : std::string("(none)")});
        }
    }
    const auto total = static_cast<double>(report.total);
    report.accuracy = 100.0 * static_cast<double>(report.correct) / total;
    for (std::size_t i = 0; i < hendecasyllable_length; ++i)
        report.per_position_accuracy[i] = static_cast<double>(hits[i]) / total;
    return report;
}

/// Joins a prediction file to gold lines. Rows of `poem_id<TAB>line_no<TAB>pattern`
/// (or full gold-format rows) are matched by id; bare one-pattern rows are matched by order. Gold lines
/// without a prediction count as errors.
inline EvalReport score_predictions(std::istream& in, const std::vector<CorpusLine>& gold)
{
    struct Row {
        std::vector<std::string> fields;
        std::size_t number;
    };
    std::vector<Row> rows;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        if (raw.empty() || raw[0] == '#')
            continue;
        rows.push_back({split_tabs(raw), number});
    }
    const bool keyed = !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.fields.size() >= 3; });
    auto parse_pattern = [](const Row& r, const std::string& s) {
        try {
            return normalize_met(s);
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidArgument, "prediction row " + std::to_string(r.number) + ": " + e.what());
        }
    };

    std::vector<EvalPair> pairs;
    EvalReport extra;
    if (keyed) {
        std::map<std::pair<std::string, int>, MetricalPattern> predicted;
        for (const auto& r : rows) {
            auto line_no = detail::parse_positive(r.fields[1]);
            if (!line_no)
                throw Error(ErrorCode::InvalidArgument, "prediction row " + std::to_string(r.number) + ": bad line number");
            // a full gold-format row carries its pattern in the fourth column
            const auto& symbols = r.fields.size() >= 4 ? r.fields[3] : r.fields[2];
            predicted.insert_or_assign({r.fields[0], *line_no}, parse_pattern(r, symbols));
        }
        std::size_t matched = 0;
        for (const auto& g : gold) {
            auto it = predicted.find({g.poem_id, g.line_no});
            if (it == predicted.end()) {
                ++extra.unmatched_gold;
                pairs.push_back({std::nullopt, g.gold, g.text});
            } else {
                ++matched;
                pairs.push_back({it->second, g.gold, g.text});
            }
        }
        extra.unmatched_predictions = predicted.size() - matched;
    } else {
        if (rows.size() != gold.size())
            throw Error(ErrorCode::AlignmentError,
                std::to_string(rows.size()) + " prediction(s) for " + std::to_string(gold.size())
                    + " gold line(s) and no ids to align them");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].fields.size() != 1)
                throw Error(ErrorCode::AlignmentError, "prediction row " + std::to_string(rows[i].number)
                        + " mixes keyed and bare formats");
            pairs.push_back({parse_pattern(rows[i], rows[i].fields[0]), gold[i].gold, gold[i].text});
        }
    }
    EvalReport report = evaluate(pairs);
    report.unmatched_gold = extra.unmatched_gold;
    report.unmatched_predictions = extra.unmatched_predictions;
    return report;
}

inline EvalReport score_predictions_file(const std::filesystem::path& path, const std::vector<CorpusLine>& gold)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open predictions '" + path.string() + "'");
    return score_predictions(in, gold);
}

inline std::string format_percent(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

inline nlohmann::json to_json(const EvalReport& r)
{
    nlohmann::json errors = nlohmann::json::array();
    for (const auto& e : r.error_examples)
        errors.push_back({{"text", e.text}, {"gold", e.gold}, {"predicted", e.predicted}});
    return {
        {"total", r.total},
        {"correct", r.correct},
        {"accuracy", r.accuracy},
        {"accuracy_display", format_percent(r.accuracy)},
        {"per_position_accuracy", r.per_position_accuracy},
        {"unmatched_gold", r.unmatched_gold},
        {"unmatched_predictions", r.unmatched_predictions},
        {"error_examples", errors},
    };
}

inline void print_report(std::ostream& out, const EvalReport& r)
{
    out << "lines:     " << r.total << "\n";
    out << "correct:   " << r.correct << "\n";
    out << "accuracy:  " << format_percent(r.accuracy) << "\n";
    out << "per position:";
    for (double p : r.per_position_accuracy)
        out << ' ' << format_percent(100.0 * p);
    out << "\n";
    if (r.unmatched_gold || r.unmatched_predictions)
        out << "unmatched: " << r.unmatched_gold << " gold, " << r.unmatched_predictions << " prediction(s)\n";
    if (!r.error_examples.empty()) {
        out << "errors (first " << r.error_examples.size() << "):\n";
        for (const auto& e : r.error_examples)
            out << "  " << e.gold << "  " << e.predicted << "  " << e.text << "\n";
    }
}

} // namespace metrica
