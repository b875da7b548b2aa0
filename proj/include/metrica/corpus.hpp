#pragma once

// Gold corpus ingestion (TEI-XML and canonical TSV), cleaning and splitting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "metrica/error.hpp"
#include "metrica/pattern.hpp"
#include "metrica/phonology.hpp"
#include "metrica/xml.hpp"

namespace metrica {

struct CorpusLine {
    std::string poem_id;
    int line_no = 1;
    std::string text;
    MetricalPattern gold;
    bool manual = false;

    friend bool operator==(const CorpusLine&, const CorpusLine&) = default;
};

/// Brings a raw met annotation to exactly 11 positions. Accepts {+,-} or
/// {1,0}; a 10-symbol oxytone line gains a trailing '-', a 12-symbol
/// proparoxytone line loses one of its two trailing '-'.
inline MetricalPattern normalize_met(std::string_view raw)
{
    std::string s;
    for (char32_t c : utf8::decode(raw)) {
        if (utf8::is_space(c))
            continue;
        if (c == U'+' || c == U'1')
            s.push_back('+');
        else if (c == U'-' || c == U'0' || c == U'−' || c == U'–')
            s.push_back('-');
        else
            throw Error(ErrorCode::UnnormalizableMet, "unexpected symbol in met '" + std::string(raw) + "'");
    }
    const std::size_t n = hendecasyllable_length;
    if (s.size() == n - 1 && s.back() == '+')
        s.push_back('-');
    else if (s.size() == n + 1 && s.ends_with("--"))
        s.pop_back();
    if (s.size() != n)
        throw Error(ErrorCode::UnnormalizableMet, "met '" + std::string(raw) + "' cannot be brought to 11 positions");
    auto pattern = MetricalPattern::try_make(s);
    if (!pattern)
        throw Error(ErrorCode::UnnormalizableMet, "met '" + std::string(raw) + "' has no stressed position");
    return *pattern;
}

struct TeiParseResult {
    std::vector<CorpusLine> lines;
    std::size_t missing_met = 0;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string collapse_whitespace(std::string_view s)
{
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

inline bool marks_manual(const xml::Element& el)
{
    for (const char* key : {"ana", "resp", "type"}) {
        if (auto v = el.attribute(key); v && v->find("manual") != std::string::npos)
            return true;
    }
    return false;
}

inline std::optional<int> parse_positive(const std::optional<std::string>& s)
{
    if (!s || s->empty())
        return std::nullopt;
    int v = 0;
    for (char c : *s) {
        if (c < '0' || c > '9')
            return std::nullopt;
        v = v * 10 + (c - '0');
        if (v > 10'000'000)
            return std::nullopt;
    }
    return v >= 1 ? std::optional<int>(v) : std::nullopt;
}

inline void collect_poem(const xml::Element& tei, const std::string& fallback_id, TeiParseResult& out)
{
    std::string poem_id = tei.attribute("xml:id").value_or("");
    bool header_manual = false;
    const xml::Element* text_root = nullptr;
    for (const auto& child : tei.children) {
        const auto* e = std::get_if<std::unique_ptr<xml::Element>>(&child);
        if (!e)
            continue;
        const xml::Element& el = **e;
        if (el.local_name() == "teiHeader") {
            el.for_each_element([&](const xml::Element& h) {
                if (poem_id.empty() && h.local_name() == "idno")
                    poem_id = collapse_whitespace(h.text());
                if (marks_manual(h) || collapse_whitespace(h.text()) == "manual")
                    header_manual = true;
            });
        } else if (el.local_name() == "text") {
            text_root = &el;
        }
    }
    if (poem_id.empty())
        poem_id = fallback_id;
    if (!text_root)
        text_root = &tei;

    int running = 0;
    auto visit = [&](const xml::Element& el, bool inherited_manual, auto&& self) -> void {
        bool manual = inherited_manual || marks_manual(el);
        if (el.local_name() == "l") {
            ++running;
            int line_no = parse_positive(el.attribute("n")).value_or(running);
            std::string text = collapse_whitespace(el.text());
            auto met = el.attribute("met");
            if (!met || met->empty()) {
                ++out.missing_met;
                out.warnings.push_back(poem_id + ":" + std::to_string(line_no) + ": missing met, line skipped");
                return;
            }
            try {
                out.lines.push_back({poem_id, line_no, std::move(text), normalize_met(*met), manual});
            } catch (const Error& e) {
                out.warnings.push_back(poem_id + ":" + std::to_string(line_no) + ": " + e.what());
            }
            return;
        }
        for (const auto& child : el.children)
            if (const auto* e = std::get_if<std::unique_ptr<xml::Element>>(&child))
                self(**e, manual, self);
    };
    visit(*text_root, header_manual || marks_manual(tei), visit);
}

} // namespace detail

/// Parses TEI markup held in memory. Each <TEI> element is one poem; a
/// document without one is treated as a single poem named `fallback_id`.
inline TeiParseResult parse_tei_string(std::string_view document, const std::string& fallback_id)
{
    auto root = xml::parse(document);
    TeiParseResult out;
    std::vector<const xml::Element*> poems;
    if (root->local_name() == "TEI") {
        poems.push_back(root.get());
    } else {
        root->for_each_element([&](const xml::Element& el) {
            if (el.local_name() == "TEI")
                poems.push_back(&el);
        });
    }
    if (poems.empty()) {
        detail::collect_poem(*root, fallback_id, out);
    } else {
        for (std::size_t i = 0; i < poems.size(); ++i) {
            std::string id = poems.size() == 1 ? fallback_id : fallback_id + "#" + std::to_string(i + 1);
            detail::collect_poem(*poems[i], id, out);
        }
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline TeiParseResult parse_tei(const std::filesystem::path& path)
{
    return parse_tei_string(read_file(path), path.stem().string());
}

/// Parses every *.xml file under a directory, in sorted path order.
inline TeiParseResult parse_tei_directory(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw Error(ErrorCode::Io, "'" + dir.string() + "' is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    TeiParseResult all;
    for (const auto& f : files) {
        auto part = parse_tei(f);
        all.missing_met += part.missing_met;
        std::move(part.lines.begin(), part.lines.end(), std::back_inserter(all.lines));
        std::move(part.warnings.begin(), part.warnings.end(), std::back_inserter(all.warnings));
    }
    return all;
}

/// Writes lines as a TEI corpus, one <TEI> per poem in first-seen order.
inline void write_tei(std::ostream& out, const std::vector<CorpusLine>& lines)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<const CorpusLine*>> by_poem;
    for (const auto& line : lines) {
        auto& bucket = by_poem[line.poem_id];
        if (bucket.empty())
            order.push_back(line.poem_id);
        bucket.push_back(&line);
    }
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<teiCorpus xmlns=\"http://www.tei-c.org/ns/1.0\">\n";
    for (const auto& id : order) {
        out << "  <TEI xml:id=\"" << xml::escape(id) << "\">\n";
        out << "    <teiHeader><fileDesc><titleStmt><title>" << xml::escape(id)
            << "</title></titleStmt></fileDesc></teiHeader>\n";
        out << "    <text><body><lg>\n";
        for (const auto* line : by_poem[id]) {
            out << "      <l n=\"" << line->line_no << "\" met=\"" << line->gold.str() << "\"";
            if (line->manual)
                out << " ana=\"#manual\"";
            out << ">" << xml::escape(line->text) << "</l>\n";
        }
        out << "    </lg></body></text>\n  </TEI>\n";
    }
    out << "</teiCorpus>\n";
}

/// Strips punctuation and case from each text and keeps the first of any
/// lines whose cleaned text repeats. Lines that clean to nothing are dropped.
inline std::vector<CorpusLine> dedupe_and_clean(std::vector<CorpusLine> lines)
{
    std::vector<CorpusLine> out;
    std::unordered_set<std::string> seen;
    for (auto& line : lines) {
        line.text = clean_line(line.text);
        if (line.text.empty() || !seen.insert(line.text).second)
            continue;
        out.push_back(std::move(line));
    }
    return out;
}

struct CorpusSplit {
    std::vector<CorpusLine> train;
    std::vector<CorpusLine> eval;
    std::vector<CorpusLine> test;
    std::uint64_t seed = 0;
    std::array<double, 3> ratios{};
};

/// 6,558 / 2,187 / 1,401 lines of the reference experiment.
inline constexpr std::array<double, 3> default_split_ratios{0.646, 0.216, 0.138};

namespace detail {

/// Uniform index in [0, n) with rejection sampling, so results do not depend
/// on the standard library's distribution implementation.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n)
{
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

} // namespace detail

/// Shuffles poems with the seed and deals them greedily to the set furthest
/// below its line quota. Poems are never split across sets.
inline CorpusSplit split(const std::vector<CorpusLine>& lines, std::array<double, 3> ratios, std::uint64_t seed)
{
    double sum = 0.0;
    for (double r : ratios) {
        if (r < 0.0 || !std::isfinite(r))
            throw Error(ErrorCode::InvalidArgument, "split ratios must be non-negative");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "split ratios must sum to 1");

    std::vector<std::string> poems;
    std::map<std::string, std::vector<const CorpusLine*>> by_poem;
    for (const auto& line : lines) {
        auto& bucket = by_poem[line.poem_id];
        if (bucket.empty())
            poems.push_back(line.poem_id);
        bucket.push_back(&line);
    }
    const auto active = static_cast<std::size_t>(std::count_if(ratios.begin(), ratios.end(), [](double r) { return r > 0.0; }));
    if (poems.size() < active)
        throw Error(ErrorCode::InsufficientData,
            std::to_string(poems.size()) + " poem(s) cannot fill " + std::to_string(active) + " sets");

    std::mt19937_64 rng(seed);
    detail::shuffle(poems, rng);

    CorpusSplit out;
    out.seed = seed;
    out.ratios = ratios;
    std::array<std::vector<CorpusLine>*, 3> sets{&out.train, &out.eval, &out.test};
    const double total = static_cast<double>(lines.size());
    for (const auto& id : poems) {
        std::size_t pick = 0;
        double best_deficit = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < 3; ++s) {
            if (ratios[s] <= 0.0)
                continue;
            double deficit = ratios[s] * total - static_cast<double>(sets[s]->size());
            if (deficit > best_deficit) {
                best_deficit = deficit;
                pick = s;
            }
        }
        for (const auto* line : by_poem[id])
            sets[pick]->push_back(*line);
    }
    return out;
}

/// Canonical TSV: poem_id, line_no, text, pattern, and a fifth "manual"
/// column only on manually annotated lines.
inline void write_tsv(std::ostream& out, const std::vector<CorpusLine>& lines)
{
    for (const auto& line : lines) {
        std::string text = line.text;
        std::replace(text.begin(), text.end(), '\t', ' ');
        out << line.poem_id << '\t' << line.line_no << '\t' << text << '\t' << line.gold.str() << (line.manual ? "\tmanual\n" : "\n");
    }
}

inline std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos)
            return fields;
        start = tab + 1;
    }
}

inline std::vector<CorpusLine> read_tsv(std::istream& in)
{
    std::vector<CorpusLine> lines;
    std::string row;
    std::size_t row_no = 0;
    while (std::getline(in, row)) {
        ++row_no;
        if (!row.empty() && row.back() == '\r')
            row.pop_back();
        if (row.empty() || row[0] == '#')
            continue;
        auto f = split_tabs(row);
        if (f.size() < 4)
            throw Error(ErrorCode::InvalidArgument, "TSV row " + std::to_string(row_no) + " needs 4 fields");
        auto line_no = detail::parse_positive(f[1]);
        if (!line_no)
            throw Error(ErrorCode::InvalidArgument, "TSV row " + std::to_string(row_no) + ": bad line number");
        lines.push_back({f[0], *line_no, f[2], normalize_met(f[3]), f.size() > 4 && f[4] == "manual"});
    }
    return lines;
}

inline std::vector<CorpusLine> read_tsv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    return read_tsv(in);
}

inline std::vector<CorpusLine> only_manual(const std::vector<CorpusLine>& lines)
{
    std::vector<CorpusLine> out;
    std::copy_if(lines.begin(), lines.end(), std::back_inserter(out), [](const CorpusLine& l) { return l.manual; });
    return out;
}

} // namespace metrica
