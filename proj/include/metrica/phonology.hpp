#pragma once

// Orthographic syllabification and stress placement for Spanish words.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metrica/error.hpp"
#include "metrica/lexicon.hpp"
#include "metrica/utf8.hpp"

namespace metrica {

struct Word {
    std::string surface;
    std::string normalized;

    friend bool operator==(const Word&, const Word&) = default;
};

/// Phonetic facts about one orthographic syllable that the scansion layer
/// needs for figure detection.
struct SyllableShape {
    bool vowel_onset = false;  // nucleus is the first sound
    bool h_onset = false;      // silent h directly before the nucleus
    bool glide_onset = false;  // hie-, hue-, ie-: consonantal onset, no synalepha
    bool vowel_coda = false;   // ends in a vowel sound (including final y)
    bool glide_coda = false;   // vowel + final y (hoy, muy, voy)
    std::size_t split_at = std::string::npos; // byte offset of a dieresis split
    bool split_stress_right = false;          // stressed half after a dieresis split

    bool has_diphthong() const noexcept { return split_at != std::string::npos; }
    friend bool operator==(const SyllableShape&, const SyllableShape&) = default;
};

/// 1 = oxytone (aguda), 2 = paroxytone (llana), 3 = proparoxytone
/// (esdrújula), 4 = sobresdrújula.
using StressFromEnd = int;

struct SyllabifiedWord {
    Word word;
    std::vector<std::string> syllables;
    std::vector<SyllableShape> shapes;
    StressFromEnd stress_from_end = 1;
    bool prosodic = true;
    /// Syllable index of the stem stress in -mente adverbs.
    std::optional<std::size_t> secondary_stress;

    std::size_t stressed_index() const noexcept { return syllables.size() - static_cast<std::size_t>(stress_from_end); }
};

namespace detail {

enum class SegmentKind { Vowel, Consonant };
enum class VowelClass { Strong, Weak, AccentedWeak, DieresisWeak };

struct Segment {
    SegmentKind kind;
    std::u32string text;
    VowelClass vowel = VowelClass::Strong;

    bool is_vowel() const noexcept { return kind == SegmentKind::Vowel; }
    bool is_h() const noexcept { return kind == SegmentKind::Consonant && text == U"h"; }
};

constexpr bool is_vowel_letter(char32_t c) noexcept
{
    switch (c) {
    case U'a': case U'e': case U'i': case U'o': case U'u':
    case U'á': case U'é': case U'í': case U'ó': case U'ú': case U'ü':
        return true;
    default:
        return false;
    }
}

constexpr bool is_accented(char32_t c) noexcept
{
    return c == U'á' || c == U'é' || c == U'í' || c == U'ó' || c == U'ú';
}

constexpr bool is_front(char32_t c) noexcept { return c == U'e' || c == U'é' || c == U'i' || c == U'í'; }

inline std::vector<Segment> segment(std::u32string_view w)
{
    std::vector<Segment> segs;
    const std::size_t n = w.size();
    std::size_t i = 0;
    while (i < n) {
        char32_t c = w[i];
        char32_t next = i + 1 < n ? w[i + 1] : 0;
        auto consonant = [&](std::size_t len) {
            segs.push_back({SegmentKind::Consonant, std::u32string(w.substr(i, len))});
            i += len;
        };
        if ((c == U'c' && next == U'h') || (c == U'l' && next == U'l') || (c == U'r' && next == U'r')) {
            consonant(2);
        } else if (c == U'q' && next == U'u') {
            consonant(2);
        } else if (c == U'g' && next == U'u' && i + 2 < n && is_front(w[i + 2])) {
            consonant(2);
        } else if (c == U'y') {
            if (i + 1 == n)
                segs.push_back({SegmentKind::Vowel, U"y", VowelClass::Weak}), ++i;
            else
                consonant(1);
        } else if (is_vowel_letter(c)) {
            VowelClass cls;
            switch (c) {
            case U'i': case U'u': cls = VowelClass::Weak; break;
            case U'í': case U'ú': cls = VowelClass::AccentedWeak; break;
            case U'ü': cls = (i > 0 && w[i - 1] == U'g') ? VowelClass::Weak : VowelClass::DieresisWeak; break;
            default: cls = VowelClass::Strong; break;
            }
            segs.push_back({SegmentKind::Vowel, std::u32string(1, c), cls});
            ++i;
        } else {
            consonant(1);
        }
    }
    return segs;
}

inline bool forms_diphthong(const Segment& a, const Segment& b) noexcept
{
    auto blocks = [](VowelClass v) { return v == VowelClass::AccentedWeak || v == VowelClass::DieresisWeak; };
    if (blocks(a.vowel) || blocks(b.vowel))
        return false;
    if (a.vowel == VowelClass::Strong && b.vowel == VowelClass::Strong)
        return false;
    return a.text != b.text;
}

struct Nucleus {
    std::size_t first; // segment indices, inclusive
    std::size_t last;
};

inline std::vector<Nucleus> find_nuclei(const std::vector<Segment>& segs)
{
    std::vector<Nucleus> nuclei;
    std::size_t i = 0;
    while (i < segs.size()) {
        if (!segs[i].is_vowel()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        bool has_strong = segs[i].vowel == VowelClass::Strong;
        for (;;) {
            std::size_t cand = std::string::npos;
            if (j + 1 < segs.size() && segs[j + 1].is_vowel())
                cand = j + 1;
            else if (j + 2 < segs.size() && segs[j + 1].is_h() && segs[j + 2].is_vowel())
                cand = j + 2;
            if (cand == std::string::npos || !forms_diphthong(segs[j], segs[cand]))
                break;
            bool strong = segs[cand].vowel == VowelClass::Strong;
            if (strong && has_strong)
                break;
            has_strong = has_strong || strong;
            j = cand;
        }
        nuclei.push_back({i, j});
        i = j + 1;
    }
    return nuclei;
}

inline bool is_onset_cluster(const Segment& a, const Segment& b) noexcept
{
    if (a.text.size() != 1 || b.text.size() != 1)
        return false;
    char32_t x = a.text[0];
    char32_t y = b.text[0];
    if (y == U'r')
        return x == U'p' || x == U'b' || x == U't' || x == U'd' || x == U'c' || x == U'g' || x == U'f';
    if (y == U'l')
        return x == U'p' || x == U'b' || x == U'c' || x == U'g' || x == U'f';
    return false;
}

inline std::string encode_range(const std::vector<Segment>& segs, std::size_t first, std::size_t last)
{
    std::u32string s;
    for (std::size_t k = first; k < last; ++k)
        s += segs[k].text;
    return utf8::encode(s);
}

struct SyllabificationDetail {
    std::vector<std::string> syllables;
    std::vector<SyllableShape> shapes;
};

inline SyllabificationDetail syllabify_detailed(std::string_view normalized)
{
    const std::u32string w = utf8::decode(normalized);
    const auto segs = segment(w);
    const auto nuclei = find_nuclei(segs);
    if (nuclei.empty())
        throw Error(ErrorCode::NoVowel, "no syllabic nucleus in '" + std::string(normalized) + "'");

    // Segment index at which each syllable starts.
    std::vector<std::size_t> starts{0};
    for (std::size_t k = 1; k < nuclei.size(); ++k) {
        std::size_t lo = nuclei[k - 1].last + 1;
        std::size_t hi = nuclei[k].first; // consonants are [lo, hi)
        std::size_t m = hi - lo;
        std::size_t cut;
        if (m <= 1)
            cut = lo;
        else if (m == 2)
            cut = is_onset_cluster(segs[lo], segs[lo + 1]) ? lo : lo + 1;
        else
            cut = is_onset_cluster(segs[hi - 2], segs[hi - 1]) ? hi - 2 : hi - 1;
        starts.push_back(cut);
    }

    SyllabificationDetail out;
    for (std::size_t k = 0; k < nuclei.size(); ++k) {
        std::size_t first = starts[k];
        std::size_t last = k + 1 < nuclei.size() ? starts[k + 1] : segs.size();
        const Nucleus& nuc = nuclei[k];
        SyllableShape shape;
        shape.vowel_onset = first == nuc.first;
        shape.h_onset = nuc.first == first + 1 && segs[first].is_h();
        // Vowel sequences inside the nucleus, skipping a transparent h.
        std::vector<std::size_t> vowels;
        for (std::size_t s = nuc.first; s <= nuc.last; ++s)
            if (segs[s].is_vowel())
                vowels.push_back(s);
        if ((shape.vowel_onset || shape.h_onset) && vowels.size() >= 2
            && segs[vowels[0]].vowel == VowelClass::Weak && k == 0) {
            shape.glide_onset = true;
        }
        shape.vowel_coda = nuc.last + 1 == last;
        shape.glide_coda = shape.vowel_coda && vowels.size() >= 2 && segs[nuc.last].text == U"y";
        if (vowels.size() >= 2) {
            std::size_t split_seg = vowels[1];
            if (segs[split_seg - 1].is_h())
                --split_seg;
            shape.split_at = encode_range(segs, first, split_seg).size();
            const Segment& a = segs[vowels[0]];
            shape.split_stress_right = a.vowel != VowelClass::Strong;
        }
        out.syllables.push_back(encode_range(segs, first, last));
        out.shapes.push_back(shape);
    }
    return out;
}

inline bool ends_in_vowel_n_s(std::string_view normalized)
{
    const std::u32string w = utf8::decode(normalized);
    if (w.empty())
        return false;
    char32_t c = w.back();
    return c == U'a' || c == U'e' || c == U'i' || c == U'o' || c == U'u' || c == U'n' || c == U's';
}

} // namespace detail

/// Lowercases and strips punctuation, keeping diacritics. Throws
/// EmptyAfterNormalization when no vowel-bearing letters remain.
inline Word normalize_token(std::string_view raw)
{
    std::u32string out;
    for (char32_t c : utf8::decode(raw)) {
        c = utf8::to_lower_es(c);
        if (utf8::is_spanish_letter(c))
            out.push_back(c);
    }
    bool has_vowel = !out.empty() && out.back() == U'y';
    for (char32_t c : out)
        has_vowel = has_vowel || detail::is_vowel_letter(c);
    if (out.empty() || !has_vowel)
        throw Error(ErrorCode::EmptyAfterNormalization, "token '" + std::string(raw) + "' has no letters to scan");
    return Word{std::string(raw), utf8::encode(out)};
}

inline std::vector<std::string> syllabify(const Word& word)
{
    return detail::syllabify_detailed(word.normalized).syllables;
}

/// Position of the lexical stress counted from the end of the word.
inline StressFromEnd lexical_stress(const std::vector<std::string>& syllables, const Word& word)
{
    const std::size_t n = syllables.size();
    if (n == 0)
        return 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (char32_t c : utf8::decode(syllables[i])) {
            if (detail::is_accented(c)) {
                auto from_end = static_cast<StressFromEnd>(n - i);
                return from_end > 4 ? 4 : from_end;
            }
        }
    }
    if (n >= 2 && detail::ends_in_vowel_n_s(word.normalized))
        return 2;
    return 1;
}

inline bool is_prosodically_stressed(const Word& word, const StressLexicon& lexicon)
{
    return lexicon.stressed(word.normalized);
}

/// Full phonological analysis of a single word.
inline SyllabifiedWord analyze_word(const Word& word, const StressLexicon& lexicon)
{
    auto detail = detail::syllabify_detailed(word.normalized);
    SyllabifiedWord out;
    out.word = word;
    out.syllables = std::move(detail.syllables);
    out.shapes = std::move(detail.shapes);
    out.stress_from_end = lexical_stress(out.syllables, word);
    out.prosodic = is_prosodically_stressed(word, lexicon);

    // -mente adverbs keep the stress of their adjective stem.
    const std::size_t n = out.syllables.size();
    constexpr std::string_view suffix = "mente";
    const std::string& norm = word.normalized;
    if (out.prosodic && n >= 3 && norm.size() > suffix.size() && norm.ends_with(suffix)
        && out.syllables[n - 2] == "men" && out.syllables[n - 1] == "te") {
        std::vector<std::string> stem(out.syllables.begin(), out.syllables.end() - 2);
        Word stem_word{std::string(), norm.substr(0, norm.size() - suffix.size())};
        StressFromEnd stem_stress = lexical_stress(stem, stem_word);
        out.secondary_stress = stem.size() - static_cast<std::size_t>(stem_stress);
    }
    return out;
}

/// Splits a verse into raw tokens at whitespace, apostrophes and hyphens.
inline std::vector<std::string> tokenize_line(std::string_view line)
{
    std::vector<std::string> tokens;
    std::u32string current;
    auto flush = [&] {
        if (!current.empty())
            tokens.push_back(utf8::encode(current));
        current.clear();
    };
    for (char32_t c : utf8::decode(line)) {
        bool separator = utf8::is_space(c) || c == U'\'' || c == U'’' || c == U'-' || c == U'‐'
            || c == U'–' || c == U'—';
        if (separator)
            flush();
        else
            current.push_back(c);
    }
    flush();
    return tokens;
}

/// Lowercased, punctuation-free form of a whole line with single spaces.
inline std::string clean_line(std::string_view line)
{
    std::string out;
    for (const auto& token : tokenize_line(line)) {
        std::u32string kept;
        for (char32_t c : utf8::decode(token)) {
            c = utf8::to_lower_es(c);
            if (utf8::is_spanish_letter(c))
                kept.push_back(c);
        }
        if (kept.empty())
            continue;
        if (!out.empty())
            out.push_back(' ');
        out += utf8::encode(kept);
    }
    return out;
}

} // namespace metrica
