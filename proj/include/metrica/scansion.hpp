#pragma once

// Metrical scansion: figure detection and fitting a line to its target length.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "metrica/error.hpp"
#include "metrica/lexicon.hpp"
#include "metrica/pattern.hpp"
#include "metrica/phonology.hpp"

namespace metrica {

enum class FigureKind { Synalepha, Syneresis, Dieresis };

constexpr std::string_view to_string(FigureKind kind) noexcept
{
    switch (kind) {
    case FigureKind::Synalepha: return "synalepha";
    case FigureKind::Syneresis: return "syneresis";
    case FigureKind::Dieresis: return "dieresis";
    }
    return "?";
}

/// Why a synalepha boundary might be left open. Lower values are un-merged
/// first when the fitter needs extra syllables.
enum class HiatusClass : int {
    SilentH = 0,
    GlideCoda = 1,
    StressedVowel = 2,
    Plain = 3,
};

struct FigureSite {
    FigureKind kind;
    /// Flat syllable index: left syllable of a merged boundary, or the split syllable.
    std::size_t position;
    int span = 2;
    int delta = -1;
    HiatusClass hiatus = HiatusClass::Plain;

    friend bool operator==(const FigureSite&, const FigureSite&) = default;
};

struct MetricalSyllable {
    std::string text;
    bool stressed = false;
    /// Flat orthographic syllable indices contributing to this position.
    std::vector<std::size_t> constituents;
};

struct ScanCandidate {
    std::vector<FigureSite> applied;
    std::vector<MetricalSyllable> metrical_syllables;
    int ending_adjust = 0;
    int metrical_length = 0;
};

enum class FigurePreference {
    /// Tiered order with canonical hendecasyllable rhythm (stress on 6th, or
    /// on 4th and 8th) used to choose among same-tier candidates.
    Rhythmic,
    /// Tiered order only; ties broken by hiatus class and left-to-right.
    Ordered,
};

struct ScanConfig {
    int target_length = static_cast<int>(hendecasyllable_length);
    bool h_blocks_synalepha = false;
    FigurePreference figure_preference = FigurePreference::Rhythmic;
    bool emit_diagnostics = false;
    /// Above this many same-tier combinations the fitter picks greedily.
    std::size_t max_tier_combinations = 50000;

    void validate() const
    {
        if (target_length < 2)
            throw Error(ErrorCode::InvalidArgument, "target length must be at least 2");
    }
};

struct ScansionResult {
    MetricalPattern pattern;
    ScanCandidate candidate;
    bool ambiguous = false;
    std::vector<std::vector<std::string>> syllabification;
    std::vector<std::string> diagnostics;
};

class UnfittableError : public Error {
public:
    UnfittableError(std::vector<int> achievable, std::vector<ScanCandidate> nearest, int target)
        : Error(ErrorCode::Unfittable, describe(achievable, target))
        , achievable_(std::move(achievable))
        , nearest_(std::move(nearest))
    {
    }

    const std::vector<int>& achievable_lengths() const noexcept { return achievable_; }
    const std::vector<ScanCandidate>& nearest() const noexcept { return nearest_; }

private:
    static std::string describe(const std::vector<int>& lengths, int target)
    {
        std::string s = "no figure combination reaches " + std::to_string(target) + " syllables; achievable {";
        for (std::size_t i = 0; i < lengths.size(); ++i)
            s += (i ? "," : "") + std::to_string(lengths[i]);
        return s + "}";
    }

    std::vector<int> achievable_;
    std::vector<ScanCandidate> nearest_;
};

/// Tokenizes, normalizes and analyzes every word of a verse.
inline std::vector<SyllabifiedWord> phonological_parse(std::string_view line, const StressLexicon& lexicon)
{
    std::vector<SyllabifiedWord> words;
    for (const auto& token : tokenize_line(line)) {
        Word w;
        try {
            w = normalize_token(token);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::EmptyAfterNormalization)
                continue;
            throw;
        }
        words.push_back(analyze_word(w, lexicon));
    }
    if (words.empty())
        throw Error(ErrorCode::EmptyLine, "nothing to scan in '" + std::string(line) + "'");
    return words;
}

namespace detail {

struct FlatSyllable {
    std::string text;
    SyllableShape shape;
    std::size_t word = 0;
    std::size_t index_in_word = 0;
    bool stressed = false;  // prosodically stressed (main or secondary)
    bool final_stress = false; // lexical stress of the line's last word
};

inline std::vector<FlatSyllable> flatten(const std::vector<SyllabifiedWord>& words)
{
    std::vector<FlatSyllable> flat;
    for (std::size_t w = 0; w < words.size(); ++w) {
        const auto& word = words[w];
        const std::size_t main = word.stressed_index();
        for (std::size_t s = 0; s < word.syllables.size(); ++s) {
            FlatSyllable f;
            f.text = word.syllables[s];
            f.shape = word.shapes[s];
            f.word = w;
            f.index_in_word = s;
            f.stressed = word.prosodic && (s == main || word.secondary_stress == s);
            f.final_stress = w + 1 == words.size() && s == main;
            flat.push_back(std::move(f));
        }
    }
    return flat;
}

inline std::size_t flat_size(const std::vector<SyllabifiedWord>& words)
{
    std::size_t n = 0;
    for (const auto& w : words)
        n += w.syllables.size();
    return n;
}

} // namespace detail

/// Enumerates every place where a metre-altering figure could apply, in
/// left-to-right order.
inline std::vector<FigureSite> find_figure_sites(const std::vector<SyllabifiedWord>& words, const ScanConfig& config)
{
    std::vector<FigureSite> sites;
    std::size_t offset = 0;
    for (std::size_t w = 0; w < words.size(); ++w) {
        const auto& word = words[w];
        const std::size_t n = word.syllables.size();
        const std::size_t main = word.stressed_index();
        for (std::size_t s = 0; s < n; ++s) {
            const auto& shape = word.shapes[s];
            if (shape.has_diphthong())
                sites.push_back({FigureKind::Dieresis, offset + s, 2, +1});
            if (s + 1 < n && shape.vowel_coda) {
                const auto& next = word.shapes[s + 1];
                if (next.vowel_onset || (next.h_onset && !next.glide_onset))
                    sites.push_back({FigureKind::Syneresis, offset + s, 2, -1});
            }
        }
        if (w + 1 < words.size()) {
            const auto& next = words[w + 1];
            const auto& left = word.shapes.back();
            const auto& right = next.shapes.front();
            bool vowel_contact = left.vowel_coda && !right.glide_onset
                && (right.vowel_onset || (right.h_onset && !config.h_blocks_synalepha));
            if (vowel_contact) {
                HiatusClass cls = HiatusClass::Plain;
                bool right_stressed = next.prosodic && (next.stressed_index() == 0 || next.secondary_stress == 0u);
                bool left_stressed = word.prosodic && main + 1 == n && n > 1;
                if (right.h_onset)
                    cls = HiatusClass::SilentH;
                else if (left.glide_coda)
                    cls = HiatusClass::GlideCoda;
                else if (right_stressed || left_stressed)
                    cls = HiatusClass::StressedVowel;
                sites.push_back({FigureKind::Synalepha, offset + n - 1, 2, -1, cls});
            }
        }
        offset += n;
    }
    std::stable_sort(sites.begin(), sites.end(), [](const FigureSite& a, const FigureSite& b) {
        return std::tie(a.position, a.kind) < std::tie(b.position, b.kind);
    });
    return sites;
}

/// Realizes one subset of figures as a sequence of metrical syllables.
inline ScanCandidate build_candidate(
    const std::vector<SyllabifiedWord>& words, const std::vector<FigureSite>& sites, const std::vector<bool>& applied)
{
    const auto flat = detail::flatten(words);
    const std::size_t n = flat.size();
    std::vector<bool> split(n, false);
    std::vector<bool> merge_after(n, false);
    ScanCandidate cand;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (!applied[i])
            continue;
        const auto& site = sites[i];
        cand.applied.push_back(site);
        if (site.kind == FigureKind::Dieresis)
            split[site.position] = true;
        else
            merge_after[site.position] = true;
    }

    std::size_t final_index = 0;
    auto push_piece = [&](std::string text, bool stressed, bool final_stress, std::size_t source, bool merge) {
        if (merge && !cand.metrical_syllables.empty()) {
            auto& back = cand.metrical_syllables.back();
            back.text += "_" + text;
            back.stressed = back.stressed || stressed;
            if (back.constituents.back() != source)
                back.constituents.push_back(source);
        } else {
            cand.metrical_syllables.push_back({std::move(text), stressed, {source}});
        }
        if (final_stress)
            final_index = cand.metrical_syllables.size() - 1;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto& syl = flat[i];
        const bool merge = i > 0 && merge_after[i - 1];
        if (split[i] && syl.shape.has_diphthong()) {
            const bool right = syl.shape.split_stress_right;
            push_piece(syl.text.substr(0, syl.shape.split_at), syl.stressed && !right, syl.final_stress && !right, i, merge);
            push_piece(syl.text.substr(syl.shape.split_at), syl.stressed && right, syl.final_stress && right, i, false);
        } else {
            push_piece(syl.text, syl.stressed, syl.final_stress, i, merge);
        }
    }

    const int count = static_cast<int>(cand.metrical_syllables.size());
    const int from_end = count - static_cast<int>(final_index);
    cand.ending_adjust = 2 - from_end;
    cand.metrical_length = count + cand.ending_adjust;
    return cand;
}

/// Renders a candidate whose metrical length equals the target. Oxytone
/// endings pad a final '-'; proparoxytone endings drop post-tonic positions.
inline MetricalPattern pattern_of(const ScanCandidate& candidate, const ScanConfig& config)
{
    if (candidate.metrical_length != config.target_length)
        throw Error(ErrorCode::LengthMismatch,
            "candidate has " + std::to_string(candidate.metrical_length) + " metrical syllables, target is "
                + std::to_string(config.target_length));
    std::string symbols;
    for (const auto& syl : candidate.metrical_syllables)
        symbols.push_back(syl.stressed ? '+' : '-');
    symbols.resize(static_cast<std::size_t>(config.target_length), '-');
    return MetricalPattern(std::move(symbols));
}

namespace detail {

/// Canonical hendecasyllable accent: 6th position, or both 4th and 8th.
inline bool canonical_rhythm(std::string_view symbols)
{
    if (symbols.size() != hendecasyllable_length)
        return true;
    return symbols[5] == '+' || (symbols[3] == '+' && symbols[7] == '+');
}

/// Lexicographic preference key; smaller is better.
struct PreferenceKey {
    int final_unstressed = 0; // '+' missing at the last stressed position (10 for hendecasyllables)
    int dieresis = 0;
    int syneresis = 0;
    int open_synalephas = 0;
    int idle_figures = 0;     // applied figures that do not change the length
    int off_rhythm = 0;
    std::vector<std::pair<int, std::size_t>> open_classes; // (hiatus class, position), sorted
    std::vector<std::size_t> syneresis_at;
    std::vector<std::size_t> dieresis_at;

    auto operator<=>(const PreferenceKey&) const = default;

    /// The part of the key that expresses a real preference; candidates
    /// equal on it but differing in pattern make the result ambiguous.
    auto tier() const
    {
        std::vector<int> classes;
        for (const auto& [cls, pos] : open_classes)
            classes.push_back(cls);
        return std::make_tuple(final_unstressed, dieresis, syneresis, open_synalephas, idle_figures, off_rhythm, classes);
    }
};

} // namespace detail

/// Computes the preference key of one candidate. `effect` holds each site's
/// contribution to the metrical length when applied alone.
inline detail::PreferenceKey preference_key(const std::vector<FigureSite>& sites, const std::vector<int>& effect,
    const std::vector<bool>& applied, const std::string& symbols, const ScanConfig& config)
{
    detail::PreferenceKey key;
    const auto target = static_cast<std::size_t>(config.target_length);
    key.final_unstressed = (target >= 2 && symbols.size() == target && symbols[target - 2] == '+') ? 0 : 1;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& site = sites[i];
        if (effect[i] == 0) {
            key.idle_figures += applied[i] ? 1 : 0;
            continue;
        }
        switch (site.kind) {
        case FigureKind::Synalepha:
            if (!applied[i]) {
                ++key.open_synalephas;
                key.open_classes.emplace_back(static_cast<int>(site.hiatus), site.position);
            }
            break;
        case FigureKind::Syneresis:
            if (applied[i]) {
                ++key.syneresis;
                key.syneresis_at.push_back(site.position);
            }
            break;
        case FigureKind::Dieresis:
            if (applied[i]) {
                ++key.dieresis;
                key.dieresis_at.push_back(site.position);
            }
            break;
        }
    }
    std::sort(key.open_classes.begin(), key.open_classes.end());
    if (config.figure_preference == FigurePreference::Rhythmic && target == hendecasyllable_length)
        key.off_rhythm = detail::canonical_rhythm(symbols) ? 0 : 1;
    return key;
}

/// Length change each site causes when applied on its own. Length is
/// additive over sites, so these deltas describe every subset.
inline std::vector<int> site_effects(const std::vector<SyllabifiedWord>& words, const std::vector<FigureSite>& sites)
{
    std::vector<bool> none(sites.size(), false);
    const int base = build_candidate(words, sites, none).metrical_length;
    std::vector<int> effect(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        std::vector<bool> one = none;
        one[i] = true;
        effect[i] = build_candidate(words, sites, one).metrical_length - base;
    }
    return effect;
}

namespace detail {

/// Calls fn for every k-subset of [0, n) in lexicographic order; stops when
/// fn returns false.
inline bool for_each_combination(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& fn)
{
    if (k > n)
        return true;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    for (;;) {
        if (!fn(idx))
            return false;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1)
            --i;
        if (i == 0)
            return true;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

inline double binomial(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0.0;
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

} // namespace detail

/// Chooses the subset of figures that brings the line to the target length,
/// following the tiered preference: all synalephas first, then reopening
/// synalephas, then syneresis, then dieresis.
inline ScansionResult fit_to_target(
    const std::vector<SyllabifiedWord>& words, const std::vector<FigureSite>& sites, const ScanConfig& config)
{
    config.validate();
    const auto effect = site_effects(words, sites);

    std::vector<std::size_t> syn, ser, die;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (effect[i] == 0)
            continue;
        switch (sites[i].kind) {
        case FigureKind::Synalepha: syn.push_back(i); break;
        case FigureKind::Syneresis: ser.push_back(i); break;
        case FigureKind::Dieresis: die.push_back(i); break;
        }
    }

    std::vector<bool> defaults(sites.size(), false);
    for (auto i : syn)
        defaults[i] = true;
    const ScanCandidate default_candidate = build_candidate(words, sites, defaults);
    const int default_length = default_candidate.metrical_length;
    const int need = config.target_length - default_length;

    std::size_t reopen = 0, merge = 0, split = 0;
    bool feasible = true;
    if (need >= 0) {
        split = static_cast<std::size_t>(std::max(0, need - static_cast<int>(syn.size())));
        reopen = static_cast<std::size_t>(need) - split;
        feasible = split <= die.size();
    } else {
        merge = static_cast<std::size_t>(-need);
        feasible = merge <= ser.size();
    }

    if (!feasible) {
        const int lo = default_length - static_cast<int>(ser.size());
        const int hi = default_length + static_cast<int>(syn.size() + die.size());
        std::vector<int> achievable;
        for (int len = lo; len <= hi; ++len)
            achievable.push_back(len);
        std::vector<bool> nearest = defaults;
        if (need > 0) {
            for (auto i : syn)
                nearest[i] = false;
            for (auto i : die)
                nearest[i] = true;
        } else {
            for (auto i : ser)
                nearest[i] = true;
        }
        throw UnfittableError(std::move(achievable), {build_candidate(words, sites, nearest)}, config.target_length);
    }

    struct Scored {
        detail::PreferenceKey key;
        std::vector<bool> applied;
        std::string symbols;
    };
    std::optional<Scored> best;
    std::vector<Scored> tier_members;

    auto evaluate = [&](const std::vector<bool>& applied) {
        ScanCandidate cand = build_candidate(words, sites, applied);
        std::string symbols;
        for (const auto& s : cand.metrical_syllables)
            symbols.push_back(s.stressed ? '+' : '-');
        symbols.resize(static_cast<std::size_t>(config.target_length), '-');
        Scored scored{preference_key(sites, effect, applied, symbols, config), applied, std::move(symbols)};
        if (!best || scored.key < best->key)
            best = scored;
        tier_members.push_back(std::move(scored));
    };

    const double combos = detail::binomial(syn.size(), reopen) * detail::binomial(ser.size(), merge)
        * detail::binomial(die.size(), split);
    if (combos <= static_cast<double>(config.max_tier_combinations)) {
        detail::for_each_combination(syn.size(), reopen, [&](const auto& open) {
            return detail::for_each_combination(ser.size(), merge, [&](const auto& merged) {
                return detail::for_each_combination(die.size(), split, [&](const auto& splits) {
                    std::vector<bool> applied = defaults;
                    for (auto k : open)
                        applied[syn[k]] = false;
                    for (auto k : merged)
                        applied[ser[k]] = true;
                    for (auto k : splits)
                        applied[die[k]] = true;
                    evaluate(applied);
                    return true;
                });
            });
        });
    } else {
        // Greedy: reopen by hiatus class then position, merge and split left to right.
        std::vector<std::size_t> order = syn;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(sites[a].hiatus, sites[a].position) < std::tie(sites[b].hiatus, sites[b].position);
        });
        std::vector<bool> applied = defaults;
        for (std::size_t k = 0; k < reopen; ++k)
            applied[order[k]] = false;
        for (std::size_t k = 0; k < merge; ++k)
            applied[ser[k]] = true;
        for (std::size_t k = 0; k < split; ++k)
            applied[die[k]] = true;
        evaluate(applied);
    }

    bool ambiguous = false;
    const auto best_tier = best->key.tier();
    for (const auto& member : tier_members) {
        if (member.symbols != best->symbols && member.key.tier() == best_tier) {
            ambiguous = true;
            break;
        }
    }

    ScanCandidate chosen = build_candidate(words, sites, best->applied);
    ScansionResult result{pattern_of(chosen, config), std::move(chosen), ambiguous, {}, {}};
    for (const auto& w : words)
        result.syllabification.push_back(w.syllables);
    if (config.emit_diagnostics) {
        result.diagnostics.push_back("default length " + std::to_string(default_length) + ", target "
            + std::to_string(config.target_length));
        result.diagnostics.push_back(std::to_string(tier_members.size()) + " candidate(s) in the winning tier");
    }
    return result;
}

/// End-to-end scansion of one raw verse line.
inline ScansionResult scan_line(std::string_view line, const StressLexicon& lexicon, const ScanConfig& config = {})
{
    const auto words = phonological_parse(line, lexicon);
    const auto sites = find_figure_sites(words, config);
    return fit_to_target(words, sites, config);
}

/// Hyphenated display form: syllables joined by '-', words by spaces.
inline std::string hyphenate(const std::vector<std::vector<std::string>>& syllabification)
{
    std::string out;
    for (const auto& word : syllabification) {
        if (!out.empty())
            out.push_back(' ');
        for (std::size_t i = 0; i < word.size(); ++i) {
            if (i)
                out.push_back('-');
            out += word[i];
        }
    }
    return out;
}

inline std::string describe_figures(const std::vector<FigureSite>& applied)
{
    std::string out;
    for (const auto& site : applied) {
        if (!out.empty())
            out.push_back(',');
        out += std::string(to_string(site.kind)) + "@" + std::to_string(site.position);
    }
    return out;
}

} // namespace metrica
