#pragma once

#include <array>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "metrica/error.hpp"

namespace metrica {

/// Closed-class forms that carry no stress in connected speech. Homographs
/// are told apart only by the written accent, so "el", "tu", "mi", "se",
/// "si", "de", "te" and "mas" are listed while their accented twins are not.
inline constexpr std::array<std::string_view, 85> default_unstressed_words = {
    // articles and contractions
    "el", "la", "lo", "los", "las", "un", "una", "unos", "unas", "al", "del",
    // object and reflexive clitics
    "me", "te", "se", "nos", "os", "le", "les",
    // prepositions
    "a", "ante", "bajo", "con", "contra", "de", "desde", "en", "entre",
    "hacia", "hasta", "para", "por", "sin", "so", "sobre", "tras",
    // conjunctions
    "y", "e", "ni", "o", "u", "que", "pero", "mas", "sino", "aunque", "pues",
    "porque", "si", "conque", "cuando", "como", "donde", "do", "aun",
    // unstressed possessives
    "mi", "mis", "tu", "tus", "su", "sus", "nuestro", "nuestra", "nuestros",
    "nuestras", "vuestro", "vuestra", "vuestros", "vuestras",
    // relatives
    "quien", "quienes", "cuyo", "cuya", "cuyos", "cuyas", "cual", "cuales",
    "cuanto", "cuanta", "cuantos", "cuantas",
    // proclitic titles
    "don", "doña", "san", "fray", "sor",
};

class StressLexicon {
public:
    StressLexicon() = default;

    static StressLexicon defaults()
    {
        StressLexicon lex;
        for (auto w : default_unstressed_words)
            lex.unstressed_.emplace(w);
        return lex;
    }

    /// Reads the plain-text lexicon format: one normalized form per line,
    /// `#` starts a comment, and `word<TAB>stressed|unstressed` is an override.
    static StressLexicon parse(std::istream& in)
    {
        StressLexicon lex;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
                line.pop_back();
            std::size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos)
                continue;
            line.erase(0, start);
            auto tab = line.find('\t');
            if (tab == std::string::npos) {
                if (lex.overrides_.contains(line))
                    throw Error(ErrorCode::InvalidArgument,
                        "lexicon line " + std::to_string(line_no) + ": '" + line + "' is also an override");
                lex.unstressed_.insert(line);
                continue;
            }
            std::string word = line.substr(0, tab);
            std::string value = line.substr(tab + 1);
            bool stressed;
            if (value == "stressed")
                stressed = true;
            else if (value == "unstressed")
                stressed = false;
            else
                throw Error(ErrorCode::InvalidArgument,
                    "lexicon line " + std::to_string(line_no) + ": bad override value '" + value + "'");
            if (lex.unstressed_.contains(word))
                throw Error(ErrorCode::InvalidArgument,
                    "lexicon line " + std::to_string(line_no) + ": '" + word + "' is also listed as unstressed");
            lex.overrides_[word] = stressed;
        }
        return lex;
    }

    static StressLexicon load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::Io, "cannot open lexicon '" + path + "'");
        return parse(in);
    }

    void add_unstressed(std::string word)
    {
        overrides_.erase(word);
        unstressed_.insert(std::move(word));
    }

    void set_override(std::string word, bool stressed)
    {
        unstressed_.erase(word);
        overrides_[std::move(word)] = stressed;
    }

    /// True iff the normalized form is stressed in connected speech.
    bool stressed(const std::string& normalized) const
    {
        if (auto it = overrides_.find(normalized); it != overrides_.end())
            return it->second;
        return !unstressed_.contains(normalized);
    }

    const std::unordered_set<std::string>& unstressed_words() const noexcept { return unstressed_; }
    const std::unordered_map<std::string, bool>& overrides() const noexcept { return overrides_; }

private:
    std::unordered_set<std::string> unstressed_;
    std::unordered_map<std::string, bool> overrides_;
};

} // namespace metrica
