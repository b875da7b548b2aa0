#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "metrica/error.hpp"

namespace metrica {

inline constexpr std::size_t hendecasyllable_length = 11;

/// A string over {+,-} with at least one stressed position.
class MetricalPattern {
public:
    explicit MetricalPattern(std::string symbols)
        : symbols_(std::move(symbols))
    {
        if (auto problem = check(symbols_))
            throw Error(ErrorCode::InvalidPattern, *problem + " in '" + symbols_ + "'");
    }

    static std::optional<MetricalPattern> try_make(std::string symbols)
    {
        if (check(symbols))
            return std::nullopt;
        return MetricalPattern(std::move(symbols), Unchecked{});
    }

    const std::string& str() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    bool stressed(std::size_t position) const { return symbols_.at(position) == '+'; }
    char operator[](std::size_t i) const { return symbols_[i]; }

    friend bool operator==(const MetricalPattern&, const MetricalPattern&) = default;
    friend std::ostream& operator<<(std::ostream& os, const MetricalPattern& p) { return os << p.symbols_; }

private:
    struct Unchecked { };
    MetricalPattern(std::string symbols, Unchecked)
        : symbols_(std::move(symbols))
    {
    }

    static std::optional<std::string> check(std::string_view s)
    {
        bool any_stress = false;
        for (char c : s) {
            if (c != '+' && c != '-')
                return std::string("symbol outside {+,-}");
            any_stress = any_stress || c == '+';
        }
        if (!any_stress)
            return std::string("no stressed position");
        return std::nullopt;
    }

    std::string symbols_;
};

} // namespace metrica
