#pragma once

#include <string>
#include <string_view>

namespace metrica::utf8 {

/// Decodes UTF-8; malformed bytes are mapped to U+FFFD.
inline std::u32string decode(std::string_view s)
{
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k <= extra; ++k) {
            if (i + k >= s.size()) {
                ok = false;
                break;
            }
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

inline void append(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(std::u32string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s)
        append(out, cp);
    return out;
}

/// Lowercases the Latin letters that occur in Spanish text. Grave accents and
/// the rare circumflex found in old editions fold to the acute form.
constexpr char32_t to_lower_es(char32_t c) noexcept
{
    if (c >= U'A' && c <= U'Z')
        return c - U'A' + U'a';
    switch (c) {
    case U'Á': case U'À': case U'Â': case U'à': case U'â': return U'á';
    case U'É': case U'È': case U'Ê': case U'è': case U'ê': return U'é';
    case U'Í': case U'Ì': case U'Î': case U'ì': case U'î': return U'í';
    case U'Ó': case U'Ò': case U'Ô': case U'ò': case U'ô': return U'ó';
    case U'Ú': case U'Ù': case U'Û': case U'ù': case U'û': return U'ú';
    case U'Ü': return U'ü';
    case U'Ï': case U'ï': return U'i';
    case U'Ñ': return U'ñ';
    case U'Ç': return U'ç';
    default: return c;
    }
}

constexpr bool is_spanish_letter(char32_t c) noexcept
{
    if (c >= U'a' && c <= U'z')
        return true;
    switch (c) {
    case U'á': case U'é': case U'í': case U'ó': case U'ú': case U'ü': case U'ñ': case U'ç':
        return true;
    default:
        return false;
    }
}

constexpr bool is_space(char32_t c) noexcept
{
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' || c == 0xA0;
}

} // namespace metrica::utf8
