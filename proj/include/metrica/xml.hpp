#pragma once

// Minimal non-validating XML reader, enough for TEI verse files: elements,
// attributes, character data, entities, comments, CDATA, PIs and DOCTYPE.

#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "metrica/error.hpp"
#include "metrica/utf8.hpp"

namespace metrica::xml {

struct Element;

using Node = std::variant<std::string, std::unique_ptr<Element>>;

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;

    /// Name without namespace prefix.
    std::string_view local_name() const noexcept
    {
        auto colon = name.find(':');
        return colon == std::string::npos ? std::string_view(name) : std::string_view(name).substr(colon + 1);
    }

    std::optional<std::string> attribute(std::string_view key) const
    {
        for (const auto& [k, v] : attributes)
            if (k == key)
                return v;
        return std::nullopt;
    }

    /// Concatenated character data of this element and all descendants.
    std::string text() const
    {
        std::string out;
        append_text(out);
        return out;
    }

    void append_text(std::string& out) const
    {
        for (const auto& child : children) {
            if (const auto* s = std::get_if<std::string>(&child))
                out += *s;
            else
                std::get<std::unique_ptr<Element>>(child)->append_text(out);
        }
    }

    template <typename Fn>
    void for_each_element(Fn&& fn) const
    {
        for (const auto& child : children) {
            if (const auto* e = std::get_if<std::unique_ptr<Element>>(&child)) {
                fn(**e);
                (*e)->for_each_element(fn);
            }
        }
    }
};

class Parser {
public:
    explicit Parser(std::string_view src)
        : src_(src)
    {
    }

    std::unique_ptr<Element> parse_document()
    {
        skip_misc();
        if (at_end() || peek() != '<')
            fail("expected root element");
        auto root = parse_element();
        skip_misc();
        if (!at_end())
            fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        std::size_t line = 1;
        for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i)
            line += src_[i] == '\n';
        throw Error(ErrorCode::MalformedXml, what + " (line " + std::to_string(line) + ")");
    }

    bool at_end() const noexcept { return pos_ >= src_.size(); }
    char peek() const noexcept { return src_[pos_]; }
    bool starts_with(std::string_view s) const noexcept { return src_.substr(pos_, s.size()) == s; }

    void expect(std::string_view s)
    {
        if (!starts_with(s))
            fail("expected '" + std::string(s) + "'");
        pos_ += s.size();
    }

    void skip_ws()
    {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r'))
            ++pos_;
    }

    void skip_until(std::string_view terminator)
    {
        auto end = src_.find(terminator, pos_);
        if (end == std::string_view::npos)
            fail("unterminated construct, missing '" + std::string(terminator) + "'");
        pos_ = end + terminator.size();
    }

    void skip_doctype()
    {
        int depth = 0;
        while (!at_end()) {
            char c = src_[pos_++];
            if (c == '[')
                ++depth;
            else if (c == ']')
                --depth;
            else if (c == '>' && depth == 0)
                return;
        }
        fail("unterminated DOCTYPE");
    }

    void skip_misc()
    {
        for (;;) {
            skip_ws();
            if (starts_with("<?"))
                skip_until("?>");
            else if (starts_with("<!--"))
                skip_until("-->");
            else if (starts_with("<!DOCTYPE"))
                skip_doctype();
            else
                return;
        }
    }

    static bool name_char(char c) noexcept
    {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || c == '_' || c == ':' || c == '-' || c == '.' || u >= 0x80;
    }

    std::string parse_name()
    {
        std::size_t start = pos_;
        while (!at_end() && name_char(peek()))
            ++pos_;
        if (start == pos_)
            fail("expected a name");
        return std::string(src_.substr(start, pos_ - start));
    }

    std::string decode_entities(std::string_view raw)
    {
        std::string out;
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] != '&') {
                out.push_back(raw[i++]);
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos)
                fail("unterminated entity");
            std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "lt")
                out.push_back('<');
            else if (ent == "gt")
                out.push_back('>');
            else if (ent == "amp")
                out.push_back('&');
            else if (ent == "quot")
                out.push_back('"');
            else if (ent == "apos")
                out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                unsigned long cp = 0;
                try {
                    cp = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')
                        ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                        : std::stoul(std::string(ent.substr(1)), nullptr, 10);
                } catch (const std::exception&) {
                    fail("bad character reference '&" + std::string(ent) + ";'");
                }
                utf8::append(out, static_cast<char32_t>(cp));
            } else {
                fail("unknown entity '&" + std::string(ent) + ";'");
            }
            i = semi + 1;
        }
        return out;
    }

    std::unique_ptr<Element> parse_element()
    {
        expect("<");
        auto el = std::make_unique<Element>();
        el->name = parse_name();
        for (;;) {
            skip_ws();
            if (at_end())
                fail("unterminated start tag <" + el->name + ">");
            if (starts_with("/>")) {
                pos_ += 2;
                return el;
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string key = parse_name();
            skip_ws();
            expect("=");
            skip_ws();
            if (at_end() || (peek() != '"' && peek() != '\''))
                fail("attribute value must be quoted");
            char quote = src_[pos_++];
            auto end = src_.find(quote, pos_);
            if (end == std::string_view::npos)
                fail("unterminated attribute value");
            el->attributes.emplace_back(std::move(key), decode_entities(src_.substr(pos_, end - pos_)));
            pos_ = end + 1;
        }
        for (;;) {
            if (at_end())
                fail("missing end tag </" + el->name + ">");
            if (starts_with("</")) {
                pos_ += 2;
                std::string closing = parse_name();
                if (closing != el->name)
                    fail("mismatched end tag </" + closing + "> for <" + el->name + ">");
                skip_ws();
                expect(">");
                return el;
            }
            if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<![CDATA[")) {
                pos_ += 9;
                auto end = src_.find("]]>", pos_);
                if (end == std::string_view::npos)
                    fail("unterminated CDATA");
                append_text(*el, std::string(src_.substr(pos_, end - pos_)));
                pos_ = end + 3;
            } else if (starts_with("<?")) {
                skip_until("?>");
            } else if (peek() == '<') {
                el->children.emplace_back(parse_element());
            } else {
                auto end = src_.find('<', pos_);
                if (end == std::string_view::npos)
                    end = src_.size();
                append_text(*el, decode_entities(src_.substr(pos_, end - pos_)));
                pos_ = end;
            }
        }
    }

    static void append_text(Element& el, std::string text)
    {
        if (!el.children.empty())
            if (auto* s = std::get_if<std::string>(&el.children.back())) {
                *s += text;
                return;
            }
        el.children.emplace_back(std::move(text));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

inline std::unique_ptr<Element> parse(std::string_view document)
{
    return Parser(document).parse_document();
}

inline std::string escape(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace metrica::xml
