#include "hexmeter/xml.hpp"

#include "hexmeter/error.hpp"

#include <cstdint>

namespace hexmeter::xml {

std::optional<std::string_view> Element::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return std::string_view(v);
    }
    return std::nullopt;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_char(char c) {
    return !is_space(c) && c != '<' && c != '>' && c != '/' && c != '=' && c != '"' &&
           c != '\'' && c != '&' && c != '?' && c != '!';
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Parser {
public:
    explicit Parser(std::string_view doc) : doc_(doc) {}

    Element run() {
        if (doc_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;

        std::vector<Element> open;
        std::optional<Element> root;

        while (pos_ < doc_.size()) {
            if (doc_[pos_] != '<') {
                const std::size_t start = pos_;
                std::string text = read_text();
                if (open.empty()) {
                    for (char c : text) {
                        if (!is_space(c)) fail("character data outside the root element", start);
                    }
                } else {
                    open.back().text += text;
                }
                continue;
            }
            if (starts_with("<?")) {
                skip_past("?>", "unterminated processing instruction");
            } else if (starts_with("<!--")) {
                skip_past("-->", "unterminated comment");
            } else if (starts_with("<![CDATA[")) {
                const std::size_t start = pos_;
                if (open.empty()) fail("CDATA section outside the root element", start);
                pos_ += 9;
                const auto end = doc_.find("]]>", pos_);
                if (end == std::string_view::npos) fail("unterminated CDATA section", start);
                open.back().text.append(doc_.substr(pos_, end - pos_));
                pos_ = end + 3;
            } else if (starts_with("<!DOCTYPE")) {
                if (root || !open.empty()) fail("DOCTYPE after the root element", pos_);
                skip_doctype();
            } else if (starts_with("</")) {
                const std::size_t start = pos_;
                pos_ += 2;
                std::string name = read_name();
                skip_space();
                expect('>');
                if (open.empty()) fail("closing tag </" + name + "> without an open element", start);
                if (open.back().name != name) {
                    fail("mismatched closing tag </" + name + ">, expected </" + open.back().name + ">",
                         start);
                }
                Element done = std::move(open.back());
                open.pop_back();
                close(std::move(done), open, root);
            } else {
                const std::size_t start = pos_;
                if (root && open.empty()) fail("more than one root element", start);
                ++pos_;
                Element el;
                el.offset = start;
                el.name = read_name();
                const bool self_closing = read_attributes(el);
                if (self_closing) {
                    close(std::move(el), open, root);
                } else {
                    open.push_back(std::move(el));
                }
            }
        }
        if (!open.empty()) fail("unclosed element <" + open.back().name + ">", open.back().offset);
        if (!root) fail("document has no root element", doc_.size());
        return std::move(*root);
    }

private:
    [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw XmlError(what, at); }

    bool starts_with(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

    void skip_space() {
        while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
    }

    void expect(char c) {
        if (pos_ >= doc_.size() || doc_[pos_] != c) fail(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    void skip_past(std::string_view terminator, const char* what) {
        const auto end = doc_.find(terminator, pos_);
        if (end == std::string_view::npos) fail(what, pos_);
        pos_ = end + terminator.size();
    }

    void skip_doctype() {
        const std::size_t start = pos_;
        int depth = 0;
        for (; pos_ < doc_.size(); ++pos_) {
            const char c = doc_[pos_];
            if (c == '[') ++depth;
            if (c == ']') --depth;
            if (c == '>' && depth == 0) {
                ++pos_;
                return;
            }
        }
        fail("unterminated DOCTYPE", start);
    }

    std::string read_name() {
        const std::size_t start = pos_;
        while (pos_ < doc_.size() && is_name_char(doc_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a name", start);
        return std::string(doc_.substr(start, pos_ - start));
    }

    // Returns true for "<name ... />".
    bool read_attributes(Element& el) {
        for (;;) {
            const std::size_t before = pos_;
            skip_space();
            if (pos_ >= doc_.size()) fail("unterminated start tag <" + el.name + ">", el.offset);
            if (doc_[pos_] == '>') {
                ++pos_;
                return false;
            }
            if (starts_with("/>")) {
                pos_ += 2;
                return true;
            }
            if (pos_ == before) fail("expected whitespace before attribute", pos_);
            const std::size_t attr_at = pos_;
            std::string key = read_name();
            skip_space();
            expect('=');
            skip_space();
            if (pos_ >= doc_.size() || (doc_[pos_] != '"' && doc_[pos_] != '\'')) {
                fail("attribute value must be quoted", pos_);
            }
            const char quote = doc_[pos_++];
            std::string value;
            while (pos_ < doc_.size() && doc_[pos_] != quote) {
                if (doc_[pos_] == '<') fail("'<' in attribute value", pos_);
                if (doc_[pos_] == '&') {
                    read_reference(value);
                } else {
                    value += doc_[pos_++];
                }
            }
            if (pos_ >= doc_.size()) fail("unterminated attribute value", attr_at);
            ++pos_;
            if (el.attribute(key)) fail("duplicate attribute '" + key + "'", attr_at);
            el.attributes.emplace_back(std::move(key), std::move(value));
        }
    }

    std::string read_text() {
        std::string out;
        while (pos_ < doc_.size() && doc_[pos_] != '<') {
            if (doc_[pos_] == '&') {
                read_reference(out);
            } else {
                out += doc_[pos_++];
            }
        }
        return out;
    }

    void read_reference(std::string& out) {
        const std::size_t start = pos_;
        const auto semi = doc_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity reference", start);
        const std::string_view ref = doc_.substr(pos_ + 1, semi - pos_ - 1);
        pos_ = semi + 1;
        if (ref == "lt") out += '<';
        else if (ref == "gt") out += '>';
        else if (ref == "amp") out += '&';
        else if (ref == "quot") out += '"';
        else if (ref == "apos") out += '\'';
        else if (!ref.empty() && ref[0] == '#') {
            std::uint32_t cp = 0;
            const bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
            const std::string_view digits = ref.substr(hex ? 2 : 1);
            if (digits.empty()) fail("empty character reference", start);
            for (char c : digits) {
                std::uint32_t d;
                if (c >= '0' && c <= '9') d = static_cast<std::uint32_t>(c - '0');
                else if (hex && c >= 'a' && c <= 'f') d = static_cast<std::uint32_t>(c - 'a' + 10);
                else if (hex && c >= 'A' && c <= 'F') d = static_cast<std::uint32_t>(c - 'A' + 10);
                else fail("bad character reference", start);
                cp = cp * (hex ? 16 : 10) + d;
                if (cp > 0x10FFFF) fail("character reference out of range", start);
            }
            append_utf8(out, cp);
        } else {
            fail("unknown entity '&" + std::string(ref) + ";'", start);
        }
    }

    static void close(Element&& done, std::vector<Element>& open, std::optional<Element>& root) {
        if (open.empty()) {
            root = std::move(done);
        } else {
            open.back().children.push_back(std::move(done));
        }
    }

    std::string_view doc_;
    std::size_t pos_ = 0;
};

}  // namespace

Element parse(std::string_view document) { return Parser(document).run(); }

}  // namespace hexmeter::xml
