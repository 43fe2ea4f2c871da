#pragma once

// A small non-validating XML reader. It checks well-formedness (tag nesting,
// attribute syntax, entity references, a single root element) and builds an
// element tree; DTDs are skipped and namespaces are left as plain prefixes.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hexmeter::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    // Character data appearing directly inside this element, concatenated.
    std::string text;
    // Byte offset of the opening '<'.
    std::size_t offset = 0;

    std::optional<std::string_view> attribute(std::string_view key) const;
};

// Throws XmlError carrying the byte offset of the first problem.
Element parse(std::string_view document);

}  // namespace hexmeter::xml
