#ifndef ATML_XML_HPP
#define ATML_XML_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atml::xml {

/// Raised on malformed XML; carries the 1-based source position.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Element tree node. Text content is the concatenation of all character
/// data directly inside the element; mixed content is not distinguished.
struct Node {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;

    const std::string* attribute(std::string_view key) const;
    const Node* child(std::string_view child_name) const;
    std::vector<const Node*> children_named(std::string_view child_name) const;

    /// Text of this node plus all descendants, in document order.
    std::string deep_text() const;
};

/// Parses a complete XML document and returns its root element.
/// Comments, the XML declaration, and processing instructions are skipped.
Node parse(std::string_view input);

/// Serializes a tree back to text with 2-space indentation.
std::string serialize(const Node& root);

std::string escape_text(std::string_view raw);
std::string escape_attribute(std::string_view raw);

} // namespace atml::xml

#endif
