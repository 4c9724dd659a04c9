#include "atml/xml.hpp"

#include <cctype>
#include <sstream>

namespace atml::xml {

ParseError::ParseError(std::string message, std::size_t line, std::size_t column)
    : std::runtime_error("XML parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + std::move(message)),
      line_(line),
      column_(column) {}

const std::string* Node::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

const Node* Node::child(std::string_view child_name) const {
    for (const auto& c : children) {
        if (c.name == child_name) return &c;
    }
    return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view child_name) const {
    std::vector<const Node*> out;
    for (const auto& c : children) {
        if (c.name == child_name) out.push_back(&c);
    }
    return out;
}

std::string Node::deep_text() const {
    std::string out = text;
    for (const auto& c : children) out += c.deep_text();
    return out;
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view input) : input_(input) {}

    bool eof() const { return pos_ >= input_.size(); }
    char peek() const { return input_[pos_]; }

    bool starts_with(std::string_view s) const { return input_.substr(pos_).starts_with(s); }

    char take() {
        char c = input_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip(std::size_t n) {
        for (std::size_t i = 0; i < n && !eof(); ++i) take();
    }

    void skip_whitespace() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) take();
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, line_, column_);
    }

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::string_view input_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

std::string read_name(Cursor& cur) {
    if (cur.eof() || !is_name_start(cur.peek())) cur.fail("expected a name");
    std::string name;
    while (!cur.eof() && is_name_char(cur.peek())) name += cur.take();
    return name;
}

void append_entity(Cursor& cur, std::string& out) {
    // cur is positioned on '&'
    cur.take();
    std::string entity;
    while (!cur.eof() && cur.peek() != ';') {
        entity += cur.take();
        if (entity.size() > 8) cur.fail("unterminated entity reference");
    }
    if (cur.eof()) cur.fail("unterminated entity reference");
    cur.take(); // ';'
    if (entity == "amp")
        out += '&';
    else if (entity == "lt")
        out += '<';
    else if (entity == "gt")
        out += '>';
    else if (entity == "quot")
        out += '"';
    else if (entity == "apos")
        out += '\'';
    else if (entity.starts_with("#x") || entity.starts_with("#X"))
        out += static_cast<char>(std::stoi(entity.substr(2), nullptr, 16));
    else if (entity.starts_with('#'))
        out += static_cast<char>(std::stoi(entity.substr(1)));
    else
        cur.fail("unknown entity '&" + entity + ";'");
}

void skip_misc(Cursor& cur) {
    for (;;) {
        cur.skip_whitespace();
        if (cur.starts_with("<!--")) {
            cur.skip(4);
            while (!cur.eof() && !cur.starts_with("-->")) cur.take();
            if (cur.eof()) cur.fail("unterminated comment");
            cur.skip(3);
        } else if (cur.starts_with("<?")) {
            cur.skip(2);
            while (!cur.eof() && !cur.starts_with("?>")) cur.take();
            if (cur.eof()) cur.fail("unterminated processing instruction");
            cur.skip(2);
        } else {
            return;
        }
    }
}

Node parse_element(Cursor& cur) {
    if (cur.eof() || cur.peek() != '<') cur.fail("expected '<'");
    Node node;
    node.line = cur.line();
    node.column = cur.column();
    cur.take(); // '<'
    node.name = read_name(cur);

    // attributes
    for (;;) {
        cur.skip_whitespace();
        if (cur.eof()) cur.fail("unterminated start tag for <" + node.name + ">");
        if (cur.peek() == '>' || cur.starts_with("/>")) break;
        std::string key = read_name(cur);
        cur.skip_whitespace();
        if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after attribute '" + key + "'");
        cur.take();
        cur.skip_whitespace();
        if (cur.eof() || (cur.peek() != '"' && cur.peek() != '\'')) {
            cur.fail("expected quoted attribute value for '" + key + "'");
        }
        char quote = cur.take();
        std::string value;
        while (!cur.eof() && cur.peek() != quote) {
            if (cur.peek() == '&')
                append_entity(cur, value);
            else if (cur.peek() == '<')
                cur.fail("'<' not allowed in attribute value");
            else
                value += cur.take();
        }
        if (cur.eof()) cur.fail("unterminated attribute value for '" + key + "'");
        cur.take(); // closing quote
        node.attributes.emplace_back(std::move(key), std::move(value));
    }

    if (cur.starts_with("/>")) {
        cur.skip(2);
        return node;
    }
    cur.take(); // '>'

    // content
    for (;;) {
        if (cur.eof()) cur.fail("missing closing tag for <" + node.name + ">");
        if (cur.starts_with("</")) {
            cur.skip(2);
            std::string closing = read_name(cur);
            if (closing != node.name) {
                cur.fail("mismatched closing tag </" + closing + ">, expected </" + node.name + ">");
            }
            cur.skip_whitespace();
            if (cur.eof() || cur.peek() != '>') cur.fail("malformed closing tag");
            cur.take();
            return node;
        }
        if (cur.starts_with("<!--")) {
            cur.skip(4);
            while (!cur.eof() && !cur.starts_with("-->")) cur.take();
            if (cur.eof()) cur.fail("unterminated comment");
            cur.skip(3);
        } else if (cur.starts_with("<!")) {
            cur.fail("declarations are not supported");
        } else if (cur.peek() == '<') {
            node.children.push_back(parse_element(cur));
        } else if (cur.peek() == '&') {
            append_entity(cur, node.text);
        } else {
            node.text += cur.take();
        }
    }
}

std::string trimmed(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

void trim_text(Node& node) {
    node.text = trimmed(node.text);
    for (auto& c : node.children) trim_text(c);
}

void write_node(const Node& node, std::string& out, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out += indent;
    out += '<';
    out += node.name;
    for (const auto& [k, v] : node.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        out += escape_attribute(v);
        out += '"';
    }
    if (node.children.empty() && node.text.empty()) {
        out += "/>\n";
        return;
    }
    out += '>';
    if (node.children.empty()) {
        out += escape_text(node.text);
        out += "</" + node.name + ">\n";
        return;
    }
    out += '\n';
    if (!node.text.empty()) {
        out += std::string((static_cast<std::size_t>(depth) + 1) * 2, ' ');
        out += escape_text(node.text);
        out += '\n';
    }
    for (const auto& c : node.children) write_node(c, out, depth + 1);
    out += indent;
    out += "</" + node.name + ">\n";
}

} // namespace

Node parse(std::string_view input) {
    Cursor cur(input);
    skip_misc(cur);
    if (cur.eof()) cur.fail("document has no root element");
    Node root = parse_element(cur);
    skip_misc(cur);
    if (!cur.eof()) cur.fail("content after the root element");
    trim_text(root);
    return root;
}

std::string serialize(const Node& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_node(root, out, 0);
    return out;
}

std::string escape_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace atml::xml
