// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/code_structure.hpp"

#include <algorithm>
#include <cctype>

namespace fedxlat {

const char* to_string(Language language) {
    switch (language) {
        case Language::Java:
            return "java";
        case Language::CSharp:
            return "csharp";
        case Language::Toy:
            return "toy";
    }
    return "toy";
}

Language language_from_string(const std::string& name) {
    if (name == "java") return Language::Java;
    if (name == "csharp") return Language::CSharp;
    if (name == "toy") return Language::Toy;
    throw ArgumentError("unknown language '" + name + "' (expected java, csharp, or toy)");
}

bool is_identifier(const std::string& token) {
    if (token.empty()) return false;
    const unsigned char head = static_cast<unsigned char>(token[0]);
    if (!std::isalpha(head) && token[0] != '_') return false;
    for (char c : token) {
        const unsigned char uc = static_cast<unsigned char>(c);
        if (!std::isalnum(uc) && c != '_') return false;
    }
    return true;
}

std::vector<std::string> tokenize_code(const std::string& text, Language language) {
    (void)language;  // one splitting rule for all supported languages
    std::vector<std::string> tokens;
    std::string word;
    for (char c : text) {
        const unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc) || c == '_') {
            word.push_back(c);
            continue;
        }
        if (!word.empty()) {
            tokens.push_back(word);
            word.clear();
        }
        if (!std::isspace(uc)) {
            tokens.push_back(std::string(1, c));
        }
    }
    if (!word.empty()) tokens.push_back(word);
    return tokens;
}

namespace {

bool is_closer(const std::string& token) {
    return token == "}" || token == ")" || token == "]";
}

// Recursive-descent pass over the token stream. `halted` latches on the first
// mismatched closer: everything after it is dropped and all open constructs
// close implicitly, so the tree covers the longest parseable prefix.
struct BracketParser {
    const std::vector<std::string>& tokens;
    Language language;
    std::size_t pos = 0;
    bool halted = false;

    bool done() const { return halted || pos >= tokens.size(); }

    SyntaxNode run() {
        SyntaxNode root;
        root.label = "root";
        parse_sequence(root, "");
        return root;
    }

    void parse_sequence(SyntaxNode& parent, const std::string& closer) {
        while (!done()) {
            const std::string& t = tokens[pos];
            if (t == closer) return;
            if (is_closer(t)) {
                halted = true;
                return;
            }
            parse_statement(parent, closer);
        }
    }

    void parse_statement(SyntaxNode& parent, const std::string& closer) {
        SyntaxNode stmt;
        stmt.label = is_keyword(tokens[pos], language) ? tokens[pos] : "stmt";
        while (!done()) {
            const std::string& t = tokens[pos];
            if (t == ";") {
                ++pos;
                break;
            }
            if (t == closer || is_closer(t)) break;  // sequence loop decides
            if (t == "{") {
                ++pos;
                SyntaxNode block;
                block.label = "{}";
                parse_sequence(block, "}");
                if (!done() && tokens[pos] == "}") ++pos;
                stmt.children.push_back(std::move(block));
                break;  // a block closes the statement it heads
            }
            if (t == "(" || t == "[") {
                stmt.children.push_back(parse_group(t));
                continue;
            }
            SyntaxNode leaf;
            leaf.token = t;
            stmt.children.push_back(std::move(leaf));
            ++pos;
        }
        if (!stmt.children.empty()) {
            parent.children.push_back(std::move(stmt));
        }
    }

    SyntaxNode parse_group(const std::string& open) {
        SyntaxNode group;
        group.label = open == "(" ? "()" : "[]";
        const std::string closer = open == "(" ? ")" : "]";
        ++pos;
        while (!done()) {
            const std::string& t = tokens[pos];
            if (t == closer) {
                ++pos;
                break;
            }
            if (is_closer(t)) {
                halted = true;
                break;
            }
            if (t == "{") {
                ++pos;
                SyntaxNode block;
                block.label = "{}";
                parse_sequence(block, "}");
                if (!done() && tokens[pos] == "}") ++pos;
                group.children.push_back(std::move(block));
                continue;
            }
            if (t == "(" || t == "[") {
                group.children.push_back(parse_group(t));
                continue;
            }
            SyntaxNode leaf;
            leaf.token = t;
            group.children.push_back(std::move(leaf));
            ++pos;
        }
        return group;
    }
};

void serialize_node(const SyntaxNode& node, Language language, std::string& out) {
    if (node.is_leaf()) {
        if (is_identifier(node.token) && !is_keyword(node.token, language)) {
            out += "ID";
        } else {
            out += node.token;
        }
        return;
    }
    out += '(';
    out += node.label;
    for (const SyntaxNode& child : node.children) {
        out += ' ';
        serialize_node(child, language, out);
    }
    out += ')';
}

void collect_subtrees(const SyntaxNode& node, Language language,
                      std::map<std::string, std::size_t>& counts) {
    if (node.is_leaf()) return;
    if (node_depth(node) >= 2) {
        std::string key;
        serialize_node(node, language, key);
        ++counts[key];
    }
    for (const SyntaxNode& child : node.children) {
        collect_subtrees(child, language, counts);
    }
}

}  // namespace

SyntaxNode BracketTreeProvider::parse(const std::string& text, Language language) const {
    const std::vector<std::string> tokens = tokenize_code(text, language);
    BracketParser parser{tokens, language};
    return parser.run();
}

const SyntaxTreeProvider& bundled_tree_provider() {
    static const BracketTreeProvider provider;
    return provider;
}

std::size_t node_depth(const SyntaxNode& node) {
    if (node.is_leaf()) return 0;
    std::size_t deepest = 0;
    for (const SyntaxNode& child : node.children) {
        deepest = std::max(deepest, node_depth(child));
    }
    return 1 + deepest;
}

std::map<std::string, std::size_t> subtree_counts(const SyntaxNode& root, Language language) {
    std::map<std::string, std::size_t> counts;
    for (const SyntaxNode& child : root.children) {
        collect_subtrees(child, language, counts);
    }
    return counts;
}

namespace {

bool is_compound_op(const std::string& token) {
    return token == "+" || token == "-" || token == "*" || token == "/" ||
           token == "%" || token == "&" || token == "|" || token == "^";
}

}  // namespace

std::vector<DataflowEdge> dataflow_edges(const std::string& text, Language language) {
    const std::vector<std::string> tokens = tokenize_code(text, language);
    const std::size_t count = tokens.size();

    auto token_at = [&](std::size_t i) -> const std::string& {
        static const std::string empty;
        return i < count ? tokens[i] : empty;
    };
    auto is_variable = [&](const std::string& t) {
        return is_identifier(t) && !is_keyword(t, language);
    };

    std::map<std::string, std::string> anon;       // name -> v<k> by first def
    std::map<std::string, std::size_t> def_count;  // name -> defs seen so far
    std::vector<DataflowEdge> edges;

    auto anon_of = [&](const std::string& name) -> const std::string& {
        auto it = anon.find(name);
        if (it == anon.end()) {
            it = anon.emplace(name, "v" + std::to_string(anon.size())).first;
        }
        return it->second;
    };

    for (std::size_t i = 0; i < count; ++i) {
        const std::string& t = tokens[i];
        if (!is_variable(t)) continue;

        const std::string& next = token_at(i + 1);
        const bool plain_def = next == "=" && token_at(i + 2) != "=";
        const bool compound_def = is_compound_op(next) && token_at(i + 2) == "=";

        auto defs = def_count.find(t);
        const bool has_def = defs != def_count.end() && defs->second > 0;

        if (plain_def || compound_def) {
            if (compound_def && has_def) {
                edges.push_back({anon_of(t), defs->second - 1});  // reads old value
            }
            anon_of(t);
            ++def_count[t];
            continue;
        }
        if (has_def) {
            edges.push_back({anon_of(t), defs->second - 1});
        }
    }
    return edges;
}

}  // namespace fedxlat
