// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fedxlat/errors.hpp"

namespace fedxlat {

enum class Language {
    Java,
    CSharp,
    Toy,
};

const char* to_string(Language language);
Language language_from_string(const std::string& name);

// Reserved words of the language, sorted; empty for Toy.
const std::vector<std::string>& language_keywords(Language language);
bool is_keyword(const std::string& token, Language language);

// True for tokens shaped like identifiers: [A-Za-z_][A-Za-z0-9_]*.
bool is_identifier(const std::string& token);

// Splits on whitespace; every non-alphanumeric, non-underscore character
// becomes its own single-character token.
std::vector<std::string> tokenize_code(const std::string& text, Language language);

// Structural parse tree. A node is either a token leaf (token non-empty,
// no children) or a labeled construct: "stmt" or a heading keyword for
// statements, "{}", "()", "[]" for nesting groups.
struct SyntaxNode {
    std::string label;
    std::string token;
    std::vector<SyntaxNode> children;

    bool is_leaf() const { return !token.empty(); }
};

class SyntaxTreeProvider {
  public:
    virtual ~SyntaxTreeProvider() = default;
    virtual SyntaxNode parse(const std::string& text, Language language) const = 0;
};

// Bundled provider: tracks {} () [] nesting, ";" statement boundaries, and
// keyword-headed statements. Total on any input: a mismatched closer stops
// consumption (longest parseable prefix) and EOF implicitly closes all open
// constructs.
class BracketTreeProvider final : public SyntaxTreeProvider {
  public:
    SyntaxNode parse(const std::string& text, Language language) const override;
};

const SyntaxTreeProvider& bundled_tree_provider();

// Leaf depth 0; construct depth = 1 + max child depth (1 when childless).
std::size_t node_depth(const SyntaxNode& node);

// Serialized multiset of all depth >= 2 subtrees below the root, identifier
// leaves anonymized to "ID".
std::map<std::string, std::size_t> subtree_counts(const SyntaxNode& root, Language language);

// A def-use edge: one identifier occurrence reached by the def_ordinal-th
// assignment to that variable. Variables are anonymized by first-def order,
// so consistently renamed code yields identical edges.
struct DataflowEdge {
    std::string variable;
    std::size_t def_ordinal;

    bool operator==(const DataflowEdge&) const = default;
    auto operator<=>(const DataflowEdge&) const = default;
};

// Defs are identifiers immediately left of a plain "=" (not ==, <=, >=, !=)
// or of a compound assignment like "+="; a compound assignment also uses its
// own prior value. Every other identifier occurrence with a prior def of the
// same name is a use.
std::vector<DataflowEdge> dataflow_edges(const std::string& text, Language language);

}  // namespace fedxlat
