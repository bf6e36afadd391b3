// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "fedxlat/code_structure.hpp"

#include "doctest.h"

using fedxlat::DataflowEdge;
using fedxlat::Language;
using fedxlat::SyntaxNode;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

const SyntaxNode& child(const SyntaxNode& node, std::size_t i) {
    REQUIRE(node.children.size() > i);
    return node.children[i];
}

}  // namespace

TEST_SUITE("code_structure") {

TEST_CASE("language names round-trip") {
    CHECK(fedxlat::language_from_string("java") == Language::Java);
    CHECK(fedxlat::language_from_string("csharp") == Language::CSharp);
    CHECK(fedxlat::language_from_string("toy") == Language::Toy);
    CHECK(std::string(fedxlat::to_string(Language::Java)) == "java");
    CHECK_THROWS_AS(fedxlat::language_from_string("python"), fedxlat::ArgumentError);
}

TEST_CASE("tokenizer splits words, symbols, and whitespace") {
    const std::vector<std::string> expected{"int", "x", "=", "a", "+", "1", ";"};
    CHECK(fedxlat::tokenize_code("int x=a+1;", Language::Java) == expected);
    CHECK(fedxlat::tokenize_code("int  x = a + 1 ;", Language::Java) == expected);
    CHECK(fedxlat::tokenize_code("", Language::Java).empty());
    CHECK((fedxlat::tokenize_code("a_1 b2", Language::Toy) ==
           std::vector<std::string>{"a_1", "b2"}));
    CHECK((fedxlat::tokenize_code("x==y", Language::Java) ==
           std::vector<std::string>{"x", "=", "=", "y"}));
}

TEST_CASE("identifier shape") {
    CHECK(fedxlat::is_identifier("abc"));
    CHECK(fedxlat::is_identifier("_a1"));
    CHECK_FALSE(fedxlat::is_identifier("1abc"));
    CHECK_FALSE(fedxlat::is_identifier("+"));
    CHECK_FALSE(fedxlat::is_identifier(""));
    CHECK_FALSE(fedxlat::is_identifier("a-b"));
}

TEST_CASE("keyword tables match the bundled data files") {
    struct Row {
        Language language;
        const char* file;
    };
    for (const Row& row : {Row{Language::Java, "/keywords_java.txt"},
                           Row{Language::CSharp, "/keywords_csharp.txt"}}) {
        std::vector<std::string> from_file = read_lines(std::string(FEDXLAT_DATA_DIR) + row.file);
        std::sort(from_file.begin(), from_file.end());
        const std::vector<std::string>& table = fedxlat::language_keywords(row.language);
        CHECK(table == from_file);
        CHECK(std::is_sorted(table.begin(), table.end()));
        for (const std::string& word : table) {
            CHECK(fedxlat::is_keyword(word, row.language));
        }
    }
    CHECK(fedxlat::language_keywords(Language::Toy).empty());
    CHECK(fedxlat::is_keyword("if", Language::Java));
    CHECK_FALSE(fedxlat::is_keyword("foreach", Language::Java));
    CHECK(fedxlat::is_keyword("foreach", Language::CSharp));
    CHECK_FALSE(fedxlat::is_keyword("banana", Language::Java));
}

TEST_CASE("keyword-headed statement parses to the expected tree") {
    const SyntaxNode root = fedxlat::bundled_tree_provider().parse("if (a) { b; }", Language::Java);
    REQUIRE(root.children.size() == 1);
    const SyntaxNode& stmt = child(root, 0);
    CHECK(stmt.label == "if");
    REQUIRE(stmt.children.size() == 3);
    CHECK(child(stmt, 0).token == "if");
    CHECK(child(stmt, 1).label == "()");
    CHECK(child(child(stmt, 1), 0).token == "a");
    CHECK(child(stmt, 2).label == "{}");
    const SyntaxNode& inner = child(child(stmt, 2), 0);
    CHECK(inner.label == "stmt");
    CHECK(child(inner, 0).token == "b");

    CHECK(fedxlat::node_depth(stmt) == 3);
    CHECK(fedxlat::node_depth(child(stmt, 1)) == 1);
    CHECK(fedxlat::node_depth(child(stmt, 0)) == 0);
}

TEST_CASE("parse is total: mismatched closer keeps the longest prefix") {
    const SyntaxNode root = fedxlat::bundled_tree_provider().parse("a ; ) b ;", Language::Java);
    REQUIRE(root.children.size() == 1);
    CHECK(child(root, 0).label == "stmt");
    CHECK(child(child(root, 0), 0).token == "a");
}

TEST_CASE("parse is total: EOF closes every open construct") {
    const SyntaxNode root = fedxlat::bundled_tree_provider().parse("if ( a", Language::Java);
    REQUIRE(root.children.size() == 1);
    const SyntaxNode& stmt = child(root, 0);
    REQUIRE(stmt.children.size() == 2);
    CHECK(child(stmt, 1).label == "()");
    CHECK(child(child(stmt, 1), 0).token == "a");
}

TEST_CASE("subtree multiset keeps depth >= 2 nodes with identifiers anonymized") {
    const SyntaxNode root = fedxlat::bundled_tree_provider().parse("if (a) { b; }", Language::Java);
    const auto counts = fedxlat::subtree_counts(root, Language::Java);
    REQUIRE(counts.size() == 2);
    CHECK(counts.at("(if if (() ID) ({} (stmt ID)))") == 1);
    CHECK(counts.at("({} (stmt ID))") == 1);

    // Same construct with different identifier names serializes identically.
    const SyntaxNode renamed =
        fedxlat::bundled_tree_provider().parse("if (x) { y; }", Language::Java);
    CHECK(fedxlat::subtree_counts(renamed, Language::Java) == counts);

    // A flat statement has no depth >= 2 subtree.
    const SyntaxNode flat = fedxlat::bundled_tree_provider().parse("b ;", Language::Java);
    CHECK(fedxlat::subtree_counts(flat, Language::Java).empty());
}

TEST_CASE("dataflow: defs, uses, and ordinals") {
    const auto edges = fedxlat::dataflow_edges("x = 1 ; y = x ;", Language::Java);
    REQUIRE(edges.size() == 1);
    CHECK((edges[0] == DataflowEdge{"v0", 0}));

    // Redefinition bumps the ordinal that later uses point at.
    const auto chain = fedxlat::dataflow_edges("x = 1 ; x = 2 ; y = x ;", Language::Java);
    REQUIRE(chain.size() == 1);
    CHECK((chain[0] == DataflowEdge{"v0", 1}));
}

TEST_CASE("dataflow: compound assignment reads the old value and defines") {
    const auto edges = fedxlat::dataflow_edges("x = 1 ; x += 2 ; y = x ;", Language::Java);
    REQUIRE(edges.size() == 2);
    CHECK((edges[0] == DataflowEdge{"v0", 0}));  // += reads def 0
    CHECK((edges[1] == DataflowEdge{"v0", 1}));  // final use reads def 1
}

TEST_CASE("dataflow: == is a comparison, not a definition") {
    const auto edges = fedxlat::dataflow_edges("x = 1 ; if ( x == 2 ) { }", Language::Java);
    REQUIRE(edges.size() == 1);
    CHECK((edges[0] == DataflowEdge{"v0", 0}));
}

TEST_CASE("dataflow: identifiers without a prior def produce no edge") {
    CHECK(fedxlat::dataflow_edges("y = a + b ;", Language::Java).empty());
    CHECK(fedxlat::dataflow_edges("", Language::Java).empty());
}

TEST_CASE("dataflow: consistent renaming yields identical edges") {
    const auto left =
        fedxlat::dataflow_edges("alpha = 1 ; beta = alpha ; alpha = beta ;", Language::Java);
    const auto right =
        fedxlat::dataflow_edges("first = 1 ; second = first ; first = second ;", Language::Java);
    CHECK(left == right);
    CHECK_FALSE(left.empty());
}

TEST_CASE("dataflow: keywords are never variables") {
    const auto edges = fedxlat::dataflow_edges("int x = 1 ; return x ;", Language::Java);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].variable == "v0");
}

}  // TEST_SUITE
