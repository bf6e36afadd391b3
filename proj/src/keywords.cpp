// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>
#include <vector>

#include "fedxlat/code_structure.hpp"

namespace fedxlat {

namespace {

// Java SE reserved words plus the boolean/null literals, sorted.
const std::vector<std::string> kJavaKeywords = {
    "abstract", "assert",       "boolean",  "break",      "byte",    "case",
    "catch",    "char",         "class",    "const",      "continue", "default",
    "do",       "double",       "else",     "enum",       "extends", "false",
    "final",    "finally",      "float",    "for",        "goto",    "if",
    "implements", "import",     "instanceof", "int",      "interface", "long",
    "native",   "new",          "null",     "package",    "private", "protected",
    "public",   "return",       "short",    "static",     "strictfp", "super",
    "switch",   "synchronized", "this",     "throw",      "throws",  "transient",
    "true",     "try",          "void",     "volatile",   "while",
};

// C# reserved keywords, sorted.
const std::vector<std::string> kCSharpKeywords = {
    "abstract", "as",       "base",     "bool",      "break",    "byte",
    "case",     "catch",    "char",     "checked",   "class",    "const",
    "continue", "decimal",  "default",  "delegate",  "do",       "double",
    "else",     "enum",     "event",    "explicit",  "extern",   "false",
    "finally",  "fixed",    "float",    "for",       "foreach",  "goto",
    "if",       "implicit", "in",       "int",       "interface", "internal",
    "is",       "lock",     "long",     "namespace", "new",      "null",
    "object",   "operator", "out",      "override",  "params",   "private",
    "protected", "public",  "readonly", "ref",       "return",   "sbyte",
    "sealed",   "short",    "sizeof",   "stackalloc", "static",  "string",
    "struct",   "switch",   "this",     "throw",     "true",     "try",
    "typeof",   "uint",     "ulong",    "unchecked", "unsafe",   "ushort",
    "using",    "virtual",  "void",     "volatile",  "while",
};

const std::vector<std::string> kNoKeywords = {};

}  // namespace

const std::vector<std::string>& language_keywords(Language language) {
    switch (language) {
        case Language::Java:
            return kJavaKeywords;
        case Language::CSharp:
            return kCSharpKeywords;
        case Language::Toy:
            return kNoKeywords;
    }
    return kNoKeywords;
}

bool is_keyword(const std::string& token, Language language) {
    const std::vector<std::string>& keywords = language_keywords(language);
    return std::binary_search(keywords.begin(), keywords.end(), token);
}

}  // namespace fedxlat
