#pragma once

// Text format for knowledge bases and decision models.
//
//   prop p, q.                 act a, b.                state s.
//   root a = s.                holds s : p, q & r, ~t.
//   contr p & q = -60.         assess u(s | expense, access) = 10.
//   utility s = 2.             chance s : e = 0.4 ? s_e : s_not_e.
//   evidence desir(p).         presume name: body => head.
//   strict name: body -> head.
//
// `#` starts a comment; every statement ends with `.`. Rule bodies are
// comma-separated literals (possibly empty). Identifiers starting with an
// uppercase letter that are declared nowhere in the document are rule
// variables.

#include "ddec/logic.hpp"
#include "ddec/model.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddec {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message);

    int line() const { return line_; }
    int column() const { return column_; }
    // The message without the position prefix.
    const std::string& detail() const { return detail_; }

private:
    int line_;
    int column_;
    std::string detail_;
};

struct Statement {
    std::string keyword;  // prop, act, state, root, holds, contr, ...
    std::string text;     // source text, terminator included
    int line = 0;
    int column = 0;
};

struct Document {
    std::vector<Statement> statements;
    KnowledgeBase kb;
    DecisionModel model;
};

Document parse(std::string_view text);

// Parses a single literal against a document's vocabulary (variables are
// not allowed). Used for queries.
Literal parse_literal(std::string_view text, const KnowledgeBase& kb);

// Number of statements in `text` (syntax only, no declaration checks).
std::size_t count_statements(std::string_view text);

// Canonical text: declarations, facts, rules, then the model structure
// (roots and expansions). Deterministic; parse(serialize(d)) yields an
// equal knowledge base.
std::string serialize(const Document& doc);
std::string serialize(const KnowledgeBase& kb);

}  // namespace ddec
