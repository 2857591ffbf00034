#include "ddec/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace ddec {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column), detail_(message)
{
}

namespace {

// --- Lexer -------------------------------------------------------------------

enum class Tok { Ident, Number, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
    std::size_t offset = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        t.offset = i;
        std::size_t j = i;
        if (ident_start(c)) {
            while (j < src.size() && ident_char(src[j])) ++j;
            t.kind = Tok::Ident;
        } else if (digit(c) || (c == '-' && i + 1 < src.size() && digit(src[i + 1]))) {
            if (c == '-') ++j;
            while (j < src.size() && digit(src[j])) ++j;
            if (j + 1 < src.size() && src[j] == '.' && digit(src[j + 1])) {
                ++j;
                while (j < src.size() && digit(src[j])) ++j;
            } else if (j + 1 < src.size() && src[j] == '/' && digit(src[j + 1])) {
                ++j;
                while (j < src.size() && digit(src[j])) ++j;
            }
            t.kind = Tok::Number;
        } else if ((c == '=' || c == '-') && i + 1 < src.size() && src[i + 1] == '>') {
            j = i + 2;
            t.kind = Tok::Sym;
        } else if (std::string_view(".,:=?()|&~-").find(c) != std::string_view::npos) {
            j = i + 1;
            t.kind = Tok::Sym;
        } else {
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(src.substr(i, j - i));
        advance(j - i);
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    end.offset = src.size();
    out.push_back(end);
    return out;
}

// --- Parser --------------------------------------------------------------------

enum class Sort { Prop, State, Act, Event, Any };

const char* sort_name(Sort s)
{
    switch (s) {
    case Sort::Prop: return "property";
    case Sort::State: return "state";
    case Sort::Act: return "act";
    case Sort::Event: return "event";
    case Sort::Any: return "identifier";
    }
    return "?";
}

struct Ref {
    Id id;
    Sort sort;
    int line;
    int column;
};

struct PendingRule {
    Rule rule;
    std::vector<Ref> refs;
    int line;
    int column;
};

struct Declaration {
    std::string category;
    int line;
    bool explicit_decl;
};

const std::set<std::string> kKeywords = {"prop",   "act",     "state",    "root",    "holds",  "contr",
                                         "assess", "utility", "chance",   "evidence", "presume", "strict"};

class Parser {
public:
    Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

    Document document()
    {
        while (peek().kind != Tok::End) statement();
        finish();
        doc_.model = DecisionModel::of(doc_.kb);
        return std::move(doc_);
    }

    // A single literal checked against an existing vocabulary.
    Literal lone_literal(const KnowledgeBase& kb)
    {
        doc_.kb = kb;
        for (const auto& id : kb.vocab.props) declared_.emplace(id, Declaration{"prop", 0, true});
        for (const auto& id : kb.vocab.acts) declared_.emplace(id, Declaration{"act", 0, true});
        for (const auto& id : kb.vocab.states) declared_.emplace(id, Declaration{"state", 0, true});
        for (const auto& id : kb.vocab.events) declared_.emplace(id, Declaration{"event", 0, true});
        std::vector<Ref> refs;
        Literal l = literal(refs);
        if (peek().kind == Tok::Sym && peek().text == ".") next();
        expect_end();
        check_refs(refs);
        return l;
    }

private:
    // Tokens ---------------------------------------------------------------
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next()
    {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.column, msg); }
    std::string describe(const Token& t) const
    {
        return t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    }
    bool at_sym(std::string_view s) const { return peek().kind == Tok::Sym && peek().text == s; }
    const Token& expect_sym(std::string_view s)
    {
        if (!at_sym(s)) fail(peek(), "expected '" + std::string(s) + "', found " + describe(peek()));
        return next();
    }
    const Token& expect_ident(const char* what)
    {
        if (peek().kind != Tok::Ident) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
        return next();
    }
    Rational number()
    {
        if (peek().kind != Tok::Number) fail(peek(), "expected a number, found " + describe(peek()));
        const Token& t = next();
        try {
            return Rational::parse(t.text);
        } catch (const std::exception& e) {
            fail(t, e.what());
        }
    }
    void expect_end() const
    {
        if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()));
    }

    // Declarations ---------------------------------------------------------
    void declare(const Token& t, const std::string& category, bool explicit_decl)
    {
        auto it = declared_.find(t.text);
        if (it != declared_.end()) {
            const Declaration& d = it->second;
            bool compatible = d.category == category && (!explicit_decl || !d.explicit_decl);
            if (compatible) {
                if (explicit_decl) it->second.explicit_decl = true;
                return;
            }
            if (d.category == category)
                fail(t, "duplicate declaration of " + category + " '" + t.text + "' (first on line " +
                            std::to_string(d.line) + ")");
            fail(t, "'" + t.text + "' is already declared as " + d.category + " on line " + std::to_string(d.line));
        }
        declared_.emplace(t.text, Declaration{category, t.line, explicit_decl});
        auto& v = doc_.kb.vocab;
        if (category == "prop") v.props.insert(t.text);
        else if (category == "act") v.acts.insert(t.text);
        else if (category == "state") v.states.insert(t.text);
        else if (category == "event") v.events.insert(t.text);
    }

    bool declared_as(const Id& id, Sort sort) const
    {
        auto it = declared_.find(id);
        if (it == declared_.end()) return false;
        const std::string& c = it->second.category;
        switch (sort) {
        case Sort::Prop: return c == "prop" || c == "event";
        case Sort::State: return c == "state";
        case Sort::Act: return c == "act";
        case Sort::Event: return c == "event";
        case Sort::Any: return true;
        }
        return false;
    }

    void check_refs(const std::vector<Ref>& refs) const
    {
        for (const auto& r : refs)
            if (r.sort != Sort::Any && !declared_as(r.id, r.sort))
                throw ParseError(r.line, r.column, std::string("undeclared ") + sort_name(r.sort) + " '" + r.id + "'");
    }

    // Formulas and literals --------------------------------------------------
    Id ref(std::vector<Ref>& refs, Sort sort, const char* what)
    {
        const Token& t = expect_ident(what);
        refs.push_back({t.text, sort, t.line, t.column});
        return t.text;
    }

    std::vector<Id> conj_ids(std::vector<Ref>& refs, Sort sort, const char* what)
    {
        std::vector<Id> ids{ref(refs, sort, what)};
        while (at_sym("&")) {
            next();
            ids.push_back(ref(refs, sort, what));
        }
        return ids;
    }

    PropFormula formula(std::vector<Ref>& refs)
    {
        bool negated = false;
        if (at_sym("~")) {
            next();
            negated = true;
        }
        std::vector<Id> atoms;
        if (at_sym("(")) {
            next();
            atoms = conj_ids(refs, Sort::Prop, "a property");
            expect_sym(")");
        } else if (negated) {
            atoms = {ref(refs, Sort::Prop, "a property")};
        } else {
            atoms = conj_ids(refs, Sort::Prop, "a property");
        }
        return conj_normalize(std::move(atoms), negated);
    }

    Literal literal(std::vector<Ref>& refs)
    {
        if (at_sym("~")) {
            next();
            Literal l = literal(refs);
            return l.negation();
        }
        const Token& head = expect_ident("a literal");
        const std::string& name = head.text;
        if (name == "not" && at_sym("-") && peek(1).kind == Tok::Ident && peek(1).text == "do") {
            next();
            next();
            expect_sym("(");
            auto acts = conj_ids(refs, Sort::Act, "an act");
            expect_sym(")");
            return Literal::not_act(make_conj(std::move(acts)));
        }
        if (name == "false") return Literal::falsum();
        if (!at_sym("(")) return Literal::atom(name);
        next();
        Literal l;
        if (name == "holds") {
            PropFormula f = formula(refs);
            expect_sym(",");
            Id s = ref(refs, Sort::State, "a state");
            expect_sym(")");
            l = Literal::holds(f, s);
        } else if (name == "achieves") {
            auto acts = conj_ids(refs, Sort::Act, "an act");
            expect_sym(",");
            PropFormula f = formula(refs);
            expect_sym(")");
            l = Literal::achieves(make_conj(std::move(acts)), f);
        } else if (name == "desir" || name == "undesir") {
            PropFormula f = formula(refs);
            expect_sym(")");
            l = name == "desir" ? Literal::desir(f) : Literal::undesir(f);
        } else if (name == "do") {
            auto acts = conj_ids(refs, Sort::Act, "an act");
            expect_sym(")");
            l = Literal::act(make_conj(std::move(acts)));
        } else if (name == "contr") {
            PropFormula f = formula(refs);
            expect_sym(")");
            expect_sym("=");
            l = Literal::contr(f, number());
        } else if (name == "u") {
            Id s = ref(refs, Sort::State, "a state");
            expect_sym(")");
            expect_sym("=");
            l = Literal::utility(s, number());
        } else if (name == "assess") {
            Id s = ref(refs, Sort::State, "a state");
            std::vector<Id> basis;
            if (at_sym("|")) {
                next();
                basis = id_list(refs, Sort::Any, "a basis factor");
            }
            expect_sym(")");
            expect_sym("=");
            l = Literal::assess(s, make_conj(std::move(basis)), number());
        } else if (name == "prob") {
            Id e = ref(refs, Sort::Event, "an event");
            expect_sym(",");
            Id s = ref(refs, Sort::State, "a state");
            expect_sym(")");
            expect_sym("=");
            l = Literal::prob(e, s, number());
        } else {
            std::vector<Id> args;
            if (!at_sym(")")) args = id_list(refs, Sort::Any, "an argument");
            expect_sym(")");
            l = Literal::atom(name, std::move(args));
        }
        return l;
    }

    std::vector<Id> id_list(std::vector<Ref>& refs, Sort sort, const char* what)
    {
        std::vector<Id> ids{ref(refs, sort, what)};
        while (at_sym(",")) {
            next();
            ids.push_back(ref(refs, sort, what));
        }
        return ids;
    }

    std::vector<Token> name_list(const char* what)
    {
        std::vector<Token> out{expect_ident(what)};
        while (at_sym(",")) {
            next();
            out.push_back(expect_ident(what));
        }
        return out;
    }

    // Statements -------------------------------------------------------------
    void statement()
    {
        const Token& kw = peek();
        if (kw.kind != Tok::Ident || !kKeywords.contains(kw.text))
            fail(kw, "expected a statement keyword, found " + describe(kw));
        next();
        const std::string& k = kw.text;
        if (k == "prop" || k == "act" || k == "state") {
            for (const auto& t : name_list(k == "prop" ? "a property name" : k == "act" ? "an act name" : "a state name"))
                declare(t, k, true);
        } else if (k == "root") {
            root_statement();
        } else if (k == "holds") {
            Id s = ref(fact_refs_, Sort::State, "a state");
            expect_sym(":");
            doc_.kb.contingent.insert(Literal::holds(formula(fact_refs_), s));
            while (at_sym(",")) {
                next();
                doc_.kb.contingent.insert(Literal::holds(formula(fact_refs_), s));
            }
        } else if (k == "contr") {
            const Token& at = peek();
            PropFormula f = formula(fact_refs_);
            expect_sym("=");
            Rational v = number();
            try {
                doc_.kb.contributions.add(f, v);
            } catch (const DuplicateEntry& e) {
                fail(at, e.what());
            }
        } else if (k == "assess") {
            const Token& u = expect_ident("'u'");
            if (u.text != "u") fail(u, "expected 'u', found " + describe(u));
            expect_sym("(");
            Id s = ref(fact_refs_, Sort::State, "a state");
            expect_sym("|");
            auto basis = id_list(fact_refs_, Sort::Any, "a basis factor");
            expect_sym(")");
            expect_sym("=");
            add_assessment(kw, Literal::assess(s, make_conj(std::move(basis)), number()));
        } else if (k == "utility") {
            Id s = ref(fact_refs_, Sort::State, "a state");
            expect_sym("=");
            add_assessment(kw, Literal::assess(s, {}, number()));
        } else if (k == "chance") {
            chance_statement(kw);
        } else if (k == "evidence") {
            evidence_statement();
        } else {
            rule_statement(k == "strict");
        }
        const Token& dot = expect_sym(".");
        std::size_t end = dot.offset + 1;
        doc_.statements.push_back({k, std::string(src_.substr(kw.offset, end - kw.offset)), kw.line, kw.column});
    }

    void root_statement()
    {
        const Token& act = expect_ident("an act");
        fact_refs_.push_back({act.text, Sort::Act, act.line, act.column});
        expect_sym("=");
        const Token& state = expect_ident("a state");
        declare(state, "state", false);
        if (doc_.kb.parent_of(state.text)) fail(state, "state '" + state.text + "' is a child in an expansion");
        if (doc_.kb.roots.contains(act.text)) fail(act, "act '" + act.text + "' already has a root state");
        for (const auto& [a, s] : doc_.kb.roots)
            if (s == state.text) fail(state, "state '" + state.text + "' is already the root of '" + a + "'");
        doc_.kb.roots.emplace(act.text, state.text);
    }

    void add_assessment(const Token& at, const Literal& l)
    {
        for (const auto& other : doc_.kb.contingent) {
            if (other.pred != Pred::Assess || other.symbol != l.symbol || other.terms != l.terms) continue;
            if (other.value != l.value) fail(at, "conflicting assessment: " + other.to_string() + " already stated");
        }
        doc_.kb.contingent.insert(l);
    }

    void chance_statement(const Token& kw)
    {
        const Token& s = expect_ident("a state");
        declare(s, "state", false);
        expect_sym(":");
        const Token& e = expect_ident("an event");
        declare(e, "event", false);
        expect_sym("=");
        const Token& kt = peek();
        Rational k = number();
        if (k < Rational(0) || k > Rational(1)) fail(kt, "probability " + k.to_string() + " outside [0, 1]");
        expect_sym("?");
        const Token& yes = expect_ident("a state");
        expect_sym(":");
        const Token& no = expect_ident("a state");
        if (yes.text == no.text) fail(no, "both branches lead to '" + no.text + "'");
        for (const Token* child : {&yes, &no}) {
            if (child->text == s.text) fail(*child, "state '" + s.text + "' cannot be its own child");
            declare(*child, "state", false);
            if (doc_.kb.parent_of(child->text))
                fail(*child, "state '" + child->text + "' already belongs to another expansion");
            if (doc_.kb.roots.end() != std::find_if(doc_.kb.roots.begin(), doc_.kb.roots.end(),
                                                    [&](const auto& r) { return r.second == child->text; }))
                fail(*child, "root state '" + child->text + "' cannot be a child");
        }
        if (doc_.kb.chance_at(s.text)) fail(s, "state '" + s.text + "' is already expanded");
        doc_.kb.chances.push_back({e.text, s.text, k, yes.text, no.text});
        chance_pos_.emplace(s.text, std::make_pair(kw.line, kw.column));
    }

    void evidence_statement()
    {
        const Token& at = peek();
        Literal l = literal(fact_refs_);
        switch (l.pred) {
        case Pred::Contr: fail(at, "contr is necessary knowledge; state it with a contr statement");
        case Pred::Prob: fail(at, "prob is necessary knowledge; state it with a chance statement");
        case Pred::Utility: fail(at, "u(s) = v cannot be evidence; use a utility statement");
        case Pred::Falsum: fail(at, "false cannot be evidence");
        default: break;
        }
        if (l.pred == Pred::Assess && !l.negated) add_assessment(at, l);
        else doc_.kb.contingent.insert(l);
    }

    void rule_statement(bool strict)
    {
        const Token& name = expect_ident("a rule name");
        if (!rule_names_.insert(name.text).second) fail(name, "duplicate rule name '" + name.text + "'");
        expect_sym(":");
        PendingRule p{{}, {}, name.line, name.column};
        Rule& r = p.rule;
        r.id = name.text;
        r.origin = name.text;
        r.strength = strict ? Strength::Strict : Strength::Defeasible;
        const char* arrow = strict ? "->" : "=>";
        if (!at_sym(arrow)) {
            r.body.push_back(literal(p.refs));
            while (at_sym(",")) {
                next();
                r.body.push_back(literal(p.refs));
            }
        }
        if (!at_sym(arrow)) {
            if (at_sym(strict ? "=>" : "->"))
                fail(peek(), strict ? "strict rules use '->'" : "presumptions use '=>'");
            fail(peek(), std::string("expected '") + arrow + "', found " + describe(peek()));
        }
        next();
        r.head = literal(p.refs);
        rules_.push_back(std::move(p));
    }

    // End of document ----------------------------------------------------------
    void finish()
    {
        check_refs(fact_refs_);

        for (auto& p : rules_) {
            Rule& r = p.rule;
            for (const auto& ref : p.refs) {
                if (declared_as(ref.id, ref.sort)) continue;
                bool variable = std::isupper(static_cast<unsigned char>(ref.id[0])) && !declared_.contains(ref.id);
                if (variable) {
                    if (std::find(r.variables.begin(), r.variables.end(), ref.id) == r.variables.end())
                        r.variables.push_back(ref.id);
                    continue;
                }
                if (ref.sort == Sort::Any) continue;
                throw ParseError(ref.line, ref.column,
                                 std::string("undeclared ") + sort_name(ref.sort) + " '" + ref.id + "' in rule '" +
                                     r.origin + "'");
            }
            (r.strength == Strength::Strict ? doc_.kb.strict_rules : doc_.kb.defeasible_rules).push_back(r);
        }

        // Expansions form a forest.
        for (const auto& c : doc_.kb.chances) {
            std::set<Id> seen{c.state};
            const ProbabilityFact* up = doc_.kb.parent_of(c.state);
            while (up) {
                if (!seen.insert(up->state).second) {
                    auto [line, col] = chance_pos_.at(c.state);
                    throw ParseError(line, col, "expansion of '" + c.state + "' closes a cycle");
                }
                up = doc_.kb.parent_of(up->state);
            }
        }
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Document doc_;
    std::map<Id, Declaration> declared_;
    std::vector<Ref> fact_refs_;
    std::vector<PendingRule> rules_;
    std::set<Id> rule_names_;
    std::map<Id, std::pair<int, int>> chance_pos_;
};

// --- Serializer -------------------------------------------------------------------

std::string join_ids(const std::set<Id>& ids)
{
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
    return out;
}

std::string rule_text(const Rule& r)
{
    std::string s = (r.strength == Strength::Strict ? "strict " : "presume ") + r.origin + ":";
    for (std::size_t i = 0; i < r.body.size(); ++i) s += (i ? ", " : " ") + r.body[i].to_string();
    s += r.strength == Strength::Strict ? " -> " : " => ";
    return s + r.head.to_string() + ".\n";
}

}  // namespace

Document parse(std::string_view text)
{
    Parser p(text, lex(text));
    return p.document();
}

Literal parse_literal(std::string_view text, const KnowledgeBase& kb)
{
    Parser p(text, lex(text));
    return p.lone_literal(kb);
}

std::size_t count_statements(std::string_view text)
{
    std::size_t n = 0;
    for (const auto& t : lex(text))
        if (t.kind == Tok::Sym && t.text == ".") ++n;
    return n;
}

std::string serialize(const KnowledgeBase& kb)
{
    std::string out;
    const auto& v = kb.vocab;
    if (!v.props.empty()) out += "prop " + join_ids(v.props) + ".\n";
    if (!v.acts.empty()) out += "act " + join_ids(v.acts) + ".\n";
    if (!v.states.empty()) out += "state " + join_ids(v.states) + ".\n";

    for (const auto& [f, x] : kb.contributions.entries()) out += "contr " + f.to_string() + " = " + x.to_string() + ".\n";

    std::map<Id, std::vector<std::string>> holds;
    std::vector<std::string> evidence;
    std::string assessments;
    for (const auto& l : kb.contingent) {
        if (l.pred == Pred::Holds && !l.negated) {
            holds[l.symbol].push_back(l.formula->to_string());
        } else if (l.pred == Pred::Assess && !l.negated) {
            if (l.terms.empty()) {
                assessments += "utility " + l.symbol + " = " + l.value->to_string() + ".\n";
            } else {
                std::string basis;
                for (const auto& b : l.terms) basis += (basis.empty() ? "" : ", ") + b;
                assessments += "assess u(" + l.symbol + " | " + basis + ") = " + l.value->to_string() + ".\n";
            }
        } else {
            evidence.push_back("evidence " + l.to_string() + ".\n");
        }
    }
    for (const auto& [s, fs] : holds) {
        out += "holds " + s + " :";
        for (std::size_t i = 0; i < fs.size(); ++i) out += (i ? ", " : " ") + fs[i];
        out += ".\n";
    }
    out += assessments;
    for (const auto& e : evidence) out += e;

    for (const auto& r : kb.strict_rules) out += rule_text(r);
    for (const auto& r : kb.defeasible_rules) out += rule_text(r);

    for (const auto& [a, s] : kb.roots) out += "root " + a + " = " + s + ".\n";
    for (const auto& c : kb.chances)
        out += "chance " + c.state + " : " + c.event + " = " + c.k.to_string() + " ? " + c.if_event + " : " +
               c.if_not_event + ".\n";
    return out;
}

std::string serialize(const Document& doc)
{
    return serialize(doc.kb);
}

}  // namespace ddec
