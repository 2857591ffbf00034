#pragma once

// Ground representation shared by every other module: property formulas,
// literals, rules, the knowledge base, and strict closure.

#include "ddec/rational.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddec {

using Id = std::string;

// Sorted, duplicate-free identifier list. Used for conjunctions of atoms,
// joint acts and assessment bases.
using Conj = std::vector<Id>;

Conj make_conj(std::vector<Id> ids);
bool is_subset(const Conj& sub, const Conj& super);

class MalformedFormula : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A conjunction of properties, optionally negated as a whole. Only
// conj_normalize() builds one, so every value is canonical: P & Q equals
// Q & P and P & P equals P.
class PropFormula {
public:
    const Conj& atoms() const { return atoms_; }
    bool negated() const { return negated_; }
    std::size_t arity() const { return atoms_.size(); }

    std::string to_string() const;

    friend PropFormula conj_normalize(std::vector<Id> atoms, bool negated);

    friend bool operator==(const PropFormula&, const PropFormula&) = default;
    friend auto operator<=>(const PropFormula&, const PropFormula&) = default;

private:
    PropFormula() = default;
    bool negated_ = false;
    Conj atoms_;
};

PropFormula conj_normalize(std::vector<Id> atoms, bool negated = false);
PropFormula conj_normalize(const PropFormula& f);

enum class Pred : unsigned char {
    Falsum,
    Atom,      // user predicate: name(args...)
    Holds,     // holds(F, s)
    Achieves,  // achieves(a, F)
    Desir,     // desir(F)
    Undesir,   // undesir(F)
    Do,        // do(a) / ~do(a)
    Contr,     // contr(F) = v
    Utility,   // u(s) = v
    Assess,    // assess(s | basis) = v; an empty basis is a direct valuation
    Prob,      // prob(E, s) = k
};

// Ground (or, inside rule templates, variable-bearing) literal. Which
// fields are meaningful depends on `pred`; the factories below fill them.
struct Literal {
    Pred pred = Pred::Atom;
    bool negated = false;
    Id symbol;                           // atom name; state for holds/u/assess/prob
    Conj terms;                          // atom args; act term; assessment basis
    Id event;                            // prob only
    std::optional<PropFormula> formula;  // holds, achieves, desir, undesir, contr
    std::optional<Rational> value;       // contr, u, assess, prob

    static Literal falsum();
    static Literal atom(Id name, std::vector<Id> args = {});
    static Literal holds(PropFormula f, Id state);
    static Literal achieves(Conj acts, PropFormula f);
    static Literal desir(PropFormula f);
    static Literal undesir(PropFormula f);
    static Literal act(Conj acts);
    static Literal not_act(Conj acts);
    static Literal contr(PropFormula f, Rational v);
    static Literal utility(Id state, Rational v);
    static Literal assess(Id state, Conj basis, Rational v);
    static Literal prob(Id event, Id state, Rational k);

    const Id& state() const { return symbol; }
    bool is_numeric() const;
    // Necessary literals never enter a contingent base.
    bool is_necessary_kind() const { return pred == Pred::Contr || pred == Pred::Prob; }

    Literal negation() const;
    Literal positive() const;

    std::string to_string() const;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

// The functional term a literal speaks about: u(s) for u(s)=v, do(a) for
// both do(a) and ~do(a), desirability of F for desir/undesir. Two literals
// can only clash when their terms coincide.
Literal term_of(const Literal& l);

enum class Strength : unsigned char { Strict, Defeasible };

// Which schema produced a ground rule instance.
enum class Schema : unsigned char {
    User,
    ContrEntry,       // table entry: contr(F) = v
    Additive,         // contr(F1) = x, contr(F2) = y => contr(F1 & F2) = x + y
    StateFormula,     // holds(F, s), contr(F) = x => u(s) = x
    Assessment,       // assess(s | B) = v => u(s) = v
    ExpectedUtility,  // prob(E, s) = k, u(c+) = x, u(c-) = y => u(s) = kx + (1-k)y
    Practical,        // achieves(a, d), (un)desir(d) => (~)do(a)
    Composition,      // do(a1), do(a2) => do(a1 & a2)
    Comparison,       // u(r(a)) = x, u(r(b)) = y, x > y => do(a) / ~do(b)
};

const char* schema_name(Schema s);

struct Rule {
    Id id;
    std::vector<Literal> body;
    Literal head;
    Strength strength = Strength::Defeasible;
    Schema schema = Schema::User;
    Id origin;  // rule name for user rules, schema tag otherwise

    // Ground instances only: what specificity tie-breakers look at.
    Id state;                            // subject state of u(s) instances
    Conj basis;                          // assessment basis
    std::optional<PropFormula> formula;  // contr entry / state formula
    std::vector<Id> acts;                // comparison: (winner, loser)

    // Template only: identifiers that are variables.
    std::vector<Id> variables;

    std::string to_string() const;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct Vocabulary {
    std::set<Id> props;
    std::set<Id> acts;
    std::set<Id> states;
    std::set<Id> events;

    bool declares(const Id& id) const;
    // Atoms usable inside formulas: properties and events.
    bool is_atom(const Id& id) const { return props.contains(id) || events.contains(id); }

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

struct ProbabilityFact {
    Id event;
    Id state;
    Rational k;
    Id if_event;      // <E; s>
    Id if_not_event;  // <~E; s>

    friend bool operator==(const ProbabilityFact&, const ProbabilityFact&) = default;
};

struct AssessedUtility {
    Id state;
    Conj basis;  // empty for a direct `utility` valuation
    Rational value;

    friend bool operator==(const AssessedUtility&, const AssessedUtility&) = default;
};

class DuplicateEntry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// contr entries keyed by canonical formula; equivalent formulas collide.
class ContributionTable {
public:
    void add(const PropFormula& f, const Rational& v);
    bool erase(const PropFormula& f) { return entries_.erase(f) > 0; }
    const Rational* find(const PropFormula& f) const;
    const std::map<PropFormula, Rational>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    friend bool operator==(const ContributionTable&, const ContributionTable&) = default;

private:
    std::map<PropFormula, Rational> entries_;
};

struct KnowledgeBase {
    Vocabulary vocab;

    // Necessary knowledge.
    ContributionTable contributions;
    std::vector<ProbabilityFact> chances;  // at most one per state
    std::map<Id, Id> roots;                // act -> root state

    // Contingent knowledge: holds, achieves, desir/undesir, assess, user atoms.
    std::set<Literal> contingent;

    // User rules; may contain variables.
    std::vector<Rule> strict_rules;
    std::vector<Rule> defeasible_rules;

    std::vector<Literal> necessary() const;
    std::vector<AssessedUtility> assessments() const;
    const ProbabilityFact* chance_at(const Id& state) const;
    // Parent expansion of a child state, if any.
    const ProbabilityFact* parent_of(const Id& state) const;

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

class GroundingLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// All instances of a (possibly variable-bearing) user rule over the
// declared vocabulary. Each variable ranges over the vocabulary sort of the
// positions it occupies.
std::vector<Rule> instantiate(const Rule& templ, const KnowledgeBase& kb, std::size_t limit = 100000);

// Strict closure of a literal set. Conjunctions of holds/achieves are kept
// at atom level, so holds(P & Q, s) is in the closure exactly when both
// holds(P, s) and holds(Q, s) are. The children of an expansion on E hold E
// and ~E respectively and inherit the parent's holds facts; a formula holding
// in both children holds in the parent.
class Closure {
public:
    Closure() = default;
    explicit Closure(std::span<const ProbabilityFact> chances);

    void add(const Literal& l);
    // Fires rules (all treated as material implications) to a fixpoint.
    void saturate(const std::vector<const Rule*>& rules);

    bool contains(const Literal& l) const;
    bool consistent() const;

    const std::set<Literal>& explicit_literals() const { return lits_; }
    const std::set<Id>* atoms_at(const Id& state) const;
    const std::set<PropFormula>* negated_at(const Id& state) const;

private:
    bool propagate_structure();

    std::vector<ProbabilityFact> chances_;
    std::set<Literal> lits_;
    std::map<Id, std::set<Id>> holds_atoms_;
    std::map<Id, std::set<PropFormula>> holds_neg_;
    std::map<Conj, std::set<Id>> achieves_atoms_;
    std::map<Conj, std::set<PropFormula>> achieves_neg_;
};

// Ground strict rules of the KB (user templates instantiated).
std::vector<Rule> ground_strict_rules(const KnowledgeBase& kb);

// Closure of prob facts + `facts` under the KB's strict rules.
Closure strict_closure(const KnowledgeBase& kb, std::span<const Literal> facts);

bool entails(const KnowledgeBase& kb, std::span<const Literal> facts, const Literal& goal);
bool consistent(const KnowledgeBase& kb, std::span<const Literal> facts);

}  // namespace ddec
