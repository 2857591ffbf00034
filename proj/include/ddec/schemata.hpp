#pragma once

// Compiles the built-in decision schemata into ground defeasible rule
// instances, on demand, for the terms a query actually touches.

#include "ddec/logic.hpp"

#include <map>
#include <memory>
#include <set>
#include <span>
#include <vector>

namespace ddec {

struct GroundingConfig {
    // Largest conjunction split additively or valued through holds-formulas.
    std::size_t max_arity = 4;
    std::size_t instance_limit = 100000;
};

// Everything the argument engine reasons over: the KB, its ground strict
// rules, the ground defeasible instances relevant to a query, and the strict
// closure of the evidence.
struct GroundTheory {
    KnowledgeBase kb;
    std::vector<Rule> strict;
    std::vector<Rule> defeasible;
    Closure base;
    Closure necessary;  // prob facts alone under strict rules; seeds necessary_closure

    std::vector<const Rule*> strict_ptrs() const;
    // Closure of prob facts and `facts` (no contingent evidence) under strict rules.
    Closure necessary_closure(std::span<const Literal> facts, std::span<const Rule* const> extra = {}) const;
};

class SchemaGrounder {
public:
    explicit SchemaGrounder(KnowledgeBase kb, GroundingConfig config = {});

    // contr(f): the table entry, if any, plus one additive instance per
    // binary split of f's atoms and per pair of derivable part values.
    std::vector<Rule> contribution_arguments(const PropFormula& f);

    // u(s) from holds-formulas with derivable contributions, and from
    // assessments (including direct valuations) on s.
    std::vector<Rule> state_utility_instances(const Id& state);

    // u(s) as the probability-weighted value of the children of s's
    // expansion, one instance per pair of candidate child values. Empty when
    // s is unexpanded or a child has no candidate value.
    std::vector<Rule> expected_utility_instances(const Id& state);

    // do(a) / ~do(a) from achieves + (un)desir evidence, plus composition
    // for joint acts.
    std::vector<Rule> practical_instances(const Conj& act);

    // do(a) and ~do(b) for every pair of candidate root values with
    // u(root a) > u(root b). Ties produce nothing.
    std::vector<Rule> comparison_instances(const Id& a, const Id& b);

    // Candidate values of a numeric term (what some instance could conclude).
    std::set<Rational> candidates(const Literal& term);

    // Demand-driven grounding: instances for the goals' terms and everything
    // their bodies need. User rules are always included in full.
    GroundTheory ground_for(std::span<const Literal> goals);

    const KnowledgeBase& kb() const { return kb_; }

private:
    std::vector<Rule> instances_for(const Literal& term);
    std::vector<Rule> user_instances_for(const Literal& term) const;

    KnowledgeBase kb_;
    GroundingConfig config_;
    std::vector<Rule> strict_;
    std::vector<Rule> user_defeasible_;
    Closure optimistic_;  // evidence + every user rule, ignoring conflicts
    std::map<Literal, std::vector<Rule>> memo_;
};

// do(a) for every declared act, in name order.
std::vector<Literal> act_goals(const KnowledgeBase& kb);

}  // namespace ddec
