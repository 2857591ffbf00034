#pragma once

// The small world under deliberation: acts with their root states, the
// chance tree below them, and the considerations currently in play.
// Models and knowledge bases are values; every refinement returns new ones.

#include "ddec/argument.hpp"
#include "ddec/logic.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ddec {

struct DecisionModel {
    std::map<Id, Id> roots;                     // act -> root state
    std::set<Id> states;
    std::map<Id, ProbabilityFact> expansions;   // keyed by the expanded state
    std::map<Id, std::set<Id>> properties;      // state -> atoms described there
    std::map<Id, std::set<Conj>> bases;         // state -> assessment bases in play

    static DecisionModel of(const KnowledgeBase& kb);

    const ProbabilityFact* expansion(const Id& state) const;
    std::optional<Id> parent(const Id& state) const;
    bool is_leaf(const Id& state) const { return !expansions.contains(state); }

    friend bool operator==(const DecisionModel&, const DecisionModel&) = default;
};

class RefinementError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A holds fact to bring into the description of a state.
struct PropertyAddition {
    Id state;
    PropFormula formula;
};

using Addition = std::variant<PropertyAddition, AssessedUtility>;

using Refined = std::pair<DecisionModel, KnowledgeBase>;

// Registers a new consideration. Re-adding an identical assessment is a
// no-op; the same (state, basis) with another value is a conflict.
Refined refine_basis(const DecisionModel& m, const KnowledgeBase& kb, const Addition& addition);

// Expands an unexpanded state on event `e` with probability `k`. The
// children are named `<s>_<e>` and `<s>_not_<e>`.
Refined expand_event(const DecisionModel& m, const KnowledgeBase& kb, const Id& state, const Id& event,
                     const Rational& k);

struct Fallback {
    // Empty: no fallback. Otherwise the caller's order of inclination.
    std::vector<Id> inclination;
};

enum class RecommendationKind { Act, Interference, NoArgument };

struct Recommendation {
    RecommendationKind kind = RecommendationKind::NoArgument;
    Id act;                                      // Act only
    std::vector<Id> contenders;                  // Interference, or the field the fallback chose from
    bool fallback_used = false;
    std::map<Id, Rational> root_values;          // justified u(root) per act, where one exists
    std::map<Id, Verdict> verdicts;              // verdict on do(a) per act
    std::map<Id, DialecticTrace> traces;         // trace of do(a) per act
    bool partial = false;

    std::string summary() const;
};

Recommendation recommend(const DecisionModel& m, const KnowledgeBase& kb, const Fallback& fallback = {},
                         const EngineConfig& config = {});

class AmbiguousLeaf : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Plain bottom-up expected-utility rollback. Each leaf must have exactly one
// utility source: one assessment (direct valuations included) or, failing
// that, exactly one contribution entry whose formula holds there.
std::map<Id, Rational> rollup_oracle(const DecisionModel& m, const KnowledgeBase& kb);

struct SalientPath {
    Id act;
    std::vector<Id> states;  // root first; consecutive states are parent/child
    Rational probability;    // of reaching the last state, events taken as they fall
};

struct SalientModel {
    DecisionModel model;
    std::vector<SalientPath> paths;
    std::set<Id> salient;                  // salient states found within reach
    std::map<Id, Rational> covered_mass;   // act -> probability of ending in a salient state
    std::string notice;                    // set when nothing was salient
};

// States valued at |v| >= threshold (by an assessment, or by a contribution
// entry whose formula holds there) and the act/event chains of at most
// `depth` events leading to them, events treated as if they could be chosen.
// The result keeps exactly the states on those chains.
SalientModel salient_paths(const DecisionModel& m, const KnowledgeBase& kb, const Rational& threshold, int depth);

}  // namespace ddec
