#pragma once

// Arguments over a ground theory: construction, counterargument and
// specificity, grounded labeling, and justification queries.

#include "ddec/logic.hpp"
#include "ddec/schemata.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace ddec {

// Indices into GroundTheory::defeasible, sorted.
using Support = std::vector<std::size_t>;

struct Argument {
    Support support;
    Literal conclusion;
    std::vector<Literal> sub_conclusions;  // heads of the support, sorted
    std::set<Literal> contingent_base;     // contingent literals the support rests on

    friend bool operator==(const Argument& a, const Argument& b)
    {
        return a.conclusion == b.conclusion && a.support == b.support;
    }
};

enum class Specificity { AStrict, BStrict, Incomparable, Equivalent };
enum class AttackKind { Defeat, Interference };
enum class Label { Undefeated, Defeated, Undecided };
enum class Verdict { Justified, Denied, Interference, NoArgument };

const char* to_string(Specificity s);
const char* to_string(AttackKind k);
const char* to_string(Label l);
const char* to_string(Verdict v);

struct AttackEdge {
    std::size_t attacker;  // pool index
    std::size_t target;    // pool index
    Literal point;         // the target's sub-conclusion under attack
    AttackKind kind;

    friend bool operator==(const AttackEdge&, const AttackEdge&) = default;
};

struct EngineConfig {
    // Rule-instantiation steps allowed per construction.
    std::size_t budget = 200000;
    GroundingConfig grounding;
    // Largest contingent-base union compared by full activation enumeration.
    std::size_t specificity_cap = 16;
};

struct ConstructResult {
    std::vector<Argument> arguments;
    bool partial = false;
    std::size_t steps = 0;
};

class ArgumentEngine {
public:
    explicit ArgumentEngine(std::shared_ptr<const GroundTheory> theory, EngineConfig config = {});

    // Minimal consistent arguments for `goal`.
    ConstructResult construct_arguments(const Literal& goal);
    // Arguments for the goals and for every head of a defeasible instance.
    ConstructResult build_pool(std::span<const Literal> goals);

    // Literals that cannot both hold together with the evidence.
    bool disagree(const Literal& a, const Literal& b);

    // Arguments whose conclusions concern unconnected topics (see topic())
    // are incomparable; they can never attack each other.
    Specificity more_specific(const Argument& a, const Argument& b);
    // Representative of the literal's topic: its functional term, merged
    // with every term a strict rule connects it to. holds, achieves and do
    // literals form one topic each, since closure relates them structurally.
    Literal topic(const Literal& l) const;
    // Whether `e` (with necessary knowledge) non-trivially activates `a`.
    bool activates(const Argument& a, const std::set<Literal>& e);
    bool used_approximation() const { return approximate_; }

    std::vector<AttackEdge> counterarguments(std::size_t target, const std::vector<Argument>& pool);
    std::vector<AttackEdge> all_attacks(const std::vector<Argument>& pool);

    const GroundTheory& theory() const { return *theory_; }
    const EngineConfig& config() const { return config_; }

    // Completes an argument from a support set (fills sub-conclusions and base).
    Argument make_argument(Support support, Literal conclusion) const;

private:
    struct Step {
        std::vector<Literal> premises;
        Literal conclusion;
        std::optional<std::size_t> rule;
    };

    void expand(const Literal& l, std::set<Literal>& seen, std::vector<Step>& steps, std::vector<Literal>& work);
    ConstructResult run(std::vector<Literal> roots, const std::vector<Literal>& report);
    bool support_consistent(const Support& s);
    bool derives(const Support& s, const Literal& goal);
    // Minimal subsets of `u` that activate `x`; nullopt when some subset
    // yields x's conclusion without x's own rules.
    std::optional<std::vector<std::vector<Literal>>> minimal_triggers(const Argument& x,
                                                                      const std::vector<const Rule*>& own,
                                                                      const std::vector<Literal>& u);

    std::shared_ptr<const GroundTheory> theory_;
    EngineConfig config_;
    std::map<Literal, std::vector<std::size_t>> by_head_;
    std::map<Literal, Literal> topic_root_;
    std::map<Support, bool> consistency_cache_;
    std::map<std::pair<Literal, Literal>, bool> disagree_cache_;
    std::map<std::tuple<Support, Literal, Support, Literal>, Specificity> specificity_cache_;
    std::set<Literal> strict_bodies_;
    std::map<std::tuple<Support, Literal, std::vector<Literal>>, std::optional<std::vector<std::vector<Literal>>>>
        trigger_cache_;
    bool approximate_ = false;
};

// Grounded labeling: UNDEFEATED iff every attacker is DEFEATED, DEFEATED iff
// some attacker is UNDEFEATED, UNDECIDED otherwise (least fixpoint).
std::vector<Label> label_arguments(std::size_t pool_size, std::span<const AttackEdge> edges);

// Pool, attacks and labels for a set of goals over one theory.
class Deliberation {
public:
    Deliberation(const KnowledgeBase& kb, std::span<const Literal> goals, EngineConfig config = {});

    Verdict verdict(const Literal& goal);
    // Arguments (pool indices) concluding exactly `goal`.
    std::vector<std::size_t> arguments_for(const Literal& goal) const;
    // Arguments whose conclusion disagrees with `goal`.
    std::vector<std::size_t> arguments_against(const Literal& goal);

    // The value v with u(s) = v (or contr(F) = v) justified, if any.
    std::optional<Rational> justified_value(const Literal& term);

    const std::vector<Argument>& pool() const { return pool_; }
    const std::vector<AttackEdge>& edges() const { return edges_; }
    const std::vector<Label>& labels() const { return labels_; }
    const GroundTheory& theory() const { return engine_.theory(); }
    std::shared_ptr<const GroundTheory> shared_theory() const { return theory_; }
    ArgumentEngine& engine() { return engine_; }
    bool partial() const { return partial_; }
    bool approximate() const { return engine_.used_approximation(); }

private:
    std::shared_ptr<const GroundTheory> theory_;
    ArgumentEngine engine_;
    std::vector<Argument> pool_;
    std::vector<AttackEdge> edges_;
    std::vector<Label> labels_;
    bool partial_ = false;
};

struct DialecticTrace {
    Literal goal;
    Verdict verdict = Verdict::NoArgument;
    std::shared_ptr<const GroundTheory> theory;
    std::vector<Argument> pool;
    std::vector<AttackEdge> edges;
    std::vector<Label> labels;
    bool partial = false;
    bool approximate = false;
};

DialecticTrace make_trace(Deliberation& d, const Literal& goal);
DialecticTrace justify(const KnowledgeBase& kb, const Literal& goal, EngineConfig config = {});

class OracleScaleExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Brute force: every subset of the ground defeasible instances with at most
// `size_bound` members, kept when it is consistent and minimal for some
// conclusion. Conclusions range over rule heads, evidence and `extra_goals`.
// Refuses theories with more than 20 ground instances.
std::vector<Argument> enumerate_all_arguments(const GroundTheory& theory, std::size_t size_bound,
                                              std::span<const Literal> extra_goals = {});

}  // namespace ddec
