#pragma once

// Fixtures, random generators and property checks shared by the unit tests
// and the acceptance binary. Every random check takes an explicit seed.

#include "ddec/argument.hpp"
#include "ddec/dsl.hpp"
#include "ddec/model.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ddec::testing {

using Rng = std::mt19937_64;

std::string read_corpus(const std::string& name);
Document load(const std::string& name);
Document load_text(const std::string& text);

// Integer in [lo, hi], or occasionally a fraction with a small denominator.
Rational random_value(Rng& rng, int lo, int hi);
// Probability in [0, 1]; 0 and 1 included on purpose.
Rational random_probability(Rng& rng);

struct ModelShape {
    int max_depth = 4;
    int max_states = 16;
    // Allows rival valuations: extra assessments with nested bases, direct
    // utilities on expanded states, several contributions on one leaf.
    bool rivals = false;
};

// Decision model in the text format. Without rivals every leaf has exactly
// one utility source and expanded states have none.
std::string random_model_text(Rng& rng, const ModelShape& shape);

// Small theory mixing user atoms and rules with holds facts and
// contributions over a handful of properties.
std::string random_theory_text(Rng& rng);

// Goals whose grounding covers a theory: u(s) for each state and the head
// of every user rule.
std::vector<Literal> theory_goals(const KnowledgeBase& kb);

struct Outcome {
    bool ok = true;
    int cases = 0;
    std::string detail;  // first failure

    void fail(const std::string& why)
    {
        if (ok) detail = why;
        ok = false;
    }
};

// Justified u(s) equals the rollback value for every state.
Outcome check_rollup_agreement(std::uint64_t seed, int models);
// construct_arguments agrees with subset enumeration for every conclusion.
Outcome check_construct_matches_oracle(std::uint64_t seed, int theories);
// Irreflexive, asymmetric and transitive on random pools; activation
// verdicts agree with brute-force activation sets.
Outcome check_specificity_order(std::uint64_t seed, int theories);
// Grounded labeling is a fixpoint, is the least one, and does not depend on
// the order of arguments or edges.
Outcome check_labeling(std::uint64_t seed, int graphs);
// Equivalent spellings of a conjunction get the same justified contribution
// over a vocabulary of 4 properties, every subset.
Outcome check_equivalence_invariance();
// Positive scaling of all utilities leaves every do(a) verdict unchanged.
Outcome check_scaling_invariance(std::uint64_t seed, int models);
// parse(serialize(parse(t))) equals parse(t), and serialize is idempotent.
Outcome check_corpus_round_trip();
// DOT export is byte-stable and grammatical for corpus traces.
Outcome check_corpus_dot();
// Paths returned by salient_paths form a sub-forest of the reachable tree
// and reach every salient state within depth.
Outcome check_salient_coverage(std::uint64_t seed, int models);

// Recognizer for the DOT language (graph, subgraphs, node, edge and
// attribute statements; identifiers, numerals, quoted and HTML strings).
bool dot_is_valid(const std::string& text, std::string* why = nullptr);

}  // namespace ddec::testing
