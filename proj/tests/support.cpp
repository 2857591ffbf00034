#include "support.hpp"

#include "ddec/dot.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#ifndef DDEC_CORPUS_DIR
#error "DDEC_CORPUS_DIR must name the corpus directory"
#endif

namespace ddec::testing {

std::string read_corpus(const std::string& name)
{
    std::ifstream f(std::string(DDEC_CORPUS_DIR) + "/" + name, std::ios::binary);
    if (!f) throw std::runtime_error("missing corpus file " + name);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Document load(const std::string& name) { return parse(read_corpus(name)); }
Document load_text(const std::string& text) { return parse(text); }

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v)
{
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

Literal u_term(const Id& s) { return Literal::utility(s, 0); }

}  // namespace

Rational random_value(Rng& rng, int lo, int hi)
{
    if (chance(rng, 0.75)) return Rational(uniform(rng, lo, hi));
    static const std::vector<int> dens{2, 3, 4, 5, 8};
    int d = pick(rng, dens);
    return Rational(uniform(rng, lo * d, hi * d), d);
}

Rational random_probability(Rng& rng)
{
    int roll = uniform(rng, 0, 9);
    if (roll == 0) return Rational(0);
    if (roll == 1) return Rational(1);
    static const std::vector<int> dens{2, 3, 4, 5, 7, 10};
    int d = pick(rng, dens);
    return Rational(uniform(rng, 1, d - 1), d);
}

std::string random_model_text(Rng& rng, const ModelShape& shape)
{
    const int acts = uniform(rng, 1, 3);
    int states = acts;
    int counter = 0;
    int events = 0;
    std::vector<std::string> props;
    std::map<std::string, Rational> contr;
    std::vector<std::string> body;
    std::vector<std::string> leaf_props;

    auto value_line = [&](const std::string& s, int kind) {
        switch (kind) {
        case 0: body.push_back("utility " + s + " = " + random_value(rng, -20, 20).to_string() + "."); break;
        case 1: {
            std::vector<std::string> basis{"f0"};
            if (chance(rng, 0.5)) basis.push_back("f1");
            body.push_back("assess u(" + s + " | " + join(basis, ", ") + ") = " + random_value(rng, -20, 20).to_string() +
                           ".");
            if (shape.rivals && chance(rng, 0.5)) {
                basis.push_back("f2");
                body.push_back("assess u(" + s + " | " + join(basis, ", ") +
                               ") = " + random_value(rng, -20, 20).to_string() + ".");
            }
            break;
        }
        default: {
            std::string p;
            if (!leaf_props.empty() && chance(rng, 0.3)) {
                p = pick(rng, leaf_props);
            } else {
                p = "p" + std::to_string(props.size());
                props.push_back(p);
                leaf_props.push_back(p);
                contr.emplace(p, random_value(rng, -20, 20));
            }
            body.push_back("holds " + s + " : " + p + ".");
        }
        }
    };

    std::function<void(const std::string&, int)> grow = [&](const std::string& s, int depth) {
        if (depth < shape.max_depth && states + 2 <= shape.max_states && chance(rng, 0.6)) {
            states += 2;
            std::string e = "e" + std::to_string(events++);
            std::string c1 = "s" + std::to_string(counter++);
            std::string c2 = "s" + std::to_string(counter++);
            body.push_back("chance " + s + " : " + e + " = " + random_probability(rng).to_string() + " ? " + c1 + " : " +
                           c2 + ".");
            if (shape.rivals && chance(rng, 0.3)) value_line(s, 0);
            grow(c1, depth + 1);
            grow(c2, depth + 1);
            return;
        }
        if (!shape.rivals) {
            value_line(s, uniform(rng, 0, 2));
            return;
        }
        int sources = uniform(rng, 1, 2);
        std::vector<int> kinds{0, 1, 2};
        std::shuffle(kinds.begin(), kinds.end(), rng);
        for (int i = 0; i < sources; ++i) value_line(s, kinds[static_cast<std::size_t>(i)]);
    };

    std::vector<std::string> act_names;
    for (int a = 0; a < acts; ++a) act_names.push_back("a" + std::to_string(a));
    std::string text = "act " + join(act_names, ", ") + ".\n";
    for (int a = 0; a < acts; ++a) body.push_back("root a" + std::to_string(a) + " = r" + std::to_string(a) + ".");
    for (int a = 0; a < acts; ++a) grow("r" + std::to_string(a), 0);

    if (!props.empty()) text += "prop " + join(props, ", ") + ".\n";
    for (const auto& [p, v] : contr) text += "contr " + p + " = " + v.to_string() + ".\n";
    for (const auto& line : body) text += line + "\n";
    return text;
}

std::string random_theory_text(Rng& rng)
{
    const std::vector<std::string> props{"p0", "p1", "p2"};
    const int n_states = uniform(rng, 1, 2);
    std::string text = "prop p0, p1, p2.\n";
    text += n_states == 1 ? "state s0.\n" : "state s0, s1.\n";

    auto formula = [&](int max_arity) {
        std::vector<std::string> atoms = props;
        std::shuffle(atoms.begin(), atoms.end(), rng);
        atoms.resize(static_cast<std::size_t>(uniform(rng, 1, max_arity)));
        std::sort(atoms.begin(), atoms.end());
        return atoms;
    };

    for (int s = 0; s < n_states; ++s)
        if (chance(rng, 0.8)) text += "holds s" + std::to_string(s) + " : " + join(formula(2), " & ") + ".\n";

    std::set<std::vector<std::string>> entries;
    const int n_entries = uniform(rng, 0, 3);
    for (int i = 0; i < n_entries; ++i) entries.insert(formula(2));
    for (const auto& f : entries) text += "contr " + join(f, " & ") + " = " + random_value(rng, -9, 9).to_string() + ".\n";

    const int n_x = uniform(rng, 1, 3);
    for (int i = 0; i < n_x; ++i) text += "evidence x" + std::to_string(i) + ".\n";

    std::vector<std::string> atoms;
    for (int i = 0; i < n_x; ++i) atoms.push_back("x" + std::to_string(i));
    for (int i = 0; i < 3; ++i) atoms.push_back("y" + std::to_string(i));

    const int n_rules = uniform(rng, 1, 4);
    for (int r = 0; r < n_rules; ++r) {
        std::string head = "y" + std::to_string(uniform(rng, 0, 2));
        std::set<std::string> premises;
        const int n_body = uniform(rng, 1, 2);
        for (int b = 0; b < n_body; ++b) {
            const std::string& a = pick(rng, atoms);
            if (a != head) premises.insert(a);
        }
        if (premises.empty()) premises.insert("x0");
        text += "presume r" + std::to_string(r) + ": " + join({premises.begin(), premises.end()}, ", ") + " => " +
                (chance(rng, 0.35) ? "~" : "") + head + ".\n";
    }
    if (chance(rng, 0.4)) {
        int from = uniform(rng, 0, 2), to = (from + uniform(rng, 1, 2)) % 3;
        text += "strict t0: y" + std::to_string(from) + " -> " + (chance(rng, 0.5) ? "~" : "") + "y" + std::to_string(to) +
                ".\n";
    }
    return text;
}

std::vector<Literal> theory_goals(const KnowledgeBase& kb)
{
    std::vector<Literal> goals;
    for (const auto& s : kb.vocab.states) goals.push_back(u_term(s));
    for (const auto& r : kb.defeasible_rules) goals.push_back(r.head);
    return goals;
}

// --- Checks --------------------------------------------------------------------

Outcome check_rollup_agreement(std::uint64_t seed, int models)
{
    Outcome out;
    Rng rng(seed);
    for (int i = 0; i < models; ++i) {
        const std::string text = random_model_text(rng, {4, 16, false});
        Document doc = parse(text);
        auto oracle = rollup_oracle(doc.model, doc.kb);
        std::vector<Literal> goals;
        for (const auto& s : doc.model.states) goals.push_back(u_term(s));
        Deliberation d(doc.kb, goals);
        if (d.partial()) out.fail("budget exhausted on model:\n" + text);
        for (const auto& s : doc.model.states) {
            auto v = d.justified_value(u_term(s));
            if (!v || *v != oracle.at(s))
                out.fail("u(" + s + "): engine " + (v ? v->to_string() : std::string("none")) + ", oracle " +
                         oracle.at(s).to_string() + "\n" + text);
        }
        ++out.cases;
    }
    return out;
}

Outcome check_construct_matches_oracle(std::uint64_t seed, int theories)
{
    Outcome out;
    Rng rng(seed);
    int attempts = 0;
    while (out.cases < theories && attempts < theories * 50) {
        ++attempts;
        const std::string text = random_theory_text(rng);
        Document doc = parse(text);
        auto goals = theory_goals(doc.kb);
        auto theory = std::make_shared<GroundTheory>(SchemaGrounder(doc.kb).ground_for(goals));
        const std::size_t n = theory->defeasible.size();
        if (n == 0 || n > 12) continue;
        ++out.cases;

        std::map<Literal, std::set<Support>> expected;
        for (auto& a : enumerate_all_arguments(*theory, n)) expected[a.conclusion].insert(a.support);
        std::set<Literal> conclusions;
        for (const auto& [c, _] : expected) conclusions.insert(c);
        for (const auto& r : theory->defeasible) conclusions.insert(r.head);

        ArgumentEngine engine(theory);
        for (const auto& c : conclusions) {
            ConstructResult r = engine.construct_arguments(c);
            std::set<Support> got;
            for (const auto& a : r.arguments) got.insert(a.support);
            if (r.partial) out.fail("partial construction for " + c.to_string() + "\n" + text);
            if (got != expected[c])
                out.fail("argument sets differ for " + c.to_string() + ": engine " + std::to_string(got.size()) +
                         ", oracle " + std::to_string(expected[c].size()) + "\n" + text);
        }
    }
    if (out.cases < theories) out.fail("generator produced only " + std::to_string(out.cases) + " theories in range");
    return out;
}

namespace {

bool has_precedence(const GroundTheory& theory, const Argument& a, const Argument& b)
{
    auto top = [&](const Argument& x) -> const Rule* {
        for (auto i : x.support)
            if (theory.defeasible[i].head == x.conclusion) return &theory.defeasible[i];
        return nullptr;
    };
    const Rule* ta = top(a);
    const Rule* tb = top(b);
    if (!ta || !tb || ta->head.pred != Pred::Utility || tb->head.pred != Pred::Utility || ta->state != tb->state)
        return false;
    auto eu = [](const Rule* r) { return r->schema == Schema::ExpectedUtility; };
    auto assess = [](const Rule* r) { return r->schema == Schema::Assessment; };
    return eu(ta) != eu(tb) || (assess(ta) && assess(tb) && ta->basis != tb->basis);
}

Specificity brute_activation(ArgumentEngine& engine, const Argument& a, const Argument& b)
{
    std::set<Literal> universe = a.contingent_base;
    universe.insert(b.contingent_base.begin(), b.contingent_base.end());
    std::vector<Literal> u(universe.begin(), universe.end());
    bool a_ge = true, b_ge = true;
    for (std::size_t mask = 0; mask < (std::size_t{1} << u.size()); ++mask) {
        std::set<Literal> e;
        for (std::size_t i = 0; i < u.size(); ++i)
            if ((mask >> i) & 1) e.insert(u[i]);
        bool act_a = engine.activates(a, e), act_b = engine.activates(b, e);
        if (act_a && !act_b) a_ge = false;
        if (act_b && !act_a) b_ge = false;
    }
    if (a_ge && b_ge) return Specificity::Equivalent;
    if (a_ge) return Specificity::AStrict;
    if (b_ge) return Specificity::BStrict;
    return Specificity::Incomparable;
}

Specificity mirror(Specificity s)
{
    if (s == Specificity::AStrict) return Specificity::BStrict;
    if (s == Specificity::BStrict) return Specificity::AStrict;
    return s;
}

}  // namespace

Outcome check_specificity_order(std::uint64_t seed, int theories)
{
    Outcome out;
    Rng rng(seed);
    for (int t = 0; t < theories; ++t) {
        const std::string text = t % 2 ? random_model_text(rng, {2, 7, true}) : random_theory_text(rng);
        Document doc = parse(text);
        auto goals = theory_goals(doc.kb);
        Deliberation d(doc.kb, goals);
        ArgumentEngine& engine = d.engine();
        const auto& pool = d.pool();
        const std::size_t n = pool.size();
        std::vector<std::vector<Specificity>> m(n, std::vector<Specificity>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m[i][j] = engine.more_specific(pool[i], pool[j]);

        auto name = [&](std::size_t i) { return pool[i].conclusion.to_string() + "#" + std::to_string(i); };
        for (std::size_t i = 0; i < n; ++i) {
            if (m[i][i] != Specificity::Equivalent) out.fail("not irreflexive at " + name(i) + "\n" + text);
            for (std::size_t j = 0; j < n; ++j) {
                if (m[j][i] != mirror(m[i][j]))
                    out.fail("asymmetry broken between " + name(i) + " and " + name(j) + "\n" + text);
                if (m[i][j] != Specificity::AStrict) continue;
                for (std::size_t k = 0; k < n; ++k)
                    if (m[j][k] == Specificity::AStrict && m[i][k] != Specificity::AStrict)
                        out.fail("transitivity broken: " + name(i) + " > " + name(j) + " > " + name(k) + " but " +
                                 to_string(m[i][k]) + "\n" + text);
            }
        }

        // Activation verdicts against brute force, for pairs on one topic
        // not settled by the built-in precedences, within the enumeration cap.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const Argument& a = pool[i];
                const Argument& b = pool[j];
                if (!(engine.topic(a.conclusion) == engine.topic(b.conclusion))) {
                    if (m[i][j] != Specificity::Incomparable)
                        out.fail("arguments on unrelated topics were ordered: " + name(i) + ", " + name(j));
                    continue;
                }
                if (has_precedence(d.theory(), a, b)) continue;
                std::set<Literal> u = a.contingent_base;
                u.insert(b.contingent_base.begin(), b.contingent_base.end());
                if (u.size() > 10) continue;
                Specificity brute = brute_activation(engine, a, b);
                if (brute != Specificity::Equivalent && brute != m[i][j])
                    out.fail("activation mismatch between " + name(i) + " and " + name(j) + ": engine " +
                             to_string(m[i][j]) + ", brute force " + to_string(brute) + "\n" + text);
            }
        ++out.cases;
    }
    return out;
}

namespace {

std::vector<std::vector<std::size_t>> attackers_of(std::size_t n, const std::vector<AttackEdge>& edges)
{
    std::vector<std::vector<std::size_t>> att(n);
    for (const auto& e : edges) att[e.target].push_back(e.attacker);
    return att;
}

// Labels satisfy the three labeling conditions.
bool is_fixpoint(const std::vector<Label>& labels, const std::vector<std::vector<std::size_t>>& att)
{
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool all_defeated = std::all_of(att[i].begin(), att[i].end(), [&](auto j) { return labels[j] == Label::Defeated; });
        bool some_undefeated =
            std::any_of(att[i].begin(), att[i].end(), [&](auto j) { return labels[j] == Label::Undefeated; });
        Label want = all_defeated ? Label::Undefeated : some_undefeated ? Label::Defeated : Label::Undecided;
        if (labels[i] != want) return false;
    }
    return true;
}

// Least fixpoint of the characteristic function, from the empty set.
std::set<std::size_t> grounded_extension(std::size_t n, const std::vector<std::vector<std::size_t>>& att)
{
    std::set<std::size_t> s;
    for (;;) {
        std::set<std::size_t> next;
        for (std::size_t a = 0; a < n; ++a) {
            bool defended = std::all_of(att[a].begin(), att[a].end(), [&](auto b) {
                return std::any_of(att[b].begin(), att[b].end(), [&](auto c) { return s.contains(c); });
            });
            if (defended) next.insert(a);
        }
        if (next == s) return s;
        s = std::move(next);
    }
}

void check_labels(Outcome& out, std::size_t n, const std::vector<AttackEdge>& edges, Rng& rng, const std::string& what)
{
    auto att = attackers_of(n, edges);
    auto labels = label_arguments(n, edges);
    if (!is_fixpoint(labels, att)) out.fail("labels are not a fixpoint: " + what);
    std::set<std::size_t> undefeated;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] == Label::Undefeated) undefeated.insert(i);
    if (undefeated != grounded_extension(n, att)) out.fail("labeling is not grounded: " + what);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<AttackEdge> moved;
    for (const auto& e : edges) moved.push_back({perm[e.attacker], perm[e.target], e.point, e.kind});
    std::shuffle(moved.begin(), moved.end(), rng);
    auto relabelled = label_arguments(n, moved);
    for (std::size_t i = 0; i < n; ++i)
        if (relabelled[perm[i]] != labels[i]) out.fail("labels depend on argument order: " + what);
}

}  // namespace

Outcome check_labeling(std::uint64_t seed, int graphs)
{
    Outcome out;
    Rng rng(seed);
    for (int g = 0; g < graphs; ++g) {
        const std::size_t n = static_cast<std::size_t>(uniform(rng, 1, 12));
        const double density = std::uniform_real_distribution<double>(0.0, 0.35)(rng);
        std::vector<AttackEdge> edges;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (chance(rng, density))
                    edges.push_back({a, b, Literal::atom("x"), chance(rng, 0.5) ? AttackKind::Defeat : AttackKind::Interference});
        check_labels(out, n, edges, rng, "random graph " + std::to_string(g));
        ++out.cases;
    }
    // Pools from real theories.
    for (int t = 0; t < graphs / 4; ++t) {
        const std::string text = random_theory_text(rng);
        Document doc = parse(text);
        auto goals = theory_goals(doc.kb);
        Deliberation d(doc.kb, goals);
        if (d.labels() != label_arguments(d.pool().size(), d.edges())) out.fail("deliberation labels differ\n" + text);
        check_labels(out, d.pool().size(), d.edges(), rng, text);
        ++out.cases;
    }
    return out;
}

Outcome check_equivalence_invariance()
{
    Outcome out;
    const std::vector<std::string> atoms{"p0", "p1", "p2", "p3"};
    const std::string head = "prop p0, p1, p2, p3.\ncontr p0 = 3.\ncontr p1 = -2.\ncontr p2 = 5/2.\ncontr p3 = 1.\n";
    // The same exception, spelled two ways.
    const Document first = parse(head + "contr p2 & p0 = 7.\n");
    const Document second = parse(head + "contr p0 & p2 & p0 = 7.\n");
    if (!(first.kb == second.kb)) out.fail("equivalent entry spellings produce different knowledge bases");

    for (unsigned mask = 1; mask < 16; ++mask) {
        std::vector<std::string> subset;
        for (unsigned i = 0; i < 4; ++i)
            if ((mask >> i) & 1) subset.push_back(atoms[i]);
        std::vector<std::vector<std::string>> spellings{subset};
        spellings.push_back({subset.rbegin(), subset.rend()});
        auto dup = subset;
        dup.push_back(subset.front());
        spellings.push_back(dup);
        auto rot = subset;
        std::rotate(rot.begin(), rot.begin() + static_cast<long>(rot.size() / 2), rot.end());
        rot.insert(rot.begin(), rot.back());
        spellings.push_back(rot);

        std::optional<Rational> reference;
        bool have_reference = false;
        for (const Document* doc : {&first, &second}) {
            for (const auto& sp : spellings) {
                Literal term = parse_literal("contr(" + join(sp, " & ") + ") = 0", doc->kb);
                std::vector<Literal> goals{term};
                Deliberation d(doc->kb, goals);
                auto v = d.justified_value(term);
                if (!have_reference) {
                    reference = v;
                    have_reference = true;
                } else if (v != reference) {
                    out.fail("contr(" + join(sp, " & ") + ") justified differently from contr(" + join(subset, " & ") +
                             ")");
                }
                ++out.cases;
            }
        }
        if (!reference) out.fail("no justified value for contr(" + join(subset, " & ") + ")");
    }
    return out;
}

namespace {

KnowledgeBase scaled(const KnowledgeBase& kb, const Rational& c)
{
    KnowledgeBase out = kb;
    out.contributions = {};
    for (const auto& [f, v] : kb.contributions.entries()) out.contributions.add(f, v * c);
    out.contingent.clear();
    for (Literal l : kb.contingent) {
        if (l.pred == Pred::Assess) l.value = *l.value * c;
        out.contingent.insert(l);
    }
    return out;
}

}  // namespace

Outcome check_scaling_invariance(std::uint64_t seed, int models)
{
    Outcome out;
    Rng rng(seed);
    const std::vector<Rational> factors{Rational(2), Rational(3), Rational(1, 2), Rational(7, 3), Rational(5, 4),
                                        Rational(1, 10)};
    for (int i = 0; i < models; ++i) {
        // Desk-scale: rival valuations multiply the expected-utility
        // instances per state, so the pool grows with their product.
        const std::string text = random_model_text(rng, {2, 7, true});
        Document doc = parse(text);
        const Rational c = pick(rng, factors);
        KnowledgeBase big = scaled(doc.kb, c);
        Recommendation before = recommend(doc.model, doc.kb);
        Recommendation after = recommend(DecisionModel::of(big), big);
        if (before.verdicts != after.verdicts)
            out.fail("do() verdicts changed under scaling by " + c.to_string() + "\n" + text);
        if (before.kind != after.kind || before.act != after.act)
            out.fail("recommendation changed under scaling by " + c.to_string() + "\n" + text);
        for (const auto& [a, v] : before.root_values) {
            auto it = after.root_values.find(a);
            if (it == after.root_values.end() || it->second != v * c)
                out.fail("root value of " + a + " did not scale by " + c.to_string() + "\n" + text);
        }
        ++out.cases;
    }
    return out;
}

namespace {

const std::vector<std::string> kCorpus{"alfa_modelA.kb",       "alfa_modelAB.kb",          "alfa_qualitative.kb",
                                       "alfa_qualitative_combined.kb", "empty.kb",        "figure6.kb",
                                       "pump.kb",              "smoking.kb",               "smoking_no_exception.kb"};

}  // namespace

Outcome check_corpus_round_trip()
{
    Outcome out;
    for (const auto& name : kCorpus) {
        Document d1 = load(name);
        std::string s1 = serialize(d1);
        Document d2 = parse(s1);
        if (!(d1.kb == d2.kb)) out.fail(name + ": knowledge base changed by a round trip");
        if (!(d1.model == d2.model)) out.fail(name + ": model changed by a round trip");
        if (serialize(d2) != s1) out.fail(name + ": serialization is not idempotent");
        ++out.cases;
    }
    return out;
}

Outcome check_corpus_dot()
{
    Outcome out;
    const std::vector<std::pair<std::string, std::string>> queries{
        {"figure6.kb", "do(a1)"},
        {"figure6.kb", "u(s3) = 5"},
        {"smoking.kb", "contr(does_smoke & has_cancer) = -70"},
        {"alfa_modelAB.kb", "u(sA0) = 0.8"},
        {"alfa_qualitative.kb", "do(rent_alfa)"},
        {"alfa_qualitative_combined.kb", "~do(rent_alfa)"},
        {"pump.kb", "contr(P1) = 10"},
        {"empty.kb", "do(nothing)"},
    };
    for (const auto& [file, lit] : queries) {
        Document doc = load(file);
        std::string first, second;
        try {
            first = export_dot(justify(doc.kb, parse_literal(lit, doc.kb)));
            second = export_dot(justify(load(file).kb, parse_literal(lit, doc.kb)));
        } catch (const ParseError&) {
            // do(nothing) names no act: the empty trace goes through export_dot directly.
            DialecticTrace t;
            t.goal = Literal::act({"nothing"});
            t.theory = std::make_shared<GroundTheory>(SchemaGrounder(doc.kb).ground_for({}));
            first = export_dot(t);
            second = export_dot(t);
        }
        if (first != second) out.fail(file + " " + lit + ": DOT output differs between runs");
        std::string why;
        if (!dot_is_valid(first, &why)) out.fail(file + " " + lit + ": invalid DOT: " + why);
        ++out.cases;
    }
    return out;
}

Outcome check_salient_coverage(std::uint64_t seed, int models)
{
    Outcome out;
    Rng rng(seed);
    for (int i = 0; i < models; ++i) {
        const std::string text = random_model_text(rng, {3, 16, false});
        Document doc = parse(text);
        const DecisionModel& m = doc.model;
        const Rational threshold(uniform(rng, 3, 18));
        const int depth = uniform(rng, 0, 3);
        SalientModel got = salient_paths(m, doc.kb, threshold, depth);

        // Independent enumeration of what is reachable and salient.
        std::vector<Literal> facts(doc.kb.contingent.begin(), doc.kb.contingent.end());
        Closure closure = strict_closure(doc.kb, facts);
        auto salient = [&](const Id& s) {
            for (const auto& l : doc.kb.contingent)
                if (l.pred == Pred::Assess && l.symbol == s && (*l.value >= threshold || *l.value <= -threshold))
                    return true;
            for (const auto& [f, v] : doc.kb.contributions.entries())
                if ((v >= threshold || v <= -threshold) && closure.contains(Literal::holds(f, s))) return true;
            return false;
        };
        std::set<std::pair<Id, Id>> want;  // (act, salient state)
        for (const auto& [act, root] : m.roots) {
            std::vector<std::pair<Id, int>> stack{{root, 0}};
            while (!stack.empty()) {
                auto [s, d] = stack.back();
                stack.pop_back();
                if (salient(s)) want.insert({act, s});
                if (const auto* c = m.expansion(s); c && d < depth) {
                    stack.push_back({c->if_event, d + 1});
                    stack.push_back({c->if_not_event, d + 1});
                }
            }
        }

        std::set<std::pair<Id, Id>> reached;
        std::set<Id> on_paths;
        for (const auto& p : got.paths) {
            if (p.states.empty() || m.roots.at(p.act) != p.states.front()) out.fail("path does not start at a root");
            if (static_cast<int>(p.states.size()) - 1 > depth) out.fail("path longer than depth");
            Rational prob(1);
            for (std::size_t k = 0; k + 1 < p.states.size(); ++k) {
                const auto* c = m.expansion(p.states[k]);
                if (!c || (c->if_event != p.states[k + 1] && c->if_not_event != p.states[k + 1])) {
                    out.fail("path leaves the model's tree");
                    break;
                }
                prob = prob * (c->if_event == p.states[k + 1] ? c->k : Rational(1) - c->k);
            }
            if (prob != p.probability) out.fail("path probability is wrong");
            reached.insert({p.act, p.states.back()});
            on_paths.insert(p.states.begin(), p.states.end());
        }
        if (reached != want) out.fail("salient states reached differ from enumeration\n" + text);

        if (want.empty()) {
            if (got.notice.empty() || !(got.model == m)) out.fail("no salient state, but model changed or no notice");
        } else {
            if (got.model.states != on_paths) out.fail("returned model holds states off the paths\n" + text);
            for (const auto& [s, c] : got.model.expansions)
                if (!m.expansion(s) || !(*m.expansion(s) == c)) out.fail("expansion not taken from the model");
        }
        ++out.cases;
    }
    return out;
}

// --- DOT recognizer ------------------------------------------------------------------

namespace {

class DotChecker {
public:
    explicit DotChecker(const std::string& s) : s_(s) {}

    bool run(std::string* why)
    {
        try {
            lex();
            graph();
            if (pos_ != toks_.size()) throw std::runtime_error("trailing input after graph");
            return true;
        } catch (const std::exception& e) {
            if (why) *why = e.what();
            return false;
        }
    }

private:
    enum class T { Id, Punct };
    struct Tok {
        T kind;
        std::string text;
    };

    void lex()
    {
        std::size_t i = 0;
        const std::size_t n = s_.size();
        while (i < n) {
            char c = s_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '/' && i + 1 < n && s_[i + 1] == '/') {
                while (i < n && s_[i] != '\n') ++i;
            } else if (c == '/' && i + 1 < n && s_[i + 1] == '*') {
                auto end = s_.find("*/", i + 2);
                if (end == std::string::npos) throw std::runtime_error("unterminated comment");
                i = end + 2;
            } else if (c == '#' && (i == 0 || s_[i - 1] == '\n')) {
                while (i < n && s_[i] != '\n') ++i;
            } else if (c == '"') {
                std::size_t j = i + 1;
                while (j < n && s_[j] != '"') j += s_[j] == '\\' ? 2 : 1;
                if (j >= n) throw std::runtime_error("unterminated string");
                toks_.push_back({T::Id, s_.substr(i, j + 1 - i)});
                i = j + 1;
            } else if (c == '<') {
                int depth = 0;
                std::size_t j = i;
                do {
                    if (j >= n) throw std::runtime_error("unterminated HTML string");
                    if (s_[j] == '<') ++depth;
                    if (s_[j] == '>') --depth;
                    ++j;
                } while (depth > 0);
                toks_.push_back({T::Id, s_.substr(i, j - i)});
                i = j;
            } else if (c == '-' && i + 1 < n && (s_[i + 1] == '>' || s_[i + 1] == '-')) {
                toks_.push_back({T::Punct, s_.substr(i, 2)});
                i += 2;
            } else if (std::string("{}[];,=:").find(c) != std::string::npos) {
                toks_.push_back({T::Punct, std::string(1, c)});
                ++i;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80) {
                std::size_t j = i;
                while (j < n && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' ||
                                 static_cast<unsigned char>(s_[j]) >= 0x80))
                    ++j;
                toks_.push_back({T::Id, s_.substr(i, j - i)});
                i = j;
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
                std::size_t j = i + (c == '-' ? 1 : 0);
                bool digits = false;
                while (j < n && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j, digits = true;
                if (j < n && s_[j] == '.') {
                    ++j;
                    while (j < n && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j, digits = true;
                }
                if (!digits) throw std::runtime_error("bad numeral at offset " + std::to_string(i));
                toks_.push_back({T::Id, s_.substr(i, j - i)});
                i = j;
            } else {
                throw std::runtime_error(std::string("unexpected character '") + c + "'");
            }
        }
    }

    static std::string lower(std::string s)
    {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    bool at(const std::string& p) const { return pos_ < toks_.size() && toks_[pos_].kind == T::Punct && toks_[pos_].text == p; }
    bool at_keyword(const std::string& k) const
    {
        return pos_ < toks_.size() && toks_[pos_].kind == T::Id && lower(toks_[pos_].text) == k;
    }
    bool at_id() const
    {
        if (pos_ >= toks_.size() || toks_[pos_].kind != T::Id) return false;
        const std::string k = lower(toks_[pos_].text);
        return k != "node" && k != "edge" && k != "graph" && k != "digraph" && k != "subgraph" && k != "strict";
    }
    void expect(const std::string& p)
    {
        if (!at(p)) throw std::runtime_error("expected '" + p + "' at token " + std::to_string(pos_) + where());
        ++pos_;
    }
    void id()
    {
        if (!at_id()) throw std::runtime_error("expected an identifier at token " + std::to_string(pos_) + where());
        ++pos_;
    }
    std::string where() const { return pos_ < toks_.size() ? " ('" + toks_[pos_].text + "')" : " (end of input)"; }

    void graph()
    {
        if (at_keyword("strict")) ++pos_;
        if (at_keyword("digraph")) directed_ = true;
        else if (!at_keyword("graph")) throw std::runtime_error("expected 'graph' or 'digraph'");
        ++pos_;
        if (at_id()) ++pos_;
        expect("{");
        stmt_list();
        expect("}");
    }

    void stmt_list()
    {
        while (!at("}")) {
            if (pos_ >= toks_.size()) throw std::runtime_error("unterminated statement list");
            stmt();
            if (at(";")) ++pos_;
        }
    }

    void stmt()
    {
        if (at_keyword("graph") || at_keyword("node") || at_keyword("edge")) {
            ++pos_;
            attr_list(true);
            return;
        }
        if (at_keyword("subgraph") || at("{")) {
            subgraph();
            edge_rhs();
            return;
        }
        id();
        if (at("=")) {
            ++pos_;
            id();
            return;
        }
        port();
        edge_rhs();
        attr_list(false);
    }

    void subgraph()
    {
        if (at_keyword("subgraph")) {
            ++pos_;
            if (at_id()) ++pos_;
        }
        expect("{");
        stmt_list();
        expect("}");
    }

    void port()
    {
        for (int i = 0; i < 2 && at(":"); ++i) {
            ++pos_;
            id();
        }
    }

    void edge_rhs()
    {
        while (at("->") || at("--")) {
            if ((toks_[pos_].text == "->") != directed_) throw std::runtime_error("edge operator does not match graph type");
            ++pos_;
            if (at_keyword("subgraph") || at("{")) {
                subgraph();
            } else {
                id();
                port();
            }
        }
    }

    void attr_list(bool required)
    {
        if (required && !at("[")) throw std::runtime_error("expected an attribute list" + where());
        while (at("[")) {
            ++pos_;
            while (!at("]")) {
                id();
                if (at("=")) {
                    ++pos_;
                    id();
                }
                if (at(";") || at(",")) ++pos_;
            }
            expect("]");
        }
    }

    const std::string& s_;
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    bool directed_ = false;
};

}  // namespace

bool dot_is_valid(const std::string& text, std::string* why) { return DotChecker(text).run(why); }

}  // namespace ddec::testing
