#include "ddec/schemata.hpp"

#include <algorithm>
#include <deque>

namespace ddec {

namespace {

std::string instance_id(Schema schema, const std::vector<Literal>& body, const Literal& head)
{
    std::string id = std::string(schema_name(schema)) + "[";
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) id += "; ";
        id += body[i].to_string();
    }
    id += body.empty() ? "=> " : " => ";
    return id + head.to_string() + "]";
}

Rule make_instance(Schema schema, std::vector<Literal> body, Literal head)
{
    Rule r;
    r.schema = schema;
    r.strength = Strength::Defeasible;
    r.origin = schema_name(schema);
    r.id = instance_id(schema, body, head);
    r.body = std::move(body);
    r.head = std::move(head);
    return r;
}

// Non-empty subsets of `atoms` with at most `max` elements.
std::vector<Conj> subsets_up_to(const std::vector<Id>& atoms, std::size_t max)
{
    std::vector<Conj> out;
    std::vector<Id> cur;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (!cur.empty()) out.push_back(cur);
        if (cur.size() == max) return;
        for (std::size_t j = i; j < atoms.size(); ++j) {
            cur.push_back(atoms[j]);
            self(self, j + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

bool same_term(const Literal& a, const Literal& b)
{
    return term_of(a) == term_of(b);
}

}  // namespace

std::vector<const Rule*> GroundTheory::strict_ptrs() const
{
    std::vector<const Rule*> out;
    out.reserve(strict.size());
    for (const auto& r : strict) out.push_back(&r);
    return out;
}

Closure GroundTheory::necessary_closure(std::span<const Literal> facts, std::span<const Rule* const> extra) const
{
    Closure c = necessary;
    for (const auto& f : facts) c.add(f);
    auto rules = strict_ptrs();
    rules.insert(rules.end(), extra.begin(), extra.end());
    c.saturate(rules);
    return c;
}

SchemaGrounder::SchemaGrounder(KnowledgeBase kb, GroundingConfig config)
    : kb_(std::move(kb)), config_(config), optimistic_(kb_.chances)
{
    strict_ = ground_strict_rules(kb_);
    for (const auto& r : kb_.defeasible_rules) {
        auto inst = instantiate(r, kb_, config_.instance_limit);
        user_defeasible_.insert(user_defeasible_.end(), inst.begin(), inst.end());
    }

    for (const auto& l : kb_.necessary())
        if (l.pred == Pred::Prob) optimistic_.add(l);
    for (const auto& l : kb_.contingent) optimistic_.add(l);
    std::vector<const Rule*> all;
    for (const auto& r : strict_) all.push_back(&r);
    for (const auto& r : user_defeasible_) all.push_back(&r);
    optimistic_.saturate(all);
}

std::vector<Rule> SchemaGrounder::user_instances_for(const Literal& term) const
{
    std::vector<Rule> out;
    for (const auto& r : user_defeasible_)
        if (same_term(r.head, term)) out.push_back(r);
    return out;
}

std::set<Rational> SchemaGrounder::candidates(const Literal& term)
{
    std::set<Rational> out;
    for (const auto& r : instances_for(term_of(term)))
        if (r.head.value && !r.head.negated) out.insert(*r.head.value);
    for (const auto& r : strict_)
        if (same_term(r.head, term) && r.head.value && !r.head.negated) out.insert(*r.head.value);
    return out;
}

std::vector<Rule> SchemaGrounder::contribution_arguments(const PropFormula& formula)
{
    const PropFormula f = conj_normalize(formula);
    std::vector<Rule> out;
    if (const Rational* v = kb_.contributions.find(f)) {
        Rule r = make_instance(Schema::ContrEntry, {}, Literal::contr(f, *v));
        r.formula = f;
        out.push_back(std::move(r));
    }
    if (f.negated() || f.arity() < 2 || f.arity() > config_.max_arity) return out;

    // Binary splits; the first atom always goes left so each split appears once.
    const auto& atoms = f.atoms();
    const std::size_t n = atoms.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << (n - 1)); ++mask) {
        std::vector<Id> left{atoms[0]}, right;
        for (std::size_t i = 1; i < n; ++i) ((mask >> (i - 1)) & 1 ? right : left).push_back(atoms[i]);
        if (right.empty()) continue;
        PropFormula fl = conj_normalize(left), fr = conj_normalize(right);
        auto xs = candidates(Literal::contr(fl, 0));
        if (xs.empty()) continue;
        auto ys = candidates(Literal::contr(fr, 0));
        for (const auto& x : xs)
            for (const auto& y : ys)
                out.push_back(make_instance(Schema::Additive, {Literal::contr(fl, x), Literal::contr(fr, y)},
                                            Literal::contr(f, x + y)));
    }
    return out;
}

std::vector<Rule> SchemaGrounder::state_utility_instances(const Id& state)
{
    std::vector<Rule> out;
    std::vector<PropFormula> formulas;
    if (const auto* atoms = optimistic_.atoms_at(state)) {
        std::vector<Id> list(atoms->begin(), atoms->end());
        for (auto& sub : subsets_up_to(list, config_.max_arity)) formulas.push_back(conj_normalize(std::move(sub)));
    }
    if (const auto* negs = optimistic_.negated_at(state))
        formulas.insert(formulas.end(), negs->begin(), negs->end());

    for (const auto& f : formulas) {
        for (const auto& x : candidates(Literal::contr(f, 0))) {
            Rule r = make_instance(Schema::StateFormula, {Literal::holds(f, state), Literal::contr(f, x)},
                                   Literal::utility(state, x));
            r.state = state;
            r.formula = f;
            out.push_back(std::move(r));
        }
    }
    for (const auto& l : optimistic_.explicit_literals()) {
        if (l.pred != Pred::Assess || l.negated || l.symbol != state) continue;
        Rule r = make_instance(Schema::Assessment, {l}, Literal::utility(state, *l.value));
        r.state = state;
        r.basis = l.terms;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Rule> SchemaGrounder::expected_utility_instances(const Id& state)
{
    std::vector<Rule> out;
    const ProbabilityFact* c = kb_.chance_at(state);
    if (!c) return out;
    auto xs = candidates(Literal::utility(c->if_event, 0));
    auto ys = candidates(Literal::utility(c->if_not_event, 0));
    const Rational one(1);
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            Rational v = c->k * x + (one - c->k) * y;
            Rule r = make_instance(Schema::ExpectedUtility,
                                   {Literal::prob(c->event, state, c->k), Literal::utility(c->if_event, x),
                                    Literal::utility(c->if_not_event, y)},
                                   Literal::utility(state, v));
            r.state = state;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<Rule> SchemaGrounder::practical_instances(const Conj& act_term)
{
    const Conj acts = make_conj(act_term);
    std::vector<Rule> out;
    for (const auto& l : optimistic_.explicit_literals()) {
        if (l.negated || (l.pred != Pred::Desir && l.pred != Pred::Undesir)) continue;
        Literal ach = Literal::achieves(acts, *l.formula);
        if (!optimistic_.contains(ach)) continue;
        Literal head = l.pred == Pred::Desir ? Literal::act(acts) : Literal::not_act(acts);
        out.push_back(make_instance(Schema::Practical, {ach, l}, head));
    }
    if (acts.size() > 1) {
        std::vector<Literal> body;
        for (const auto& a : acts) body.push_back(Literal::act({a}));
        out.push_back(make_instance(Schema::Composition, std::move(body), Literal::act(acts)));
    }
    return out;
}

std::vector<Rule> SchemaGrounder::comparison_instances(const Id& a, const Id& b)
{
    std::vector<Rule> out;
    auto ra = kb_.roots.find(a), rb = kb_.roots.find(b);
    if (a == b || ra == kb_.roots.end() || rb == kb_.roots.end()) return out;
    auto xs = candidates(Literal::utility(ra->second, 0));
    auto ys = candidates(Literal::utility(rb->second, 0));
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            if (!(x > y)) continue;
            std::vector<Literal> body{Literal::utility(ra->second, x), Literal::utility(rb->second, y)};
            for (Literal head : {Literal::act({a}), Literal::not_act({b})}) {
                Rule r = make_instance(Schema::Comparison, body, head);
                r.acts = {a, b};
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

std::vector<Rule> SchemaGrounder::instances_for(const Literal& term)
{
    if (auto it = memo_.find(term); it != memo_.end()) return it->second;

    std::vector<Rule> out = user_instances_for(term);
    auto append = [&out](std::vector<Rule> more) {
        out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    };
    switch (term.pred) {
    case Pred::Contr: append(contribution_arguments(*term.formula)); break;
    case Pred::Utility:
        append(state_utility_instances(term.symbol));
        append(expected_utility_instances(term.symbol));
        break;
    case Pred::Do:
        append(practical_instances(term.terms));
        if (term.terms.size() == 1) {
            const Id& a = term.terms.front();
            for (const auto& b : kb_.vocab.acts) {
                if (b == a) continue;
                append(comparison_instances(a, b));
                append(comparison_instances(b, a));
            }
        }
        break;
    default: break;
    }
    memo_.emplace(term, out);
    return out;
}

GroundTheory SchemaGrounder::ground_for(std::span<const Literal> goals)
{
    GroundTheory theory;
    theory.kb = kb_;
    theory.strict = strict_;

    std::set<Literal> seen_terms;
    std::set<Id> seen_ids;
    std::deque<Literal> work;
    auto demand = [&](const Literal& l) {
        if (l.pred == Pred::Falsum || l.pred == Pred::Prob) return;
        Literal t = term_of(l);
        if (seen_terms.insert(t).second) work.push_back(std::move(t));
    };
    for (const auto& g : goals) demand(g);
    for (const auto& r : user_defeasible_) {
        demand(r.head);
        for (const auto& b : r.body) demand(b);
    }
    for (const auto& r : strict_) {
        demand(r.head);
        for (const auto& b : r.body) demand(b);
    }

    while (!work.empty()) {
        Literal t = std::move(work.front());
        work.pop_front();
        for (auto& r : instances_for(t)) {
            for (const auto& b : r.body) demand(b);
            if (seen_ids.insert(r.id).second) theory.defeasible.push_back(std::move(r));
        }
    }

    std::sort(theory.defeasible.begin(), theory.defeasible.end(),
              [](const Rule& a, const Rule& b) { return a.id < b.id; });

    theory.base = Closure(kb_.chances);
    for (const auto& l : kb_.necessary())
        if (l.pred == Pred::Prob) theory.base.add(l);
    for (const auto& l : kb_.contingent) theory.base.add(l);
    theory.base.saturate(theory.strict_ptrs());

    theory.necessary = Closure(kb_.chances);
    for (const auto& ch : kb_.chances) theory.necessary.add(Literal::prob(ch.event, ch.state, ch.k));
    theory.necessary.saturate(theory.strict_ptrs());
    return theory;
}

std::vector<Literal> act_goals(const KnowledgeBase& kb)
{
    std::vector<Literal> out;
    for (const auto& a : kb.vocab.acts) out.push_back(Literal::act({a}));
    return out;
}

}  // namespace ddec
