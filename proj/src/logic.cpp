#include "ddec/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace ddec {

Conj make_conj(std::vector<Id> ids)
{
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

bool is_subset(const Conj& sub, const Conj& super)
{
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

PropFormula conj_normalize(std::vector<Id> atoms, bool negated)
{
    if (atoms.empty()) throw MalformedFormula("empty formula");
    for (const auto& a : atoms)
        if (a.empty()) throw MalformedFormula("empty atom in formula");
    PropFormula f;
    f.atoms_ = make_conj(std::move(atoms));
    f.negated_ = negated;
    return f;
}

PropFormula conj_normalize(const PropFormula& f)
{
    return conj_normalize(f.atoms(), f.negated());
}

namespace {

std::string join(const std::vector<Id>& ids, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += sep;
        out += ids[i];
    }
    return out;
}

}  // namespace

std::string PropFormula::to_string() const
{
    std::string body = join(atoms_, " & ");
    if (!negated_) return body;
    return atoms_.size() == 1 ? "~" + body : "~(" + body + ")";
}

// --- Literal -------------------------------------------------------------

Literal Literal::falsum()
{
    Literal l;
    l.pred = Pred::Falsum;
    return l;
}

Literal Literal::atom(Id name, std::vector<Id> args)
{
    Literal l;
    l.pred = Pred::Atom;
    l.symbol = std::move(name);
    l.terms = std::move(args);
    return l;
}

Literal Literal::holds(PropFormula f, Id state)
{
    Literal l;
    l.pred = Pred::Holds;
    l.symbol = std::move(state);
    l.formula = std::move(f);
    return l;
}

Literal Literal::achieves(Conj acts, PropFormula f)
{
    Literal l;
    l.pred = Pred::Achieves;
    l.terms = make_conj(std::move(acts));
    l.formula = std::move(f);
    return l;
}

Literal Literal::desir(PropFormula f)
{
    Literal l;
    l.pred = Pred::Desir;
    l.formula = std::move(f);
    return l;
}

Literal Literal::undesir(PropFormula f)
{
    Literal l;
    l.pred = Pred::Undesir;
    l.formula = std::move(f);
    return l;
}

Literal Literal::act(Conj acts)
{
    Literal l;
    l.pred = Pred::Do;
    l.terms = make_conj(std::move(acts));
    return l;
}

Literal Literal::not_act(Conj acts)
{
    Literal l = act(std::move(acts));
    l.negated = true;
    return l;
}

Literal Literal::contr(PropFormula f, Rational v)
{
    Literal l;
    l.pred = Pred::Contr;
    l.formula = std::move(f);
    l.value = std::move(v);
    return l;
}

Literal Literal::utility(Id state, Rational v)
{
    Literal l;
    l.pred = Pred::Utility;
    l.symbol = std::move(state);
    l.value = std::move(v);
    return l;
}

Literal Literal::assess(Id state, Conj basis, Rational v)
{
    Literal l;
    l.pred = Pred::Assess;
    l.symbol = std::move(state);
    l.terms = make_conj(std::move(basis));
    l.value = std::move(v);
    return l;
}

Literal Literal::prob(Id event, Id state, Rational k)
{
    Literal l;
    l.pred = Pred::Prob;
    l.symbol = std::move(state);
    l.event = std::move(event);
    l.value = std::move(k);
    return l;
}

bool Literal::is_numeric() const
{
    return pred == Pred::Contr || pred == Pred::Utility || pred == Pred::Assess || pred == Pred::Prob;
}

Literal Literal::negation() const
{
    Literal l = *this;
    l.negated = !negated;
    return l;
}

Literal Literal::positive() const
{
    Literal l = *this;
    l.negated = false;
    return l;
}

std::string Literal::to_string() const
{
    std::string s;
    switch (pred) {
    case Pred::Falsum: s = "false"; break;
    case Pred::Atom: s = terms.empty() ? symbol : symbol + "(" + join(terms, ", ") + ")"; break;
    case Pred::Holds: s = "holds(" + formula->to_string() + ", " + symbol + ")"; break;
    case Pred::Achieves: s = "achieves(" + join(terms, " & ") + ", " + formula->to_string() + ")"; break;
    case Pred::Desir: s = "desir(" + formula->to_string() + ")"; break;
    case Pred::Undesir: s = "undesir(" + formula->to_string() + ")"; break;
    case Pred::Do: s = "do(" + join(terms, " & ") + ")"; break;
    case Pred::Contr: s = "contr(" + formula->to_string() + ") = " + value->to_string(); break;
    case Pred::Utility: s = "u(" + symbol + ") = " + value->to_string(); break;
    case Pred::Assess:
        s = terms.empty() ? "assess(" + symbol + ")" : "assess(" + symbol + " | " + join(terms, ", ") + ")";
        s += " = " + value->to_string();
        break;
    case Pred::Prob: s = "prob(" + event + ", " + symbol + ") = " + value->to_string(); break;
    }
    return negated ? "~" + s : s;
}

Literal term_of(const Literal& l)
{
    Literal t = l;
    t.negated = false;
    t.value.reset();
    if (t.pred == Pred::Undesir) t.pred = Pred::Desir;
    return t;
}

const char* schema_name(Schema s)
{
    switch (s) {
    case Schema::User: return "user";
    case Schema::ContrEntry: return "contr-entry";
    case Schema::Additive: return "additive";
    case Schema::StateFormula: return "state-formula";
    case Schema::Assessment: return "assessment";
    case Schema::ExpectedUtility: return "expected-utility";
    case Schema::Practical: return "practical";
    case Schema::Composition: return "composition";
    case Schema::Comparison: return "comparison";
    }
    return "?";
}

std::string Rule::to_string() const
{
    std::string s = id + ": ";
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) s += ", ";
        s += body[i].to_string();
    }
    s += strength == Strength::Strict ? " -> " : " => ";
    return s + head.to_string();
}

// --- Knowledge base ------------------------------------------------------

bool Vocabulary::declares(const Id& id) const
{
    return props.contains(id) || acts.contains(id) || states.contains(id) || events.contains(id);
}

void ContributionTable::add(const PropFormula& f, const Rational& v)
{
    auto [it, inserted] = entries_.emplace(f, v);
    if (!inserted)
        throw DuplicateEntry("duplicate contr entry for " + f.to_string() + " (already " + it->second.to_string() + ")");
}

const Rational* ContributionTable::find(const PropFormula& f) const
{
    auto it = entries_.find(f);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Literal> KnowledgeBase::necessary() const
{
    std::vector<Literal> out;
    for (const auto& [f, v] : contributions.entries()) out.push_back(Literal::contr(f, v));
    for (const auto& c : chances) out.push_back(Literal::prob(c.event, c.state, c.k));
    return out;
}

std::vector<AssessedUtility> KnowledgeBase::assessments() const
{
    std::vector<AssessedUtility> out;
    for (const auto& l : contingent)
        if (l.pred == Pred::Assess && !l.negated) out.push_back({l.symbol, l.terms, *l.value});
    return out;
}

const ProbabilityFact* KnowledgeBase::chance_at(const Id& state) const
{
    for (const auto& c : chances)
        if (c.state == state) return &c;
    return nullptr;
}

const ProbabilityFact* KnowledgeBase::parent_of(const Id& state) const
{
    for (const auto& c : chances)
        if (c.if_event == state || c.if_not_event == state) return &c;
    return nullptr;
}

// --- Rule instantiation --------------------------------------------------

namespace {

enum class Sort { Prop, State, Act, Event, Any };

struct VarUse {
    std::map<Id, std::vector<Sort>> sorts;
};

bool is_var(const Rule& r, const Id& id)
{
    return std::find(r.variables.begin(), r.variables.end(), id) != r.variables.end();
}

void collect(const Rule& r, const Literal& l, VarUse& use)
{
    auto note = [&](const Id& id, Sort s) {
        if (is_var(r, id)) use.sorts[id].push_back(s);
    };
    if (l.formula)
        for (const auto& a : l.formula->atoms()) note(a, Sort::Prop);
    switch (l.pred) {
    case Pred::Holds:
    case Pred::Utility:
        note(l.symbol, Sort::State);
        break;
    case Pred::Assess:
        note(l.symbol, Sort::State);
        for (const auto& b : l.terms) note(b, Sort::Prop);
        break;
    case Pred::Prob:
        note(l.symbol, Sort::State);
        note(l.event, Sort::Event);
        break;
    case Pred::Achieves:
    case Pred::Do:
        for (const auto& a : l.terms) note(a, Sort::Act);
        break;
    case Pred::Atom:
        for (const auto& a : l.terms) note(a, Sort::Any);
        break;
    default: break;
    }
}

std::set<Id> domain_of(Sort s, const KnowledgeBase& kb, const std::set<Id>& constants)
{
    const auto& v = kb.vocab;
    switch (s) {
    case Sort::Prop: {
        std::set<Id> d = v.props;
        d.insert(v.events.begin(), v.events.end());
        return d;
    }
    case Sort::State: return v.states;
    case Sort::Act: return v.acts;
    case Sort::Event: return v.events;
    case Sort::Any: {
        std::set<Id> d = constants;
        for (const auto* set : {&v.props, &v.acts, &v.states, &v.events}) d.insert(set->begin(), set->end());
        return d;
    }
    }
    return {};
}

Id sub(const std::map<Id, Id>& binding, const Id& id)
{
    auto it = binding.find(id);
    return it == binding.end() ? id : it->second;
}

std::vector<Id> sub_all(const std::map<Id, Id>& binding, const std::vector<Id>& ids)
{
    std::vector<Id> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(sub(binding, id));
    return out;
}

Literal substitute(const Literal& l, const std::map<Id, Id>& b)
{
    Literal out = l;
    out.symbol = l.pred == Pred::Atom ? l.symbol : sub(b, l.symbol);
    out.event = sub(b, l.event);
    out.terms = sub_all(b, l.terms);
    if (l.pred == Pred::Achieves || l.pred == Pred::Do || l.pred == Pred::Assess) out.terms = make_conj(out.terms);
    if (l.formula) out.formula = conj_normalize(sub_all(b, l.formula->atoms()), l.formula->negated());
    return out;
}

}  // namespace

std::vector<Rule> instantiate(const Rule& templ, const KnowledgeBase& kb, std::size_t limit)
{
    if (templ.variables.empty()) return {templ};

    VarUse use;
    for (const auto& l : templ.body) collect(templ, l, use);
    collect(templ, templ.head, use);

    std::set<Id> constants;
    for (const auto& l : kb.contingent)
        if (l.pred == Pred::Atom) constants.insert(l.terms.begin(), l.terms.end());

    std::vector<Id> vars;
    std::vector<std::vector<Id>> domains;
    std::size_t total = 1;
    for (const auto& v : templ.variables) {
        auto it = use.sorts.find(v);
        std::set<Id> dom;
        if (it == use.sorts.end()) {
            dom = domain_of(Sort::Any, kb, constants);
        } else {
            dom = domain_of(it->second.front(), kb, constants);
            for (std::size_t i = 1; i < it->second.size(); ++i) {
                std::set<Id> other = domain_of(it->second[i], kb, constants);
                std::set<Id> both;
                std::set_intersection(dom.begin(), dom.end(), other.begin(), other.end(),
                                      std::inserter(both, both.begin()));
                dom = std::move(both);
            }
        }
        if (dom.empty()) return {};
        total *= dom.size();
        if (total > limit)
            throw GroundingLimit("rule '" + templ.origin + "' has more than " + std::to_string(limit) + " instances");
        vars.push_back(v);
        domains.emplace_back(dom.begin(), dom.end());
    }

    std::vector<Rule> out;
    std::map<Id, Id> binding;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == vars.size()) {
            Rule r = templ;
            r.variables.clear();
            r.head = substitute(templ.head, binding);
            r.body.clear();
            for (const auto& l : templ.body) r.body.push_back(substitute(l, binding));
            r.id = templ.origin + "[";
            for (std::size_t k = 0; k < vars.size(); ++k) r.id += (k ? "," : "") + vars[k] + "=" + binding[vars[k]];
            r.id += "]";
            out.push_back(std::move(r));
            return;
        }
        for (const auto& value : domains[i]) {
            binding[vars[i]] = value;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

// --- Closure -------------------------------------------------------------

Closure::Closure(std::span<const ProbabilityFact> chances) : chances_(chances.begin(), chances.end())
{
    // Parents before children, so one sweep each way reaches the whole tree.
    std::map<Id, Id> parent;
    for (const auto& c : chances_) {
        parent[c.if_event] = c.state;
        parent[c.if_not_event] = c.state;
    }
    std::map<Id, int> depth;
    for (const auto& c : chances_) {
        int d = 0;
        for (auto it = parent.find(c.state); it != parent.end() && d <= static_cast<int>(chances_.size());
             it = parent.find(it->second))
            ++d;
        depth[c.state] = d;
    }
    std::stable_sort(chances_.begin(), chances_.end(),
                     [&](const ProbabilityFact& a, const ProbabilityFact& b) { return depth[a.state] < depth[b.state]; });
    // Each child is described by its branch of the event.
    for (const auto& c : chances_) {
        holds_atoms_[c.if_event].insert(c.event);
        holds_neg_[c.if_not_event].insert(conj_normalize({c.event}, true));
    }
}

void Closure::add(const Literal& l)
{
    if (!l.negated && l.formula && (l.pred == Pred::Holds || l.pred == Pred::Achieves)) {
        const auto& f = *l.formula;
        if (l.pred == Pred::Holds) {
            if (f.negated()) holds_neg_[l.symbol].insert(f);
            else holds_atoms_[l.symbol].insert(f.atoms().begin(), f.atoms().end());
        } else {
            if (f.negated()) achieves_neg_[l.terms].insert(f);
            else achieves_atoms_[l.terms].insert(f.atoms().begin(), f.atoms().end());
        }
        return;
    }
    lits_.insert(l);
}

bool Closure::propagate_structure()
{
    bool changed = false;
    auto merge = [&changed](auto& into, const auto& from) {
        for (const auto& x : from)
            if (into.insert(x).second) changed = true;
    };
    // Down: both children inherit the parent's description.
    auto down = [&] {
        for (const auto& c : chances_) {
            if (auto it = holds_atoms_.find(c.state); it != holds_atoms_.end()) {
                merge(holds_atoms_[c.if_event], it->second);
                merge(holds_atoms_[c.if_not_event], it->second);
            }
            if (auto it = holds_neg_.find(c.state); it != holds_neg_.end()) {
                merge(holds_neg_[c.if_event], it->second);
                merge(holds_neg_[c.if_not_event], it->second);
            }
        }
    };
    // Up: what holds in both children holds in the parent.
    auto up = [&] {
        for (auto c = chances_.rbegin(); c != chances_.rend(); ++c) {
            auto a = holds_atoms_.find(c->if_event);
            auto b = holds_atoms_.find(c->if_not_event);
            if (a != holds_atoms_.end() && b != holds_atoms_.end()) {
                auto& into = holds_atoms_[c->state];
                for (const auto& x : a->second)
                    if (b->second.contains(x) && into.insert(x).second) changed = true;
            }
            auto na = holds_neg_.find(c->if_event);
            auto nb = holds_neg_.find(c->if_not_event);
            if (na != holds_neg_.end() && nb != holds_neg_.end()) {
                auto& into = holds_neg_[c->state];
                for (const auto& x : na->second)
                    if (nb->second.contains(x) && into.insert(x).second) changed = true;
            }
        }
    };
    down();
    up();
    down();
    return changed;
}

void Closure::saturate(const std::vector<const Rule*>& rules)
{
    std::vector<bool> fired(rules.size(), false);
    bool changed = true;
    while (changed) {
        changed = propagate_structure();
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (fired[i]) continue;
            const Rule& r = *rules[i];
            bool ready = std::all_of(r.body.begin(), r.body.end(), [this](const Literal& b) { return contains(b); });
            if (!ready) continue;
            fired[i] = true;
            add(r.head);
            changed = true;
        }
    }
}

const std::set<Id>* Closure::atoms_at(const Id& state) const
{
    auto it = holds_atoms_.find(state);
    return it == holds_atoms_.end() ? nullptr : &it->second;
}

const std::set<PropFormula>* Closure::negated_at(const Id& state) const
{
    auto it = holds_neg_.find(state);
    return it == holds_neg_.end() ? nullptr : &it->second;
}

namespace {

template <class Key>
bool covers(const std::map<Key, std::set<Id>>& atoms, const Key& key, const Conj& wanted)
{
    auto it = atoms.find(key);
    if (it == atoms.end()) return false;
    return std::all_of(wanted.begin(), wanted.end(), [&](const Id& a) { return it->second.contains(a); });
}

template <class Key>
bool has_neg(const std::map<Key, std::set<PropFormula>>& negs, const Key& key, const PropFormula& f)
{
    auto it = negs.find(key);
    return it != negs.end() && it->second.contains(f);
}

bool same_term(const Literal& a, const Literal& b)
{
    return a.pred == b.pred && a.symbol == b.symbol && a.terms == b.terms && a.event == b.event &&
           a.formula == b.formula;
}

}  // namespace

bool Closure::contains(const Literal& l) const
{
    if (l.pred == Pred::Falsum) return l.negated ? consistent() : !consistent();

    if (!l.negated) {
        if (l.pred == Pred::Holds) {
            const auto& f = *l.formula;
            return f.negated() ? has_neg(holds_neg_, l.symbol, f) : covers(holds_atoms_, l.symbol, f.atoms());
        }
        if (l.pred == Pred::Achieves) {
            const auto& f = *l.formula;
            return f.negated() ? has_neg(achieves_neg_, l.terms, f) : covers(achieves_atoms_, l.terms, f.atoms());
        }
        return lits_.contains(l);
    }

    if (lits_.contains(l)) return true;
    // Strict consequences of functional dependencies and built-in clashes.
    if (l.is_numeric()) {
        Literal lo = term_of(l);
        for (auto it = lits_.lower_bound(lo); it != lits_.end() && same_term(*it, lo); ++it)
            if (!it->negated && it->value && *it->value != *l.value) return true;
        return false;
    }
    if (l.pred == Pred::Desir) return lits_.contains(Literal::undesir(*l.formula));
    if (l.pred == Pred::Undesir) return lits_.contains(Literal::desir(*l.formula));
    if (l.pred == Pred::Holds && l.formula->arity() == 1) {
        const auto& f = *l.formula;
        if (f.negated()) return covers(holds_atoms_, l.symbol, f.atoms());
        return has_neg(holds_neg_, l.symbol, conj_normalize(f.atoms(), true));
    }
    return false;
}

bool Closure::consistent() const
{
    const Literal* prev = nullptr;
    for (const auto& l : lits_) {
        if (l.pred == Pred::Falsum && !l.negated) return false;
        if (l.negated) {
            if (contains(l.positive())) return false;
            continue;
        }
        if (l.is_numeric() && prev && !prev->negated && same_term(*prev, l) && prev->value != l.value) return false;
        if (l.pred == Pred::Desir && lits_.contains(Literal::undesir(*l.formula))) return false;
        prev = &l;
    }
    for (const auto& [state, negs] : holds_neg_)
        for (const auto& f : negs)
            if (covers(holds_atoms_, state, f.atoms())) return false;
    for (const auto& [acts, negs] : achieves_neg_)
        for (const auto& f : negs)
            if (covers(achieves_atoms_, acts, f.atoms())) return false;
    return true;
}

// --- Entailment ----------------------------------------------------------

std::vector<Rule> ground_strict_rules(const KnowledgeBase& kb)
{
    std::vector<Rule> out;
    for (const auto& r : kb.strict_rules) {
        auto inst = instantiate(r, kb);
        out.insert(out.end(), std::make_move_iterator(inst.begin()), std::make_move_iterator(inst.end()));
    }
    return out;
}

Closure strict_closure(const KnowledgeBase& kb, std::span<const Literal> facts)
{
    Closure c(kb.chances);
    for (const auto& ch : kb.chances) c.add(Literal::prob(ch.event, ch.state, ch.k));
    for (const auto& f : facts) c.add(f);
    auto strict = ground_strict_rules(kb);
    std::vector<const Rule*> ptrs;
    for (const auto& r : strict) ptrs.push_back(&r);
    c.saturate(ptrs);
    return c;
}

bool entails(const KnowledgeBase& kb, std::span<const Literal> facts, const Literal& goal)
{
    return strict_closure(kb, facts).contains(goal);
}

bool consistent(const KnowledgeBase& kb, std::span<const Literal> facts)
{
    return strict_closure(kb, facts).consistent();
}

}  // namespace ddec
