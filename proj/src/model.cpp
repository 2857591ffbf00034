#include "ddec/model.hpp"

#include "ddec/schemata.hpp"

#include <algorithm>
#include <functional>

namespace ddec {

DecisionModel DecisionModel::of(const KnowledgeBase& kb)
{
    DecisionModel m;
    m.roots = kb.roots;
    m.states = kb.vocab.states;
    for (const auto& c : kb.chances) m.expansions.emplace(c.state, c);
    for (const auto& l : kb.contingent) {
        if (l.negated) continue;
        if (l.pred == Pred::Holds && !l.formula->negated())
            m.properties[l.symbol].insert(l.formula->atoms().begin(), l.formula->atoms().end());
        if (l.pred == Pred::Assess) m.bases[l.symbol].insert(l.terms);
    }
    return m;
}

const ProbabilityFact* DecisionModel::expansion(const Id& state) const
{
    auto it = expansions.find(state);
    return it == expansions.end() ? nullptr : &it->second;
}

std::optional<Id> DecisionModel::parent(const Id& state) const
{
    for (const auto& [s, c] : expansions)
        if (c.if_event == state || c.if_not_event == state) return s;
    return std::nullopt;
}

// --- Refinement -------------------------------------------------------------

namespace {

void require_state(const KnowledgeBase& kb, const Id& state)
{
    if (!kb.vocab.states.contains(state)) throw RefinementError("unknown state '" + state + "'");
}

}  // namespace

Refined refine_basis(const DecisionModel& m, const KnowledgeBase& kb, const Addition& addition)
{
    KnowledgeBase next = kb;
    if (const auto* p = std::get_if<PropertyAddition>(&addition)) {
        require_state(kb, p->state);
        for (const auto& a : p->formula.atoms()) {
            if (kb.vocab.is_atom(a)) continue;
            if (kb.vocab.declares(a)) throw RefinementError("'" + a + "' is not a property");
            next.vocab.props.insert(a);
        }
        Literal fact = Literal::holds(p->formula, p->state);
        if (kb.contingent.contains(fact)) return {m, kb};
        next.contingent.insert(fact);
        return {DecisionModel::of(next), next};
    }

    const auto& a = std::get<AssessedUtility>(addition);
    require_state(kb, a.state);
    const Conj basis = make_conj(a.basis);
    for (const auto& l : kb.contingent) {
        if (l.pred != Pred::Assess || l.negated || l.symbol != a.state || l.terms != basis) continue;
        if (*l.value == a.value) return {m, kb};
        throw RefinementError("conflict: " + l.to_string() + " already assessed; refusing value " +
                              a.value.to_string());
    }
    next.contingent.insert(Literal::assess(a.state, basis, a.value));
    return {DecisionModel::of(next), next};
}

Refined expand_event(const DecisionModel& m, const KnowledgeBase& kb, const Id& state, const Id& event,
                     const Rational& k)
{
    (void)m;
    require_state(kb, state);
    if (kb.chance_at(state)) throw RefinementError("state '" + state + "' is already expanded");
    if (k < Rational(0) || k > Rational(1)) throw RefinementError("probability " + k.to_string() + " outside [0, 1]");
    if (kb.vocab.declares(event) && !kb.vocab.events.contains(event))
        throw RefinementError("'" + event + "' is declared but not as an event");

    ProbabilityFact c{event, state, k, state + "_" + event, state + "_not_" + event};
    for (const Id& child : {c.if_event, c.if_not_event})
        if (kb.vocab.declares(child)) throw RefinementError("child state '" + child + "' already exists");

    KnowledgeBase next = kb;
    next.vocab.events.insert(event);
    next.vocab.states.insert(c.if_event);
    next.vocab.states.insert(c.if_not_event);
    next.chances.push_back(c);
    return {DecisionModel::of(next), next};
}

// --- Recommendation -----------------------------------------------------------

std::string Recommendation::summary() const
{
    std::string s;
    switch (kind) {
    case RecommendationKind::Act: {
        s = "ACT " + act;
        auto own = root_values.find(act);
        std::optional<Rational> rival;
        for (const auto& [a, v] : root_values)
            if (a != act && (!rival || v > *rival)) rival = v;
        if (own != root_values.end() && rival)
            s += " (u=" + own->second.to_string() + " vs " + rival->to_string() + ")";
        else if (own != root_values.end())
            s += " (u=" + own->second.to_string() + ")";
        break;
    }
    case RecommendationKind::Interference:
        s = "INTERFERENCE";
        for (std::size_t i = 0; i < contenders.size(); ++i) s += (i ? ", " : " ") + contenders[i];
        break;
    case RecommendationKind::NoArgument: s = "NO_ARGUMENT"; break;
    }
    if (fallback_used) s += " [fallback]";
    return s;
}

Recommendation recommend(const DecisionModel& m, const KnowledgeBase& kb, const Fallback& fallback,
                         const EngineConfig& config)
{
    Recommendation rec;
    std::vector<Id> acts(kb.vocab.acts.begin(), kb.vocab.acts.end());

    std::vector<Literal> goals = act_goals(kb);
    for (const auto& [act, root] : m.roots) goals.push_back(Literal::utility(root, 0));
    Deliberation d(kb, goals, config);
    rec.partial = d.partial();

    const auto& pool = d.pool();
    const auto& labels = d.labels();
    const auto& theory = d.theory();

    // An undefeated comparison argument for do(a) against b.
    auto beats = [&](const Id& a, const Id& b) {
        for (auto i : d.arguments_for(Literal::act({a}))) {
            if (labels[i] != Label::Undefeated) continue;
            for (auto r : pool[i].support) {
                const Rule& rule = theory.defeasible[r];
                if (rule.schema == Schema::Comparison && rule.head == pool[i].conclusion && rule.acts.size() == 2 &&
                    rule.acts[0] == a && rule.acts[1] == b)
                    return true;
            }
        }
        return false;
    };

    for (const auto& a : acts) {
        Literal goal = Literal::act({a});
        rec.verdicts[a] = d.verdict(goal);
        rec.traces[a] = make_trace(d, goal);
        if (auto root = m.roots.find(a); root != m.roots.end())
            if (auto v = d.justified_value(Literal::utility(root->second, 0))) rec.root_values.emplace(a, *v);
    }

    for (const auto& a : acts) {
        if (rec.verdicts[a] != Verdict::Justified) continue;
        bool all = std::all_of(acts.begin(), acts.end(), [&](const Id& b) { return b == a || beats(a, b); });
        if (all) {
            rec.kind = RecommendationKind::Act;
            rec.act = a;
            return rec;
        }
    }

    // Ties among fully valued acts surface as interference between them.
    if (!acts.empty() && rec.root_values.size() == acts.size()) {
        Rational best = rec.root_values.begin()->second;
        for (const auto& [a, v] : rec.root_values) best = std::max(best, v);
        std::vector<Id> tied;
        for (const auto& [a, v] : rec.root_values)
            if (v == best) tied.push_back(a);
        if (tied.size() > 1) {
            rec.kind = RecommendationKind::Interference;
            rec.contenders = tied;
        }
    }
    if (rec.kind == RecommendationKind::NoArgument) {
        for (const auto& a : acts) {
            bool undecided = rec.verdicts[a] == Verdict::Interference;
            for (auto i : d.arguments_for(Literal::act({a}))) undecided |= labels[i] == Label::Undecided;
            for (auto i : d.arguments_for(Literal::not_act({a}))) undecided |= labels[i] == Label::Undecided;
            if (undecided) rec.contenders.push_back(a);
        }
        if (!rec.contenders.empty()) rec.kind = RecommendationKind::Interference;
    }

    if (!fallback.inclination.empty()) {
        const std::vector<Id>& field = rec.kind == RecommendationKind::Interference ? rec.contenders : acts;
        for (const auto& a : fallback.inclination) {
            if (std::find(field.begin(), field.end(), a) == field.end()) continue;
            if (rec.kind == RecommendationKind::NoArgument) rec.contenders = acts;
            rec.kind = RecommendationKind::Act;
            rec.act = a;
            rec.fallback_used = true;
            break;
        }
    }
    return rec;
}

// --- Rollup oracle -------------------------------------------------------------

std::map<Id, Rational> rollup_oracle(const DecisionModel& m, const KnowledgeBase& kb)
{
    std::vector<Literal> facts(kb.contingent.begin(), kb.contingent.end());
    Closure closure = strict_closure(kb, facts);

    std::map<Id, Rational> out;
    std::function<Rational(const Id&)> value = [&](const Id& s) -> Rational {
        if (auto it = out.find(s); it != out.end()) return it->second;
        Rational v;
        if (const auto* c = m.expansion(s)) {
            v = c->k * value(c->if_event) + (Rational(1) - c->k) * value(c->if_not_event);
        } else {
            std::vector<Rational> sources;
            for (const auto& l : kb.contingent)
                if (l.pred == Pred::Assess && !l.negated && l.symbol == s) sources.push_back(*l.value);
            if (sources.empty())
                for (const auto& [f, x] : kb.contributions.entries())
                    if (closure.contains(Literal::holds(f, s))) sources.push_back(x);
            if (sources.size() != 1)
                throw AmbiguousLeaf("leaf '" + s + "' has " + std::to_string(sources.size()) +
                                    " utility sources; exactly one is required");
            v = sources.front();
        }
        out.emplace(s, v);
        return v;
    };
    for (const auto& s : m.states) value(s);
    return out;
}

// --- Salient paths ---------------------------------------------------------------

SalientModel salient_paths(const DecisionModel& m, const KnowledgeBase& kb, const Rational& threshold, int depth)
{
    if (!(threshold > Rational(0))) throw std::invalid_argument("salience threshold must be positive");
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");

    std::vector<Literal> facts(kb.contingent.begin(), kb.contingent.end());
    Closure closure = strict_closure(kb, facts);
    auto magnitude = [](const Rational& v) { return v.sign() < 0 ? Rational(0) - v : v; };
    auto is_salient = [&](const Id& s) {
        for (const auto& l : kb.contingent)
            if (l.pred == Pred::Assess && !l.negated && l.symbol == s && magnitude(*l.value) >= threshold) return true;
        for (const auto& [f, x] : kb.contributions.entries())
            if (magnitude(x) >= threshold && closure.contains(Literal::holds(f, s))) return true;
        return false;
    };

    SalientModel result;
    std::vector<Id> chain;
    std::function<void(const Id&, const Id&, int, const Rational&)> walk = [&](const Id& act, const Id& s, int left,
                                                                              const Rational& p) {
        chain.push_back(s);
        if (is_salient(s)) {
            result.salient.insert(s);
            result.paths.push_back({act, chain, p});
        }
        if (left > 0)
            if (const auto* c = m.expansion(s)) {
                walk(act, c->if_event, left - 1, p * c->k);
                walk(act, c->if_not_event, left - 1, p * (Rational(1) - c->k));
            }
        chain.pop_back();
    };
    for (const auto& [act, root] : m.roots) walk(act, root, depth, Rational(1));

    if (result.paths.empty()) {
        result.model = m;
        result.notice = "no state valued at |v| >= " + threshold.to_string() + " within " + std::to_string(depth) +
                        " events of an act";
        return result;
    }

    DecisionModel& out = result.model;
    for (const auto& path : result.paths) {
        out.roots[path.act] = path.states.front();
        for (std::size_t i = 0; i < path.states.size(); ++i) {
            const Id& s = path.states[i];
            out.states.insert(s);
            if (i + 1 < path.states.size()) out.expansions.emplace(s, *m.expansion(s));
        }
    }
    for (const auto& s : out.states) {
        if (auto it = m.properties.find(s); it != m.properties.end()) out.properties.insert(*it);
        if (auto it = m.bases.find(s); it != m.bases.end()) out.bases.insert(*it);
    }

    // Mass per act counts only the topmost salient state on each chain.
    for (const auto& path : result.paths) {
        bool topmost = std::none_of(path.states.begin(), path.states.end() - 1,
                                    [&](const Id& s) { return result.salient.contains(s); });
        if (!topmost) continue;
        auto [it, fresh] = result.covered_mass.emplace(path.act, path.probability);
        if (!fresh) it->second = it->second + path.probability;
    }
    return result;
}

}  // namespace ddec
