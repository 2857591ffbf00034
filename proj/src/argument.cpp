#include "ddec/argument.hpp"

#include <algorithm>
#include <numeric>
#include <bit>
#include <cstdint>
#include <tuple>

namespace ddec {

const char* to_string(Specificity s)
{
    switch (s) {
    case Specificity::AStrict: return "a_strict";
    case Specificity::BStrict: return "b_strict";
    case Specificity::Incomparable: return "incomparable";
    case Specificity::Equivalent: return "equivalent";
    }
    return "?";
}

const char* to_string(AttackKind k)
{
    return k == AttackKind::Defeat ? "defeat" : "interference";
}

const char* to_string(Label l)
{
    switch (l) {
    case Label::Undefeated: return "UNDEFEATED";
    case Label::Defeated: return "DEFEATED";
    case Label::Undecided: return "UNDECIDED";
    }
    return "?";
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Justified: return "JUSTIFIED";
    case Verdict::Denied: return "DENIED";
    case Verdict::Interference: return "INTERFERENCE";
    case Verdict::NoArgument: return "NO_ARGUMENT";
    }
    return "?";
}

namespace {

Argument complete_argument(const GroundTheory& theory, Support support, Literal conclusion)
{
    Argument a;
    a.support = std::move(support);
    a.conclusion = std::move(conclusion);
    std::set<Literal> heads;
    for (auto i : a.support) heads.insert(theory.defeasible[i].head);
    a.sub_conclusions.assign(heads.begin(), heads.end());
    for (auto i : a.support) {
        for (const auto& b : theory.defeasible[i].body) {
            if (b.is_necessary_kind() || heads.contains(b)) continue;
            if (theory.base.contains(b)) a.contingent_base.insert(b);
        }
    }
    return a;
}

std::vector<const Rule*> rules_of(const GroundTheory& theory, const Support& s)
{
    std::vector<const Rule*> out = theory.strict_ptrs();
    for (auto i : s) out.push_back(&theory.defeasible[i]);
    return out;
}

Support without(const Support& s, std::size_t pos)
{
    Support out;
    out.reserve(s.size() - 1);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (i != pos) out.push_back(s[i]);
    return out;
}

// Adds `cand` unless a subset is already present; drops supersets of it.
bool insert_minimal(std::vector<Support>& list, const Support& cand)
{
    for (const auto& s : list)
        if (std::includes(cand.begin(), cand.end(), s.begin(), s.end())) return false;
    std::erase_if(list, [&](const Support& s) { return std::includes(s.begin(), s.end(), cand.begin(), cand.end()); });
    list.push_back(cand);
    return true;
}

const Rule* top_rule(const GroundTheory& theory, const Argument& a)
{
    for (auto i : a.support)
        if (theory.defeasible[i].head == a.conclusion) return &theory.defeasible[i];
    return nullptr;
}

bool is_direct_valuation(const Rule& r)
{
    return r.schema == Schema::StateFormula || r.schema == Schema::Assessment;
}

std::vector<PropFormula> entry_leaves(const GroundTheory& theory, const Argument& a)
{
    std::vector<PropFormula> out;
    for (auto i : a.support)
        if (theory.defeasible[i].schema == Schema::ContrEntry) out.push_back(*theory.defeasible[i].formula);
    return out;
}

// Every leaf formula of `y` is covered by (entailed by) some leaf of `x`.
bool covers_leaves(const std::vector<PropFormula>& x, const std::vector<PropFormula>& y)
{
    return std::all_of(y.begin(), y.end(), [&](const PropFormula& fy) {
        return std::any_of(x.begin(), x.end(), [&](const PropFormula& fx) {
            if (fx.negated() || fy.negated()) return fx == fy;
            return is_subset(fy.atoms(), fx.atoms());
        });
    });
}

Literal topic_key(const Literal& l)
{
    switch (l.pred) {
    case Pred::Holds: return Literal::atom("$holds");
    case Pred::Achieves: return Literal::atom("$achieves");
    case Pred::Do: return Literal::atom("$do");
    default: return term_of(l);
    }
}

Specificity from_order(bool a_ge, bool b_ge)
{
    if (a_ge && b_ge) return Specificity::Equivalent;
    if (a_ge) return Specificity::AStrict;
    if (b_ge) return Specificity::BStrict;
    return Specificity::Incomparable;
}

}  // namespace

ArgumentEngine::ArgumentEngine(std::shared_ptr<const GroundTheory> theory, EngineConfig config)
    : theory_(std::move(theory)), config_(config)
{
    for (std::size_t i = 0; i < theory_->defeasible.size(); ++i) by_head_[theory_->defeasible[i].head].push_back(i);

    std::map<Literal, Literal> parent;
    auto find = [&](Literal k) {
        for (auto it = parent.find(k); it != parent.end() && !(it->second == k); it = parent.find(k)) k = it->second;
        return k;
    };
    for (const auto& r : theory_->strict) {
        Literal root = find(topic_key(r.head));
        for (const auto& b : r.body) {
            Literal other = find(topic_key(b));
            if (!(other == root)) parent[other] = root;
        }
        parent.emplace(root, root);
    }
    for (const auto& [k, _] : parent) topic_root_.emplace(k, find(k));
}

Literal ArgumentEngine::topic(const Literal& l) const
{
    Literal k = topic_key(l);
    auto it = topic_root_.find(k);
    return it == topic_root_.end() ? k : it->second;
}

Argument ArgumentEngine::make_argument(Support support, Literal conclusion) const
{
    return complete_argument(*theory_, std::move(support), std::move(conclusion));
}

bool ArgumentEngine::support_consistent(const Support& s)
{
    if (auto it = consistency_cache_.find(s); it != consistency_cache_.end()) return it->second;
    Closure c = theory_->base;
    c.saturate(rules_of(*theory_, s));
    bool ok = c.consistent();
    consistency_cache_.emplace(s, ok);
    return ok;
}

bool ArgumentEngine::derives(const Support& s, const Literal& goal)
{
    Closure c = theory_->base;
    c.saturate(rules_of(*theory_, s));
    return c.contains(goal);
}

void ArgumentEngine::expand(const Literal& l, std::set<Literal>& seen, std::vector<Step>& steps,
                            std::vector<Literal>& work)
{
    if (!seen.insert(l).second) return;
    if (theory_->base.contains(l)) return;

    auto add = [&](std::vector<Literal> premises, std::optional<std::size_t> rule) {
        for (const auto& p : premises) work.push_back(p);
        steps.push_back({std::move(premises), l, rule});
    };

    if (auto it = by_head_.find(l); it != by_head_.end())
        for (auto i : it->second) add(theory_->defeasible[i].body, i);
    for (const auto& r : theory_->strict)
        if (r.head == l) add(r.body, std::nullopt);

    // Heads (defeasible or strict) that strict inference can start from.
    auto for_each_head = [&](auto&& fn) {
        for (const auto& [h, _] : by_head_) fn(h);
        for (const auto& r : theory_->strict) fn(r.head);
    };

    if (!l.negated && (l.pred == Pred::Holds || l.pred == Pred::Achieves)) {
        const PropFormula& f = *l.formula;
        auto at = [&](const Id& atom, const Id& state) {
            return l.pred == Pred::Holds ? Literal::holds(conj_normalize({atom}), state)
                                         : Literal::achieves(l.terms, conj_normalize({atom}));
        };
        if (!f.negated() && f.arity() > 1) {
            std::vector<Literal> parts;
            for (const auto& a : f.atoms()) parts.push_back(at(a, l.symbol));
            add(std::move(parts), std::nullopt);
        } else if (!f.negated()) {
            for_each_head([&](const Literal& h) {
                if (h.pred != l.pred || h.negated || h.formula->negated() || h.formula->arity() < 2) return;
                if (h.symbol != l.symbol || h.terms != l.terms) return;
                if (is_subset(f.atoms(), h.formula->atoms())) add({h}, std::nullopt);
            });
        }
        if (l.pred == Pred::Holds && (f.negated() || f.arity() == 1)) {
            if (const auto* p = theory_->kb.parent_of(l.symbol)) add({Literal::holds(f, p->state)}, std::nullopt);
            if (const auto* c = theory_->kb.chance_at(l.symbol))
                add({Literal::holds(f, c->if_event), Literal::holds(f, c->if_not_event)}, std::nullopt);
        }
    }

    if (l.negated) {
        if (l.is_numeric()) {
            Literal t = term_of(l);
            for_each_head([&](const Literal& h) {
                if (!h.negated && h.value && term_of(h) == t && *h.value != *l.value) add({h}, std::nullopt);
            });
        } else if (l.pred == Pred::Desir) {
            add({Literal::undesir(*l.formula)}, std::nullopt);
        } else if (l.pred == Pred::Undesir) {
            add({Literal::desir(*l.formula)}, std::nullopt);
        } else if (l.pred == Pred::Holds && l.formula->arity() == 1) {
            const auto& f = *l.formula;
            add({Literal::holds(conj_normalize(f.atoms(), !f.negated()), l.symbol)}, std::nullopt);
        }
    }
}

ConstructResult ArgumentEngine::run(std::vector<Literal> roots, const std::vector<Literal>& report)
{
    ConstructResult result;
    std::set<Literal> seen;
    std::vector<Step> steps;
    while (!roots.empty()) {
        Literal l = std::move(roots.back());
        roots.pop_back();
        expand(l, seen, steps, roots);
    }

    std::map<Literal, std::vector<Support>> supports;
    std::map<Literal, std::size_t> version;
    for (const auto& l : seen)
        if (theory_->base.contains(l)) supports[l].push_back({});

    std::vector<std::optional<std::vector<std::size_t>>> seen_versions(steps.size());
    bool changed = true;
    while (changed && !result.partial) {
        changed = false;
        for (std::size_t si = 0; si < steps.size() && !result.partial; ++si) {
            const Step& st = steps[si];
            std::vector<const std::vector<Support>*> lists;
            std::vector<std::size_t> current;
            bool ready = true;
            for (const auto& p : st.premises) {
                auto it = supports.find(p);
                if (it == supports.end() || it->second.empty()) {
                    ready = false;
                    break;
                }
                lists.push_back(&it->second);
                current.push_back(version[p]);
            }
            if (!ready || current == seen_versions[si]) continue;
            seen_versions[si] = current;

            // Cartesian product over the premises' current minimal supports.
            std::vector<std::size_t> pick(lists.size(), 0);
            std::vector<Support> produced;
            while (true) {
                if (++result.steps > config_.budget) {
                    result.partial = true;
                    break;
                }
                std::set<std::size_t> merged;
                for (std::size_t k = 0; k < lists.size(); ++k) {
                    const auto& s = (*lists[k])[pick[k]];
                    merged.insert(s.begin(), s.end());
                }
                if (st.rule) merged.insert(*st.rule);
                Support cand(merged.begin(), merged.end());
                if (support_consistent(cand)) produced.push_back(std::move(cand));

                std::size_t k = 0;
                while (k < pick.size() && ++pick[k] == lists[k]->size()) pick[k++] = 0;
                if (k == pick.size()) break;
            }
            auto& target = supports[st.conclusion];
            bool grew = false;
            for (const auto& cand : produced) grew |= insert_minimal(target, cand);
            if (grew) {
                ++version[st.conclusion];
                changed = true;
            }
        }
    }

    std::set<Literal> reported;
    for (const auto& goal : report) {
        if (!reported.insert(goal).second) continue;
        auto it = supports.find(goal);
        if (it == supports.end()) continue;
        auto list = it->second;
        std::sort(list.begin(), list.end());
        for (const auto& s : list) {
            bool minimal = true;
            for (std::size_t i = 0; i < s.size() && minimal; ++i) minimal = !derives(without(s, i), goal);
            if (minimal) result.arguments.push_back(make_argument(s, goal));
        }
    }
    return result;
}

ConstructResult ArgumentEngine::construct_arguments(const Literal& goal)
{
    return run({goal}, {goal});
}

ConstructResult ArgumentEngine::build_pool(std::span<const Literal> goals)
{
    std::vector<Literal> roots(goals.begin(), goals.end());
    for (const auto& [h, _] : by_head_) roots.push_back(h);
    std::vector<Literal> report = roots;
    return run(std::move(roots), report);
}

bool ArgumentEngine::disagree(const Literal& a, const Literal& b)
{
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (auto it = disagree_cache_.find(key); it != disagree_cache_.end()) return it->second;
    Closure c = theory_->base;
    c.add(a);
    c.add(b);
    c.saturate(theory_->strict_ptrs());
    bool clash = !c.consistent();
    disagree_cache_.emplace(std::move(key), clash);
    return clash;
}

bool ArgumentEngine::activates(const Argument& a, const std::set<Literal>& e)
{
    std::vector<Literal> facts(e.begin(), e.end());
    if (theory_->necessary_closure(facts).contains(a.conclusion)) return false;
    std::vector<const Rule*> own;
    for (auto i : a.support) own.push_back(&theory_->defeasible[i]);
    return theory_->necessary_closure(facts, own).contains(a.conclusion);
}

// Activation by e means D(e) and not T(e), where D (derivable with the
// argument's own rules) and T (derivable without them) are both monotone in
// e. When T fails on the whole universe it fails on every subset, and the
// activating sets are exactly the supersets of D's minimal sets. Assessment
// and user-atom literals that neither the argument's rules nor any strict
// rule mention cannot change D and are left out of the search.
std::optional<std::vector<std::vector<Literal>>> ArgumentEngine::minimal_triggers(const Argument& x,
                                                                                  const std::vector<const Rule*>& own,
                                                                                  const std::vector<Literal>& u)
{
    if (theory_->necessary_closure(u).contains(x.conclusion)) return std::nullopt;
    auto derivable = [&](const std::vector<Literal>& e) {
        return theory_->necessary_closure(e, own).contains(x.conclusion);
    };
    if (strict_bodies_.empty() && !theory_->strict.empty())
        for (const auto& r : theory_->strict) strict_bodies_.insert(r.body.begin(), r.body.end());

    std::vector<Literal> relevant;
    for (const auto& l : u) {
        bool inert = (l.pred == Pred::Assess || l.pred == Pred::Atom) && !x.contingent_base.contains(l) &&
                     !strict_bodies_.contains(l);
        if (!inert) relevant.push_back(l);
    }
    auto key = std::make_tuple(x.support, x.conclusion, relevant);
    if (auto it = trigger_cache_.find(key); it != trigger_cache_.end()) return it->second;

    std::vector<std::vector<Literal>> out;
    if (derivable(relevant)) {
        // Literals in every minimal set, then the search over the rest.
        std::vector<Literal> core, rest;
        for (std::size_t i = 0; i < relevant.size(); ++i) {
            std::vector<Literal> without_i;
            for (std::size_t j = 0; j < relevant.size(); ++j)
                if (j != i) without_i.push_back(relevant[j]);
            (derivable(without_i) ? rest : core).push_back(relevant[i]);
        }
        if (derivable(core)) {
            out.push_back(core);
        } else {
            std::vector<std::size_t> masks(std::size_t{1} << rest.size());
            std::iota(masks.begin(), masks.end(), std::size_t{0});
            std::stable_sort(masks.begin(), masks.end(),
                             [](std::size_t p, std::size_t q) { return std::popcount(p) < std::popcount(q); });
            std::vector<std::size_t> found;
            for (auto mask : masks) {
                if (std::any_of(found.begin(), found.end(), [&](auto f) { return (mask & f) == f; })) continue;
                std::vector<Literal> e = core;
                for (std::size_t i = 0; i < rest.size(); ++i)
                    if ((mask >> i) & 1) e.push_back(rest[i]);
                if (!derivable(e)) continue;
                found.push_back(mask);
                out.push_back(std::move(e));
            }
        }
    }
    trigger_cache_.emplace(std::move(key), out);
    return out;
}

Specificity ArgumentEngine::more_specific(const Argument& a, const Argument& b)
{
    if (a == b) return Specificity::Equivalent;
    if (!(topic(a.conclusion) == topic(b.conclusion))) return Specificity::Incomparable;
    auto key = std::make_tuple(a.support, a.conclusion, b.support, b.conclusion);
    if (auto it = specificity_cache_.find(key); it != specificity_cache_.end()) return it->second;
    auto remember = [&](Specificity s) {
        specificity_cache_.emplace(key, s);
        return s;
    };

    // Built-in preferences between competing valuations of the same state.
    const Rule* ta = top_rule(*theory_, a);
    const Rule* tb = top_rule(*theory_, b);
    if (ta && tb && ta->head.pred == Pred::Utility && tb->head.pred == Pred::Utility && ta->state == tb->state) {
        bool eu_a = ta->schema == Schema::ExpectedUtility, eu_b = tb->schema == Schema::ExpectedUtility;
        if (eu_a && is_direct_valuation(*tb)) return remember(Specificity::AStrict);
        if (eu_b && is_direct_valuation(*ta)) return remember(Specificity::BStrict);
        if (ta->schema == Schema::Assessment && tb->schema == Schema::Assessment && ta->basis != tb->basis) {
            if (is_subset(tb->basis, ta->basis)) return remember(Specificity::AStrict);
            if (is_subset(ta->basis, tb->basis)) return remember(Specificity::BStrict);
        }
    }

    std::set<Literal> universe = a.contingent_base;
    universe.insert(b.contingent_base.begin(), b.contingent_base.end());

    Specificity by_activation;
    if (universe.size() > config_.specificity_cap) {
        approximate_ = true;
        const auto& ba = a.contingent_base;
        const auto& bb = b.contingent_base;
        bool a_sup = std::includes(ba.begin(), ba.end(), bb.begin(), bb.end());
        bool b_sup = std::includes(bb.begin(), bb.end(), ba.begin(), ba.end());
        by_activation = from_order(a_sup, b_sup);
    } else {
        std::vector<Literal> u(universe.begin(), universe.end());
        std::vector<const Rule*> own_a, own_b;
        for (auto i : a.support) own_a.push_back(&theory_->defeasible[i]);
        for (auto i : b.support) own_b.push_back(&theory_->defeasible[i]);
        auto ta = minimal_triggers(a, own_a, u);
        auto tb = minimal_triggers(b, own_b, u);
        if (ta && tb) {
            auto derives_from = [&](const std::vector<const Rule*>& own, const Literal& goal,
                                    const std::vector<Literal>& e) {
                return theory_->necessary_closure(e, own).contains(goal);
            };
            bool a_ge = std::all_of(ta->begin(), ta->end(), [&](const auto& m) { return derives_from(own_b, b.conclusion, m); });
            bool b_ge = std::all_of(tb->begin(), tb->end(), [&](const auto& m) { return derives_from(own_a, a.conclusion, m); });
            by_activation = from_order(a_ge, b_ge);
        } else {
            bool a_ge = true, b_ge = true;  // a_ge: whatever activates a activates b
            for (std::size_t mask = 0; mask < (std::size_t{1} << u.size()) && (a_ge || b_ge); ++mask) {
                std::vector<Literal> e;
                for (std::size_t i = 0; i < u.size(); ++i)
                    if ((mask >> i) & 1) e.push_back(u[i]);
                Closure trivial = theory_->necessary_closure(e);
                bool act_a = !trivial.contains(a.conclusion) && theory_->necessary_closure(e, own_a).contains(a.conclusion);
                bool act_b = !trivial.contains(b.conclusion) && theory_->necessary_closure(e, own_b).contains(b.conclusion);
                if (act_a && !act_b) a_ge = false;
                if (act_b && !act_a) b_ge = false;
            }
            by_activation = from_order(a_ge, b_ge);
        }
    }
    if (by_activation != Specificity::Equivalent) return remember(by_activation);

    // Same circumstances: the argument resting on finer-grained
    // contribution entries (an exception for the whole conjunction rather
    // than its parts) is the more specific one.
    auto la = entry_leaves(*theory_, a), lb = entry_leaves(*theory_, b);
    if (la.empty() && lb.empty()) return remember(Specificity::Equivalent);
    bool ga = covers_leaves(la, lb), gb = covers_leaves(lb, la);
    if (ga && gb) return remember(Specificity::Equivalent);
    if (ga) return remember(Specificity::AStrict);
    if (gb) return remember(Specificity::BStrict);
    return remember(Specificity::Incomparable);
}

namespace {

std::vector<std::vector<std::size_t>> sub_arguments(const std::vector<Argument>& pool)
{
    std::vector<std::vector<std::size_t>> subs(pool.size());
    for (std::size_t t = 0; t < pool.size(); ++t)
        for (std::size_t j = 0; j < pool.size(); ++j) {
            const auto& sj = pool[j].support;
            const auto& st = pool[t].support;
            if (!sj.empty() && std::includes(st.begin(), st.end(), sj.begin(), sj.end())) subs[t].push_back(j);
        }
    return subs;
}

}  // namespace

std::vector<AttackEdge> ArgumentEngine::counterarguments(std::size_t target, const std::vector<Argument>& pool)
{
    std::vector<AttackEdge> out;
    const auto& st = pool[target].support;
    std::set<std::tuple<std::size_t, Literal>> emitted;
    for (std::size_t j = 0; j < pool.size(); ++j) {
        const auto& sj = pool[j].support;
        if (sj.empty() || !std::includes(st.begin(), st.end(), sj.begin(), sj.end())) continue;
        const Argument& sub = pool[j];
        for (std::size_t a = 0; a < pool.size(); ++a) {
            const Argument& att = pool[a];
            if (att.support.empty() || !disagree(att.conclusion, sub.conclusion)) continue;
            if (!emitted.insert({a, sub.conclusion}).second) continue;
            Specificity s = more_specific(att, sub);
            if (s == Specificity::BStrict) continue;
            out.push_back({a, target, sub.conclusion,
                           s == Specificity::AStrict ? AttackKind::Defeat : AttackKind::Interference});
        }
    }
    return out;
}

std::vector<AttackEdge> ArgumentEngine::all_attacks(const std::vector<Argument>& pool)
{
    // Group by conclusion so each literal pair is checked once.
    std::map<Literal, std::vector<std::size_t>> by_conclusion;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (!pool[i].support.empty()) by_conclusion[pool[i].conclusion].push_back(i);
    std::map<Literal, std::vector<const std::vector<std::size_t>*>> rivals;
    for (const auto& [c1, _] : by_conclusion)
        for (const auto& [c2, idx] : by_conclusion)
            if (disagree(c1, c2)) rivals[c1].push_back(&idx);

    auto subs = sub_arguments(pool);
    std::vector<AttackEdge> out;
    for (std::size_t t = 0; t < pool.size(); ++t) {
        std::set<std::tuple<std::size_t, Literal>> emitted;
        for (auto j : subs[t]) {
            auto it = rivals.find(pool[j].conclusion);
            if (it == rivals.end()) continue;
            for (const auto* attackers : it->second) {
                for (auto a : *attackers) {
                    if (!emitted.insert({a, pool[j].conclusion}).second) continue;
                    Specificity s = more_specific(pool[a], pool[j]);
                    if (s == Specificity::BStrict) continue;
                    out.push_back({a, t, pool[j].conclusion,
                                   s == Specificity::AStrict ? AttackKind::Defeat : AttackKind::Interference});
                }
            }
        }
    }
    return out;
}

std::vector<Label> label_arguments(std::size_t pool_size, std::span<const AttackEdge> edges)
{
    std::vector<std::set<std::size_t>> targets(pool_size);
    std::vector<std::size_t> live(pool_size, 0);  // attackers not yet DEFEATED
    for (const auto& e : edges)
        if (targets[e.attacker].insert(e.target).second) ++live[e.target];

    std::vector<Label> labels(pool_size, Label::Undecided);
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < pool_size; ++i)
        if (live[i] == 0) {
            labels[i] = Label::Undefeated;
            work.push_back(i);
        }
    while (!work.empty()) {
        std::size_t i = work.back();
        work.pop_back();
        for (auto t : targets[i]) {
            if (labels[t] != Label::Undecided) continue;
            if (labels[i] == Label::Undefeated) {
                labels[t] = Label::Defeated;
                work.push_back(t);
            } else if (--live[t] == 0) {
                labels[t] = Label::Undefeated;
                work.push_back(t);
            }
        }
    }
    return labels;
}

// --- Deliberation ---------------------------------------------------------

namespace {

std::shared_ptr<const GroundTheory> ground(const KnowledgeBase& kb, std::span<const Literal> goals,
                                           const EngineConfig& config)
{
    SchemaGrounder grounder(kb, config.grounding);
    return std::make_shared<const GroundTheory>(grounder.ground_for(goals));
}

}  // namespace

Deliberation::Deliberation(const KnowledgeBase& kb, std::span<const Literal> goals, EngineConfig config)
    : theory_(ground(kb, goals, config)), engine_(theory_, config)
{
    auto built = engine_.build_pool(goals);
    partial_ = built.partial;
    pool_ = std::move(built.arguments);
    std::sort(pool_.begin(), pool_.end(), [](const Argument& a, const Argument& b) {
        auto ca = a.conclusion.to_string(), cb = b.conclusion.to_string();
        return std::tie(ca, a.support) < std::tie(cb, b.support);
    });
    pool_.erase(std::unique(pool_.begin(), pool_.end()), pool_.end());
    edges_ = engine_.all_attacks(pool_);
    labels_ = label_arguments(pool_.size(), edges_);
}

std::vector<std::size_t> Deliberation::arguments_for(const Literal& goal) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pool_.size(); ++i)
        if (pool_[i].conclusion == goal) out.push_back(i);
    return out;
}

std::vector<std::size_t> Deliberation::arguments_against(const Literal& goal)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pool_.size(); ++i)
        if (engine_.disagree(pool_[i].conclusion, goal)) out.push_back(i);
    return out;
}

Verdict Deliberation::verdict(const Literal& goal)
{
    auto pro = arguments_for(goal);
    auto con = arguments_against(goal);
    auto any = [&](const std::vector<std::size_t>& idx, Label l) {
        return std::any_of(idx.begin(), idx.end(), [&](auto i) { return labels_[i] == l; });
    };
    bool pro_in = any(pro, Label::Undefeated), con_in = any(con, Label::Undefeated);
    if (pro_in && !con_in) return Verdict::Justified;
    if (con_in && !pro_in) return Verdict::Denied;
    if (any(pro, Label::Undecided) || any(con, Label::Undecided)) return Verdict::Interference;
    return Verdict::NoArgument;
}

std::optional<Rational> Deliberation::justified_value(const Literal& term)
{
    Literal t = term_of(term);
    std::set<Literal> seen;
    for (const auto& a : pool_) {
        if (a.conclusion.negated || !a.conclusion.value || term_of(a.conclusion) != t) continue;
        if (!seen.insert(a.conclusion).second) continue;
        if (verdict(a.conclusion) == Verdict::Justified) return *a.conclusion.value;
    }
    return std::nullopt;
}

DialecticTrace make_trace(Deliberation& d, const Literal& goal)
{
    DialecticTrace t;
    t.goal = goal;
    t.verdict = d.verdict(goal);
    t.theory = d.shared_theory();
    t.pool = d.pool();
    t.edges = d.edges();
    t.labels = d.labels();
    t.partial = d.partial();
    t.approximate = d.approximate();
    return t;
}

DialecticTrace justify(const KnowledgeBase& kb, const Literal& goal, EngineConfig config)
{
    Literal goals[] = {goal};
    Deliberation d(kb, goals, config);
    return make_trace(d, goal);
}

// --- Enumeration oracle ---------------------------------------------------

std::vector<Argument> enumerate_all_arguments(const GroundTheory& theory, std::size_t size_bound,
                                              std::span<const Literal> extra_goals)
{
    const std::size_t n = theory.defeasible.size();
    if (n > 20)
        throw OracleScaleExceeded("enumeration oracle refuses " + std::to_string(n) + " ground instances (limit 20)");

    std::set<Literal> universe(extra_goals.begin(), extra_goals.end());
    for (const auto& r : theory.defeasible) universe.insert(r.head);
    for (const auto& r : theory.strict) universe.insert(r.head);
    for (const auto& l : theory.kb.contingent) universe.insert(l);
    std::vector<Literal> cands(universe.begin(), universe.end());
    const std::size_t words = (cands.size() + 63) / 64;

    const std::size_t masks = std::size_t{1} << n;
    std::vector<std::uint64_t> contained(masks * words, 0);
    std::vector<char> ok(masks, 0);
    auto bit = [&](std::size_t mask, std::size_t c) {
        return (contained[mask * words + c / 64] >> (c % 64)) & 1;
    };

    for (std::size_t mask = 0; mask < masks; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > size_bound) continue;
        std::vector<const Rule*> rules = theory.strict_ptrs();
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1) rules.push_back(&theory.defeasible[i]);
        Closure c = theory.base;
        c.saturate(rules);
        ok[mask] = c.consistent();
        for (std::size_t k = 0; k < cands.size(); ++k)
            if (c.contains(cands[k])) contained[mask * words + k / 64] |= std::uint64_t{1} << (k % 64);
    }

    std::vector<Argument> out;
    for (std::size_t mask = 0; mask < masks; ++mask) {
        if (!ok[mask] || static_cast<std::size_t>(std::popcount(mask)) > size_bound) continue;
        for (std::size_t k = 0; k < cands.size(); ++k) {
            if (!bit(mask, k)) continue;
            bool minimal = true;
            for (std::size_t i = 0; i < n && minimal; ++i)
                if ((mask >> i) & 1) minimal = !bit(mask ^ (std::size_t{1} << i), k);
            if (!minimal) continue;
            Support s;
            for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i) & 1) s.push_back(i);
            out.push_back(complete_argument(theory, std::move(s), cands[k]));
        }
    }
    return out;
}

}  // namespace ddec
