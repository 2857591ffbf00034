#include "ddec/report.hpp"

#include <set>

namespace ddec {

using nlohmann::json;

namespace {

std::string arg_id(std::size_t i) { return "A" + std::to_string(i + 1); }

}  // namespace

const char* kind_name(RecommendationKind k)
{
    switch (k) {
    case RecommendationKind::Act: return "ACT";
    case RecommendationKind::Interference: return "INTERFERENCE";
    case RecommendationKind::NoArgument: return "NO_ARGUMENT";
    }
    return "?";
}

json trace_to_json(const DialecticTrace& t)
{
    const GroundTheory& theory = *t.theory;
    json args = json::array();
    std::set<std::size_t> used;
    for (std::size_t i = 0; i < t.pool.size(); ++i) {
        const Argument& a = t.pool[i];
        json support = json::array();
        for (auto r : a.support) {
            support.push_back(theory.defeasible[r].id);
            used.insert(r);
        }
        json base = json::array();
        for (const auto& l : a.contingent_base) base.push_back(l.to_string());
        args.push_back({{"id", arg_id(i)},
                        {"conclusion", a.conclusion.to_string()},
                        {"support", support},
                        {"contingent_base", base},
                        {"label", to_string(t.labels[i])}});
    }
    json edges = json::array();
    for (const auto& e : t.edges)
        edges.push_back({{"attacker", arg_id(e.attacker)},
                         {"target", arg_id(e.target)},
                         {"point", e.point.to_string()},
                         {"kind", to_string(e.kind)}});
    json rules = json::array();
    for (auto r : used) {
        const Rule& rule = theory.defeasible[r];
        rules.push_back({{"id", rule.id}, {"schema", schema_name(rule.schema)}, {"text", rule.to_string()}});
    }
    return {{"goal", t.goal.to_string()},
            {"verdict", to_string(t.verdict)},
            {"partial", t.partial},
            {"approximate", t.approximate},
            {"arguments", args},
            {"edges", edges},
            {"rules", rules}};
}

json recommendation_to_json(const Recommendation& rec, bool traces)
{
    json values = json::object();
    for (const auto& [a, v] : rec.root_values) values[a] = v.to_string();
    json verdicts = json::object();
    for (const auto& [a, v] : rec.verdicts) verdicts[a] = to_string(v);
    json out = {{"verdict", kind_name(rec.kind)},
                {"act", rec.kind == RecommendationKind::Act ? json(rec.act) : json(nullptr)},
                {"contenders", rec.contenders},
                {"fallback_used", rec.fallback_used},
                {"partial", rec.partial},
                {"root_values", values},
                {"act_verdicts", verdicts},
                {"summary", rec.summary()}};
    if (traces) {
        json tr = json::object();
        for (const auto& [a, t] : rec.traces) tr[a] = trace_to_json(t);
        out["traces"] = tr;
    }
    return out;
}

json salient_to_json(const SalientModel& s)
{
    json paths = json::array();
    for (const auto& p : s.paths)
        paths.push_back({{"act", p.act}, {"states", p.states}, {"probability", p.probability.to_string()}});
    json mass = json::object();
    for (const auto& [a, m] : s.covered_mass) mass[a] = m.to_string();
    json expansions = json::array();
    for (const auto& [st, c] : s.model.expansions)
        expansions.push_back({{"state", st},
                              {"event", c.event},
                              {"k", c.k.to_string()},
                              {"if_event", c.if_event},
                              {"if_not_event", c.if_not_event}});
    return {{"salient", s.salient},
            {"paths", paths},
            {"covered_mass", mass},
            {"model", {{"roots", s.model.roots}, {"states", s.model.states}, {"expansions", expansions}}},
            {"notice", s.notice.empty() ? json(nullptr) : json(s.notice)}};
}

}  // namespace ddec
