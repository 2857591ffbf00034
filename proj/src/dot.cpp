#include "ddec/dot.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ddec {

namespace {

bool clash(const GroundTheory& theory, const Literal& a, const Literal& b)
{
    Closure c = theory.base;
    c.add(a);
    c.add(b);
    c.saturate(theory.strict_ptrs());
    return !c.consistent();
}

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string html(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string arg_id(std::size_t i) { return "A" + std::to_string(i + 1); }

}  // namespace

std::vector<std::size_t> displayed_arguments(const DialecticTrace& t)
{
    std::set<std::size_t> shown;
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < t.pool.size(); ++i) {
        const Literal& c = t.pool[i].conclusion;
        if (c == t.goal || (!t.pool[i].support.empty() && clash(*t.theory, c, t.goal)))
            if (shown.insert(i).second) work.push_back(i);
    }
    while (!work.empty()) {
        std::size_t target = work.back();
        work.pop_back();
        for (const auto& e : t.edges)
            if (e.target == target && shown.insert(e.attacker).second) work.push_back(e.attacker);
    }
    return {shown.begin(), shown.end()};
}

std::string export_dot(const DialecticTrace& t)
{
    const GroundTheory& theory = *t.theory;
    auto shown = displayed_arguments(t);
    std::set<std::size_t> shown_set(shown.begin(), shown.end());

    // Points under attack need a node in the target's cluster.
    std::map<std::size_t, std::set<Literal>> points;
    for (const auto& e : t.edges)
        if (shown_set.contains(e.attacker) && shown_set.contains(e.target)) points[e.target].insert(e.point);

    auto justified = [&](std::size_t i) {
        if (t.labels[i] != Label::Undefeated) return false;
        for (std::size_t j = 0; j < t.pool.size(); ++j)
            if (t.labels[j] == Label::Undefeated && !t.pool[j].support.empty() &&
                clash(theory, t.pool[j].conclusion, t.pool[i].conclusion))
                return false;
        return true;
    };

    std::string out = "digraph dialectic {\n";
    out += "  rankdir=BT;\n";
    out += "  compound=true;\n";
    out += "  node [shape=box, fontname=\"Helvetica\", fontsize=11];\n";
    out += "  edge [fontname=\"Helvetica\", fontsize=9];\n";
    out += "  label=" + quoted("goal: " + t.goal.to_string() + " -- " + to_string(t.verdict)) + ";\n";

    std::map<std::size_t, std::map<Literal, std::string>> node_of;
    for (auto i : shown) {
        const Argument& a = t.pool[i];
        const std::string id = arg_id(i);
        std::set<Literal> lits{a.conclusion};
        for (auto r : a.support) {
            const Rule& rule = theory.defeasible[r];
            lits.insert(rule.head);
            lits.insert(rule.body.begin(), rule.body.end());
        }
        if (auto it = points.find(i); it != points.end()) lits.insert(it->second.begin(), it->second.end());

        auto& nodes = node_of[i];
        std::size_t k = 0;
        for (const auto& l : lits) nodes.emplace(l, id + "_" + std::to_string(k++));

        out += "  subgraph cluster_" + id + " {\n";
        out += "    label=" + quoted(id + " " + to_string(t.labels[i])) + ";\n";
        out += "    style=rounded;\n";
        const bool bold = justified(i);
        for (const auto& [l, n] : nodes) {
            std::string attrs;
            if (l == a.conclusion && bold) {
                attrs = "label=" + quoted(l.to_string()) + ", shape=underline, penwidth=3";
            } else if (a.contingent_base.contains(l)) {
                attrs = "label=<<U>" + html(l.to_string()) + "</U>>, shape=plaintext";
            } else if (l.is_necessary_kind() &&
                       std::none_of(a.support.begin(), a.support.end(),
                                    [&](auto r) { return theory.defeasible[r].head == l; })) {
                attrs = "label=" + quoted(l.to_string()) + ", shape=plaintext";
            } else {
                attrs = "label=" + quoted(l.to_string());
            }
            out += "    " + n + " [" + attrs + "];\n";
        }
        std::set<std::pair<std::string, std::string>> links;
        for (auto r : a.support) {
            const Rule& rule = theory.defeasible[r];
            for (const auto& b : rule.body) links.emplace(nodes.at(b), nodes.at(rule.head));
        }
        bool direct = a.support.empty() || std::any_of(a.support.begin(), a.support.end(), [&](auto r) {
                          return theory.defeasible[r].head == a.conclusion;
                      });
        if (!direct) {
            // Conclusion reached by strict inference from the support's heads.
            for (auto r : a.support) links.emplace(nodes.at(theory.defeasible[r].head), nodes.at(a.conclusion));
        }
        for (const auto& [from, to] : links) out += "    " + from + " -> " + to + ";\n";
        out += "  }\n";
    }

    std::set<std::pair<std::size_t, std::size_t>> interfering;
    for (const auto& e : t.edges) {
        if (!shown_set.contains(e.attacker) || !shown_set.contains(e.target)) continue;
        const std::string from = node_of[e.attacker].at(t.pool[e.attacker].conclusion);
        const std::string to = node_of[e.target].at(e.point);
        if (e.kind == AttackKind::Defeat) {
            out += "  " + from + " -> " + to + " [arrowhead=normal, arrowsize=2.5, penwidth=2, color=firebrick, " +
                   "label=" + quoted("defeats") + "];\n";
            continue;
        }
        auto pair = std::minmax(e.attacker, e.target);
        if (!interfering.insert(pair).second) continue;
        out += "  " + from + " -> " + to + " [dir=both, style=dashed, arrowhead=open, arrowtail=open, " +
               "color=gray40, label=" + quoted("interferes") + "];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace ddec
