#include "ddec/service.hpp"

#include "ddec/dot.hpp"
#include "ddec/report.hpp"

#include <algorithm>
#include <mutex>

namespace ddec {

using nlohmann::json;

// --- Session ------------------------------------------------------------------

namespace {

Recommendation evaluate(const Document& doc, const SessionConfig& config)
{
    return recommend(doc.model, doc.kb, config.fallback, config.engine);
}

}  // namespace

Session::Session(std::string source, SessionConfig config)
    : initial_(std::move(source)), config_(std::move(config)), doc_(parse(initial_))
{
    rec_ = evaluate(doc_, config_);
    initial_rec_ = rec_;
}

std::string Session::source() const
{
    std::string out = initial_;
    for (const auto& h : history_) out += "\n" + h.statement;
    return out;
}

const Recommendation& Session::add(std::string_view statement)
{
    std::size_t n = count_statements(statement);
    if (n != 1)
        throw ParseError(1, 1, "expected exactly one statement, found " + std::to_string(n));

    std::string prefix = source() + "\n";
    const int offset = static_cast<int>(std::count(prefix.begin(), prefix.end(), '\n'));
    Document next;
    try {
        next = parse(prefix + std::string(statement));
    } catch (const ParseError& e) {
        if (e.line() > offset) throw ParseError(e.line() - offset, e.column(), e.detail());
        throw;
    }
    Recommendation rec = evaluate(next, config_);

    doc_ = std::move(next);
    rec_ = std::move(rec);
    history_.push_back({std::string(statement), rec_});
    log_.push_back({SessionOp::Kind::Add, std::string(statement)});
    ++revision_;
    return rec_;
}

std::optional<HistoryEntry> Session::undo()
{
    if (history_.empty()) return std::nullopt;
    HistoryEntry popped = std::move(history_.back());
    history_.pop_back();
    doc_ = parse(source());
    rec_ = history_.empty() ? initial_rec_ : history_.back().recommendation;
    log_.push_back({SessionOp::Kind::Undo, {}});
    ++revision_;
    return popped;
}

DialecticTrace Session::query(const Literal& goal) const
{
    return justify(doc_.kb, goal, config_.engine);
}

Session Session::replay(std::string initial, const std::vector<SessionOp>& log, SessionConfig config)
{
    Session s(std::move(initial), std::move(config));
    for (const auto& op : log) {
        if (op.kind == SessionOp::Kind::Add) s.add(op.statement);
        else s.undo();
    }
    return s;
}

// --- Service -------------------------------------------------------------------

namespace {

// Argument identity across two recommendations: goal, conclusion, rule ids.
std::map<std::string, std::string> labelled_arguments(const Recommendation& rec)
{
    std::map<std::string, std::string> out;
    for (const auto& [act, t] : rec.traces) {
        for (std::size_t i = 0; i < t.pool.size(); ++i) {
            std::string key = t.pool[i].conclusion.to_string() + " <=";
            for (auto r : t.pool[i].support) key += " " + t.theory->defeasible[r].id;
            out[key] = to_string(t.labels[i]);
        }
    }
    return out;
}

json dialectic_delta(const Recommendation& before, const Recommendation& after)
{
    auto a = labelled_arguments(before), b = labelled_arguments(after);
    json added = json::array(), removed = json::array(), relabelled = json::array();
    for (const auto& [k, label] : b) {
        auto it = a.find(k);
        if (it == a.end()) added.push_back({{"argument", k}, {"label", label}});
        else if (it->second != label) relabelled.push_back({{"argument", k}, {"from", it->second}, {"to", label}});
    }
    for (const auto& [k, label] : a)
        if (!b.contains(k)) removed.push_back({{"argument", k}, {"label", label}});
    return {{"added", added}, {"removed", removed}, {"relabelled", relabelled}};
}

json history_json(const Session& s)
{
    json out = json::array();
    for (const auto& h : s.history())
        out.push_back({{"statement", h.statement}, {"recommendation", recommendation_to_json(h.recommendation)}});
    return out;
}

std::optional<json> parse_body(const std::string& body)
{
    if (body.empty()) return json::object();
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

}  // namespace

Service::Service(std::string source, SessionConfig config) : session_(std::move(source), std::move(config)) {}

std::uint64_t Service::revision() const
{
    std::shared_lock lock(mutex_);
    return session_.revision();
}

HttpResponse Service::reply(int status, const json& body) const
{
    json b = body;
    b["revision"] = session_.revision();
    return {status, "application/json", b.dump(2), session_.revision()};
}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::map<std::string, std::string>& params, const std::string& body)
{
    if (method == "GET" && path == "/health") {
        std::shared_lock lock(mutex_);
        return reply(200, {{"status", "ok"}});
    }
    if (method == "GET" && path == "/session") return session_view();
    if (method == "POST" && path == "/statements") return add_statement(body);
    if (method == "POST" && path == "/query") return run_query(body);
    if (method == "GET" && path == "/graph.dot") return graph(params);
    if (method == "POST" && path == "/undo") return undo(body);
    std::shared_lock lock(mutex_);
    return reply(404, {{"error", "no route for " + method + " " + path}});
}

HttpResponse Service::session_view() const
{
    std::shared_lock lock(mutex_);
    json statements = json::array();
    for (const auto& s : session_.document().statements)
        statements.push_back({{"keyword", s.keyword}, {"text", s.text}, {"line", s.line}, {"column", s.column}});
    return reply(200, {{"document", serialize(session_.document())},
                       {"statements", statements},
                       {"recommendation", recommendation_to_json(session_.recommendation())},
                       {"history", history_json(session_)}});
}

HttpResponse Service::add_statement(const std::string& body)
{
    std::unique_lock lock(mutex_);
    auto req = parse_body(body);
    if (!req || !req->contains("statement") || !(*req)["statement"].is_string())
        return reply(400, {{"error", "body must be a JSON object with a string field 'statement'"}});
    if (req->contains("revision")) {
        const json& r = (*req)["revision"];
        if (!r.is_number_unsigned() || r.get<std::uint64_t>() != session_.revision())
            return reply(409, {{"error", "stale revision"}});
    }
    const std::string statement = (*req)["statement"].get<std::string>();
    Recommendation before = session_.recommendation();
    try {
        session_.add(statement);
    } catch (const ParseError& e) {
        return reply(400, {{"error", e.detail()}, {"line", e.line()}, {"column", e.column()}});
    } catch (const std::exception& e) {
        return reply(422, {{"error", e.what()}});
    }
    const Recommendation& after = session_.recommendation();
    return reply(200, {{"recommendation", recommendation_to_json(after)},
                       {"previous_recommendation", recommendation_to_json(before)},
                       {"changed", before.summary() != after.summary()},
                       {"delta", dialectic_delta(before, after)}});
}

HttpResponse Service::run_query(const std::string& body) const
{
    std::shared_lock lock(mutex_);
    auto req = parse_body(body);
    if (!req || !req->contains("literal") || !(*req)["literal"].is_string())
        return reply(400, {{"error", "body must be a JSON object with a string field 'literal'"}});
    try {
        Literal goal = session_.literal((*req)["literal"].get<std::string>());
        DialecticTrace t = session_.query(goal);
        return reply(200, {{"literal", goal.to_string()}, {"verdict", to_string(t.verdict)}, {"trace", trace_to_json(t)}});
    } catch (const ParseError& e) {
        return reply(400, {{"error", e.detail()}, {"line", e.line()}, {"column", e.column()}});
    } catch (const std::exception& e) {
        return reply(422, {{"error", e.what()}});
    }
}

HttpResponse Service::graph(const std::map<std::string, std::string>& params) const
{
    std::shared_lock lock(mutex_);
    auto it = params.find("literal");
    if (it == params.end()) return reply(400, {{"error", "missing query parameter 'literal'"}});
    try {
        DialecticTrace t = session_.query(session_.literal(it->second));
        return {200, "text/vnd.graphviz", export_dot(t), session_.revision()};
    } catch (const ParseError& e) {
        return reply(400, {{"error", e.detail()}, {"line", e.line()}, {"column", e.column()}});
    } catch (const std::exception& e) {
        return reply(422, {{"error", e.what()}});
    }
}

HttpResponse Service::undo(const std::string& body)
{
    std::unique_lock lock(mutex_);
    auto req = parse_body(body);
    if (!req) return reply(400, {{"error", "body must be a JSON object"}});
    if (req->contains("revision")) {
        const json& r = (*req)["revision"];
        if (!r.is_number_unsigned() || r.get<std::uint64_t>() != session_.revision())
            return reply(409, {{"error", "stale revision"}});
    }
    Recommendation before = session_.recommendation();
    auto popped = session_.undo();
    if (!popped) return reply(409, {{"error", "nothing to undo"}});
    const Recommendation& after = session_.recommendation();
    return reply(200, {{"undone", popped->statement},
                       {"recommendation", recommendation_to_json(after)},
                       {"changed", before.summary() != after.summary()},
                       {"delta", dialectic_delta(before, after)}});
}

}  // namespace ddec
