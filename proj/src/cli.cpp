#include "ddec/cli.hpp"

#include "ddec/dot.hpp"
#include "ddec/dsl.hpp"
#include "ddec/report.hpp"
#include "ddec/service.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ddec {

namespace {

struct Options {
    std::string file;
    std::string literal;
    std::string threshold;
    int depth = 0;
    int port = 8080;
    std::string host = "127.0.0.1";
    std::string fallback;
    std::size_t budget = EngineConfig{}.budget;
    std::size_t max_arity = GroundingConfig{}.max_arity;
    bool json = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> split_order(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

SessionConfig session_config(const Options& o, const KnowledgeBase& kb)
{
    SessionConfig c;
    c.engine.budget = o.budget;
    c.engine.grounding.max_arity = o.max_arity;
    if (o.max_arity < 1) throw UsageError("--max-arity must be at least 1");
    c.fallback.inclination = split_order(o.fallback);
    for (const auto& a : c.fallback.inclination)
        if (!kb.vocab.acts.contains(a)) throw UsageError("--fallback names unknown act '" + a + "'");
    return c;
}

void print_trace(std::ostream& out, const DialecticTrace& t)
{
    out << "goal: " << t.goal.to_string() << "\n";
    out << "verdict: " << to_string(t.verdict) << "\n";
    if (t.partial) out << "note: search budget exhausted; argument pool may be incomplete\n";
    if (t.approximate) out << "note: some specificity comparisons were approximated\n";
    out << "arguments:\n";
    for (std::size_t i = 0; i < t.pool.size(); ++i) {
        const Argument& a = t.pool[i];
        out << "  A" << i + 1 << " [" << to_string(t.labels[i]) << "] " << a.conclusion.to_string() << "\n";
        for (auto r : a.support) out << "      " << t.theory->defeasible[r].id << "\n";
    }
    out << "attacks:\n";
    for (const auto& e : t.edges)
        out << "  A" << e.attacker + 1 << (e.kind == AttackKind::Defeat ? " defeats A" : " interferes with A")
            << e.target + 1 << " at " << e.point.to_string() << "\n";
}

void print_salient(std::ostream& out, const SalientModel& s)
{
    if (!s.notice.empty()) {
        out << s.notice << "\n";
        return;
    }
    for (const auto& p : s.paths) {
        out << p.act << ":";
        for (std::size_t i = 0; i < p.states.size(); ++i) out << (i ? " -> " : " ") << p.states[i];
        out << " (p=" << p.probability.to_string() << ")\n";
    }
    for (const auto& [a, m] : s.covered_mass) out << "probability covered for " << a << ": " << m.to_string() << "\n";
}

int repl(Session& session, std::istream& in, std::ostream& out, std::ostream& err)
{
    out << session.recommendation().summary() << "\n";
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        line = line.substr(first);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        try {
            if (line == ":quit" || line == ":q") break;
            if (line == ":recommend") {
                out << session.recommendation().summary() << "\n";
            } else if (line == ":show") {
                out << serialize(session.document());
            } else if (line == ":undo") {
                auto popped = session.undo();
                if (!popped) err << "nothing to undo\n";
                else out << "undone: " << popped->statement << "\n" << session.recommendation().summary() << "\n";
            } else if (line.rfind(":justify ", 0) == 0 || line.rfind(":trace ", 0) == 0) {
                bool full = line[1] == 't';
                DialecticTrace t = session.query(session.literal(line.substr(line.find(' ') + 1)));
                if (full) print_trace(out, t);
                else out << to_string(t.verdict) << "\n";
            } else if (line[0] == ':') {
                err << "unknown command '" << line << "' (:recommend :justify :trace :undo :show :quit)\n";
            } else if (line[0] != '#') {
                std::string before = session.recommendation().summary();
                std::string after = session.add(line).summary();
                out << after << (after != before ? "  (was " + before + ")" : "") << "\n";
            }
        } catch (const ParseError& e) {
            err << "error: " << e.what() << "\n";
        } catch (const std::exception& e) {
            err << "refused: " << e.what() << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in)
{
    CLI::App app{"Defeasible deliberation over decision models."};
    app.name("ddec");
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--fallback", o.fallback, "Comma-separated act order of inclination, used when reasons run out");
    app.add_option("--budget", o.budget, "Rule-instantiation steps allowed per construction");
    app.add_option("--max-arity", o.max_arity, "Largest conjunction valued or split by the built-in schemata");
    app.add_flag("--json", o.json, "Print JSON instead of text");

    auto* justify_cmd = app.add_subcommand("justify", "Verdict on a literal");
    auto* recommend_cmd = app.add_subcommand("recommend", "Recommend an act");
    auto* trace_cmd = app.add_subcommand("trace", "Arguments, attacks and labels for a literal");
    auto* dot_cmd = app.add_subcommand("dot", "Argument graph for a literal, in DOT");
    auto* salient_cmd = app.add_subcommand("salient", "Paths to saliently valued states");
    auto* repl_cmd = app.add_subcommand("repl", "Add statements and query interactively");
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP/JSON session interface");
    for (auto* c : {justify_cmd, recommend_cmd, trace_cmd, dot_cmd, salient_cmd, repl_cmd, serve_cmd})
        c->add_option("file", o.file, "Knowledge base file")->required();
    for (auto* c : {justify_cmd, trace_cmd, dot_cmd}) c->add_option("literal", o.literal, "Literal")->required();
    salient_cmd->add_option("threshold", o.threshold, "Salience threshold (utils, > 0)")->required();
    salient_cmd->add_option("depth", o.depth, "Largest number of events on a path")->required();
    serve_cmd->add_option("--port", o.port, "TCP port")->required();
    serve_cmd->add_option("--host", o.host, "Interface to bind");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    std::string source;
    std::string parsing = o.file;  // what a ParseError refers to
    try {
        source = read_file(o.file);
        Document doc = parse(source);
        SessionConfig config = session_config(o, doc.kb);

        if (justify_cmd->parsed() || trace_cmd->parsed() || dot_cmd->parsed()) {
            parsing = "literal '" + o.literal + "'";
            Literal goal = parse_literal(o.literal, doc.kb);
            parsing = o.file;
            DialecticTrace t = justify(doc.kb, goal, config.engine);
            if (dot_cmd->parsed()) out << export_dot(t);
            else if (o.json) out << trace_to_json(t).dump(2) << "\n";
            else if (trace_cmd->parsed()) print_trace(out, t);
            else out << to_string(t.verdict) << " " << goal.to_string() << "\n";
        } else if (recommend_cmd->parsed()) {
            Recommendation rec = recommend(doc.model, doc.kb, config.fallback, config.engine);
            if (o.json) out << recommendation_to_json(rec).dump(2) << "\n";
            else out << rec.summary() << "\n";
        } else if (salient_cmd->parsed()) {
            Rational threshold;
            try {
                threshold = Rational::parse(o.threshold);
            } catch (const std::exception&) {
                throw UsageError("threshold '" + o.threshold + "' is not a number");
            }
            if (!(threshold > Rational(0))) throw UsageError("threshold must be positive");
            if (o.depth < 0) throw UsageError("depth must be non-negative");
            SalientModel s = salient_paths(doc.model, doc.kb, threshold, o.depth);
            if (o.json) out << salient_to_json(s).dump(2) << "\n";
            else print_salient(out, s);
        } else if (repl_cmd->parsed()) {
            Session session(source, config);
            return repl(session, in, out, err);
        } else if (serve_cmd->parsed()) {
            Service service(source, config);
            HttpServer server(service);
            int port = server.bind(o.host, o.port);
            if (port < 0) throw UsageError("cannot bind " + o.host + ":" + std::to_string(o.port));
            out << "serving " << o.file << " on http://" << o.host << ":" << port << std::endl;
            server.run();
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << parsing << ":" << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        err << "refused: " << e.what() << "\n";
        return kExitRefused;
    }
    return kExitOk;
}

}  // namespace ddec
