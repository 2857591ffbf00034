#pragma once

// Incremental deliberation sessions and the HTTP/JSON service over them.

#include "ddec/dsl.hpp"
#include "ddec/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace ddec {

struct SessionConfig {
    Fallback fallback;
    EngineConfig engine;
};

struct HistoryEntry {
    std::string statement;
    Recommendation recommendation;
};

// One write against a session, in the order it happened.
struct SessionOp {
    enum class Kind { Add, Undo } kind;
    std::string statement;  // Add only
};

// A document grown one statement at a time. Every write recomputes the
// recommendation; the revision counts writes and never decreases.
class Session {
public:
    explicit Session(std::string source, SessionConfig config = {});

    // Adds exactly one statement. Parse errors are positioned relative to
    // `statement`; the session is unchanged on error.
    const Recommendation& add(std::string_view statement);
    // Pops the last added statement, if any.
    std::optional<HistoryEntry> undo();

    Literal literal(std::string_view text) const { return parse_literal(text, doc_.kb); }
    DialecticTrace query(const Literal& goal) const;

    const Document& document() const { return doc_; }
    const Recommendation& recommendation() const { return rec_; }
    const Recommendation& initial_recommendation() const { return initial_rec_; }
    const std::vector<HistoryEntry>& history() const { return history_; }
    const std::vector<SessionOp>& log() const { return log_; }
    std::uint64_t revision() const { return revision_; }
    const SessionConfig& config() const { return config_; }
    const std::string& initial_source() const { return initial_; }
    // Initial text followed by the statements currently in the history.
    std::string source() const;

    static Session replay(std::string initial, const std::vector<SessionOp>& log, SessionConfig config = {});

private:
    std::string initial_;
    SessionConfig config_;
    Document doc_;
    Recommendation initial_rec_;
    Recommendation rec_;
    std::vector<HistoryEntry> history_;
    std::vector<SessionOp> log_;
    std::uint64_t revision_ = 0;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::uint64_t revision = 0;

    nlohmann::json json() const { return nlohmann::json::parse(body); }
};

// Transport-independent request handling: the HTTP server and the tests go
// through handle(). Writes are serialized; reads share a lock.
class Service {
public:
    explicit Service(std::string source, SessionConfig config = {});

    HttpResponse handle(const std::string& method, const std::string& path,
                        const std::map<std::string, std::string>& params = {}, const std::string& body = "");

    std::uint64_t revision() const;

private:
    HttpResponse session_view() const;
    HttpResponse add_statement(const std::string& body);
    HttpResponse run_query(const std::string& body) const;
    HttpResponse graph(const std::map<std::string, std::string>& params) const;
    HttpResponse undo(const std::string& body);
    HttpResponse reply(int status, const nlohmann::json& body) const;

    mutable std::shared_mutex mutex_;
    Session session_;
};

// HTTP transport for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds host:port (port 0 picks a free one). Returns the port, or -1.
    int bind(const std::string& host, int port);
    // Serves until stop() is called.
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ddec
