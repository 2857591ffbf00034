#include "ddec/service.hpp"

#include <httplib.h>

namespace ddec {

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;

    explicit Impl(Service& s) : service(s) {}

    void forward(const std::string& method, const httplib::Request& req, httplib::Response& res)
    {
        std::map<std::string, std::string> params;
        for (const auto& [k, v] : req.params) params.emplace(k, v);
        HttpResponse r = service.handle(method, req.path, params, req.body);
        res.status = r.status;
        res.set_header("X-Revision", std::to_string(r.revision));
        res.set_content(r.body, r.content_type);
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service))
{
    Impl* impl = impl_.get();
    for (const char* path : {"/health", "/session", "/graph.dot"})
        impl->server.Get(path, [impl](const httplib::Request& req, httplib::Response& res) {
            impl->forward("GET", req, res);
        });
    for (const char* path : {"/statements", "/query", "/undo"})
        impl->server.Post(path, [impl](const httplib::Request& req, httplib::Response& res) {
            impl->forward("POST", req, res);
        });
    impl->server.set_error_handler([impl](const httplib::Request& req, httplib::Response& res) {
        if (res.status == 404) impl->forward(req.method, req, res);
    });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run()
{
    return impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    impl_->server.stop();
}

}  // namespace ddec
