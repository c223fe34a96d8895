// Eigen must be seen before httplib, whose resolver headers define a `_res` macro.
#include "smas/api/service.hpp"
#include "smas/error.hpp"

#include <httplib.h>

namespace smas::api {

void ApiService::serve(const std::string& host, int port) const {
  httplib::Server server;
  const auto adapt = [this](const httplib::Request& in, httplib::Response& out) {
    ApiRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query[k] = v;
    for (const auto& [k, v] : in.headers) req.headers[k] = v;
    req.body = in.body;
    const auto res = handle(req);
    out.status = res.status;
    out.set_content(res.body, "application/json");
  };
  server.Get(R"(/.*)", adapt);
  server.Post(R"(/.*)", adapt);
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace smas::api
