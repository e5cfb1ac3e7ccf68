#pragma once

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "service/session.hpp"

namespace usp::service {

// HTTP status for a proof error: 400 syntax, 404 unknown names, 409 conflicts, 422 otherwise.
int http_status(ProofErrorKind k);
nlohmann::json error_json(const ProofError& e);
nlohmann::json goal_json(const ProofTree& tree, NodeId id);

// JSON facade over SessionManager. Routes are registered on an existing server.
class HttpApi {
 public:
  explicit HttpApi(SessionManager& sessions) : sessions_(sessions) {}
  void install(httplib::Server& server);

 private:
  SessionManager& sessions_;
};

}  // namespace usp::service
