#include "service/http_api.hpp"

#include "usp/printer.hpp"

namespace usp::service {

using nlohmann::json;

int http_status(ProofErrorKind k) {
  switch (k) {
    case ProofErrorKind::Syntax:
    case ProofErrorKind::UnknownTactic: return 400;
    case ProofErrorKind::NotFound: return 404;
    case ProofErrorKind::NotOpen:
    case ProofErrorKind::Definition: return 409;
    default: return 422;
  }
}

json error_json(const ProofError& e) {
  json j;
  j["kind"] = error_kind_name(e.kind());
  j["message"] = e.what();
  j["node"] = e.node() ? json(*e.node()) : json(nullptr);
  if (e.clash_symbol) {
    auto vars = [](const VarSet& v) {
      if (v.is_all()) return json("all");
      json a = json::array();
      for (const auto& x : v.elements()) a.push_back(x.str());
      return a;
    };
    j["clash"] = {{"symbol", e.clash_symbol->name}, {"taboo", vars(e.clash_taboo)}, {"offending", vars(e.clash_offending)}};
  }
  return {{"error", j}};
}

json goal_json(const ProofTree& tree, NodeId id) {
  const ProofNode& n = tree.node(id);
  json j;
  j["id"] = id;
  // a branch label survives the internal single-child steps below it
  std::string label = n.label;
  for (const ProofNode* k = &n; label.empty() && k->parent && tree.node(*k->parent).children.size() == 1;) {
    k = &tree.node(*k->parent);
    label = k->label;
  }
  j["label"] = label;
  j["sequent"] = n.goal.str();
  j["ante"] = json::array();
  j["succ"] = json::array();
  j["anteIds"] = json::array();
  j["succIds"] = json::array();
  for (std::size_t i = 0; i < n.goal.ante.size(); ++i) {
    j["ante"].push_back(print(n.goal.ante[i]));
    j["anteIds"].push_back(-static_cast<long>(i) - 1);
  }
  for (std::size_t i = 0; i < n.goal.succ.size(); ++i) {
    j["succ"].push_back(print(n.goal.succ[i]));
    j["succIds"].push_back(static_cast<long>(i) + 1);
  }
  return j;
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void fail(httplib::Response& res, int status, const std::string& kind, const std::string& msg) {
  reply(res, status, {{"error", {{"kind", kind}, {"message", msg}, {"node", nullptr}}}});
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw std::invalid_argument("request body is not a JSON object");
  return j;
}

json goals_json(const Prover& p) {
  json a = json::array();
  for (NodeId n : p.tree().open_goals()) a.push_back(goal_json(p.tree(), n));
  return a;
}

json nodes_json(const Prover& p, const std::vector<NodeId>& ids) {
  json a = json::array();
  for (NodeId n : ids) a.push_back(goal_json(p.tree(), n));
  return a;
}

std::string str_field(const json& j, const char* key, bool required = true) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    return "";
  }
  if (!it->is_string()) throw std::invalid_argument(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<NodeId> goal_field(const json& j) {
  auto it = j.find("goal");
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) throw std::invalid_argument("field \"goal\" must be a node id");
  return it->get<NodeId>();
}

const char* kind_name(DefKind k) {
  switch (k) {
    case DefKind::Bool: return "Bool";
    case DefKind::Real: return "Real";
    case DefKind::HP: return "HP";
  }
  return "?";
}

// Runs a handler and turns exceptions into JSON diagnostics.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ProofError& e) {
      reply(res, http_status(e.kind()), error_json(e));
    } catch (const ParseError& e) {
      fail(res, 400, "syntax", e.what());
    } catch (const std::invalid_argument& e) {
      fail(res, 400, "request", e.what());
    } catch (const std::exception& e) {
      fail(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

void HttpApi::install(httplib::Server& server) {
  SessionManager& sm = sessions_;

  auto session = [&sm](const httplib::Request& req) {
    auto s = sm.find(req.matches[1]);
    if (!s) throw ProofError(ProofErrorKind::NotFound, "unknown session " + std::string(req.matches[1]));
    return s;
  };
  auto goal_of = [](const Session& s, const std::string& text) {
    NodeId g = 0;
    try {
      g = std::stoul(text);
    } catch (const std::exception&) {
      throw ProofError(ProofErrorKind::NotFound, "unknown goal " + text);
    }
    bool ok = s.read([&](const Prover& p) { return g < p.tree().size(); });
    if (!ok) throw ProofError(ProofErrorKind::NotFound, "unknown goal " + text);
    return g;
  };

  server.Post("/sessions", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
    json b = body_of(req);
    std::optional<std::string> entry;
    if (b.contains("entry") && !b["entry"].is_null()) entry = str_field(b, "entry");
    auto s = sm.create(str_field(b, "archiveText"), entry);
    json out = s->read([](const Prover& p) { return goals_json(p); });
    reply(res, 201, {{"sessionId", s->id()}, {"entry", s->entry()}, {"openGoals", out}});
  }));

  server.Get("/sessions", guarded([&sm](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"sessions", sm.ids()}});
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([session](const httplib::Request& req, httplib::Response& res) {
    auto s = session(req);
    json h = json::array();
    for (const auto& item : s->history()) h.push_back({{"command", item.command}, {"result", item.result}});
    json goals = s->read([](const Prover& p) { return goals_json(p); });
    reply(res, 200, {{"sessionId", s->id()}, {"entry", s->entry()}, {"openGoals", goals}, {"history", h}});
  }));

  server.Delete(R"(/sessions/([^/]+))", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
    if (!sm.remove(req.matches[1])) throw ProofError(ProofErrorKind::NotFound, "unknown session");
    reply(res, 200, {{"deleted", std::string(req.matches[1])}});
  }));

  server.Get(R"(/sessions/([^/]+)/goals)", guarded([session](const httplib::Request& req, httplib::Response& res) {
    auto s = session(req);
    reply(res, 200, {{"goals", s->read([](const Prover& p) { return goals_json(p); })}});
  }));

  server.Post(R"(/sessions/([^/]+)/goals/([^/]+)/tactic)",
              guarded([session, goal_of](const httplib::Request& req, httplib::Response& res) {
                auto s = session(req);
                NodeId g = goal_of(*s, req.matches[2]);
                json b = body_of(req);
                auto created = s->run_tactic(g, str_field(b, "text"));
                json out = s->read([&](const Prover& p) {
                  return json{{"newGoals", nodes_json(p, created)}, {"openGoals", goals_json(p)}};
                });
                reply(res, 200, out);
              }));

  server.Post(R"(/sessions/([^/]+)/goals/([^/]+)/useLemma)",
              guarded([session, goal_of](const httplib::Request& req, httplib::Response& res) {
                auto s = session(req);
                NodeId g = goal_of(*s, req.matches[2]);
                json b = body_of(req);
                auto created = s->use_lemma(g, str_field(b, "name"), str_field(b, "adaptation", false));
                json out = s->read([&](const Prover& p) {
                  return json{{"newGoals", nodes_json(p, created)}, {"openGoals", goals_json(p)}};
                });
                reply(res, 200, out);
              }));

  server.Get(R"(/sessions/([^/]+)/definitions)", guarded([session](const httplib::Request& req, httplib::Response& res) {
    auto s = session(req);
    json defs = s->read([](const Prover& p) {
      json a = json::array();
      for (const auto& d : p.registry().definitions()) {
        json x;
        x["name"] = d.name;
        x["kind"] = kind_name(d.kind);
        x["params"] = json::array();
        for (const auto& v : d.params) x["params"].push_back(v.str());
        x["body"] = d.body ? json(print(*d.body)) : json(nullptr);
        x["expandable"] = d.body.has_value();
        a.push_back(std::move(x));
      }
      return a;
    });
    reply(res, 200, {{"definitions", defs}});
  }));

  auto expand_all = guarded([session](const httplib::Request& req, httplib::Response& res) {
    auto s = session(req);
    s->expand_all(goal_field(body_of(req)));
    reply(res, 200, {{"openGoals", s->read([](const Prover& p) { return goals_json(p); })}});
  });
  server.Post(R"(/sessions/([^/]+)/definitions/expandAll)", expand_all);
  server.Post(R"(/sessions/([^/]+)/expandAll)", expand_all);

  server.Post(R"(/sessions/([^/]+)/definitions/([^/]+)/expand)",
              guarded([session](const httplib::Request& req, httplib::Response& res) {
                auto s = session(req);
                s->expand(req.matches[2], goal_field(body_of(req)));
                reply(res, 200, {{"openGoals", s->read([](const Prover& p) { return goals_json(p); })}});
              }));

  server.Post(R"(/sessions/([^/]+)/definitions/([^/]+))",
              guarded([session](const httplib::Request& req, httplib::Response& res) {
                auto s = session(req);
                s->define(req.matches[2], str_field(body_of(req), "body"));
                reply(res, 200, {{"openGoals", s->read([](const Prover& p) { return goals_json(p); })}});
              }));

  server.Get(R"(/sessions/([^/]+)/tactic)", guarded([session](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, {{"tactic", session(req)->tactic()}});
  }));

  server.Post(R"(/sessions/([^/]+)/finalize)", guarded([session](const httplib::Request& req, httplib::Response& res) {
    auto s = session(req);
    FinalizeResult fr = s->finalize();
    json subst = json::array();
    for (const auto& p : fr.substitution.pairs()) subst.push_back({{"what", p.what.name}, {"repl", print(p.repl)}, {"pair", p.str()}});
    json open = json::array();
    for (const auto& g : fr.provable.subgoals()) open.push_back(g.str());
    json unresolved = json::array();
    for (const auto& sym : fr.unresolved) unresolved.push_back(sym.name);
    reply(res, 200,
          {{"closed", fr.provable.closed()},
           {"conclusion", fr.provable.conclusion().str()},
           {"subgoals", open},
           {"totalSubst", subst},
           {"unresolved", unresolved}});
  }));

  server.Get("/lemmas", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
    std::string q = req.has_param("query") ? req.get_param_value("query") : "";
    json a = json::array();
    for (const auto& n : sm.lemmas()->search(q)) {
      json x{{"name", n}};
      try {
        if (auto r = sm.lemmas()->get(n)) x["conclusion"] = r->provable.conclusion().str();
      } catch (const ProofError& e) {
        x["error"] = e.what();
      }
      a.push_back(std::move(x));
    }
    reply(res, 200, {{"lemmas", a}});
  }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) fail(res, res.status, "http", "no such endpoint");
  });
}

}  // namespace usp::service
