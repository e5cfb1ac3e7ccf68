#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "service/check.hpp"
#include "service/http_api.hpp"
#include "service/session.hpp"

using namespace usp;
using namespace usp::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(USP_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("usp-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

const char* kHalving =
    "Theorem \"Halving\" Definitions Bool J(Real x); End. ProgramVariables Real x; End. "
    "Problem x=2 -> [{x:=1+(x-1)/2;}*]x>=-1 End. End.";

struct Check {
  int code;
  std::string out, err;
};

Check run_check(const std::string& path, std::optional<std::string> entry = std::nullopt, bool as_json = true) {
  CheckOptions o;
  o.entry = std::move(entry);
  std::ostringstream out, err;
  int code = cmd_check(path, o, as_json, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(CheckCommand, ListingClosesWithJsonReport) {
  auto t0 = std::chrono::steady_clock::now();
  Check c = run_check(std::string(USP_TEST_DATA) + "/decay_lemmas.kyx");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(c.code, 0) << c.out << c.err;
  EXPECT_LT(secs, 10.0);
  json j = json::parse(c.out);
  EXPECT_TRUE(j["closed"]);
  ASSERT_EQ(j["entries"].size(), 4u);
  std::vector<std::string> names;
  for (const auto& e : j["entries"]) {
    names.push_back(e["name"]);
    EXPECT_TRUE(e["closed"]);
    EXPECT_EQ(e["openCount"], 0);
    EXPECT_TRUE(e["error"].is_null());
  }
  EXPECT_EQ(names, (std::vector<std::string>{"FIDE21/Exponential decay", "FIDE21/Unsatisfied control guard",
                                             "FIDE21/Induction step", "FIDE21/Combine lemmas"}));
  EXPECT_EQ(j["entries"][3]["kind"], "theorem");
  EXPECT_EQ(j["entries"][0]["kind"], "lemma");
}

TEST(CheckCommand, SingleEntryRunsItsLemmas) {
  Check c = run_check(std::string(USP_TEST_DATA) + "/decay_lemmas.kyx", "FIDE21/Combine lemmas");
  EXPECT_EQ(c.code, 0) << c.out << c.err;
  json j = json::parse(c.out);
  ASSERT_EQ(j["entries"].size(), 1u);
  EXPECT_EQ(j["entries"][0]["name"], "FIDE21/Combine lemmas");
}

TEST(CheckCommand, ExitCodes) {
  fs::path d = scratch("check");
  fs::path open = write(d, "open.kyx", "Theorem \"t\" Problem x>=0 -> x>=0 & x>=1 End. Tactic \"a\" implyR(1); andR(1); <(id, skip) End. End.");
  Check c = run_check(open.string());
  EXPECT_EQ(c.code, 1);
  json j = json::parse(c.out);
  EXPECT_FALSE(j["closed"]);
  EXPECT_EQ(j["entries"][0]["openGoals"], json::array({"x>=0 ==> x>=1"}));
  fs::path failing = write(d, "fail.kyx", "Theorem \"t\" Problem x>=0 End. Tactic \"a\" QE End. End.");
  c = run_check(failing.string());
  EXPECT_EQ(c.code, 1);
  EXPECT_NE(json::parse(c.out)["entries"][0]["error"].get<std::string>().find("arithmetic"), std::string::npos);
  fs::path bad = write(d, "bad.kyx", "Theorem \"t\" Problem x>= End. End.");
  c = run_check(bad.string());
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.err.find("bad.kyx:1:"), std::string::npos) << c.err;
  EXPECT_EQ(run_check((d / "missing.kyx").string()).code, 2);
  EXPECT_EQ(run_check(open.string(), "nope").code, 2);
  c = run_check(open.string(), std::nullopt, false);
  EXPECT_NE(c.out.find("0/1 entries closed"), std::string::npos) << c.out;
  fs::remove_all(d);
}

class HttpService : public ::testing::Test {
 protected:
  void start(std::optional<fs::path> persist = std::nullopt) {
    sessions_ = std::make_unique<SessionManager>(lemmas_, nullptr, persist);
    if (persist) restored_ = sessions_->load_all();
    server_ = std::make_unique<httplib::Server>();
    api_ = std::make_unique<HttpApi>(*sessions_);
    api_->install(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void stop() {
    if (!server_) return;
    server_->stop();
    thread_.join();
    client_.reset();
    server_.reset();
    api_.reset();
    sessions_.reset();
  }
  void TearDown() override { stop(); }

  std::pair<int, json> post(const std::string& path, const json& body = json::object()) {
    auto r = client_->Post(path, body.dump(), "application/json");
    if (!r) return {-1, json()};
    return {r->status, json::parse(r->body, nullptr, false)};
  }
  std::pair<int, json> get(const std::string& path) {
    auto r = client_->Get(path);
    if (!r) return {-1, json()};
    return {r->status, json::parse(r->body, nullptr, false)};
  }
  std::string open_session(const std::string& text, const std::optional<std::string>& entry = std::nullopt) {
    json b{{"archiveText", text}};
    if (entry) b["entry"] = *entry;
    auto [code, j] = post("/sessions", b);
    EXPECT_EQ(code, 201) << j.dump();
    return j.value("sessionId", "");
  }
  std::vector<long> open_ids(const std::string& sid) {
    std::vector<long> out;
    json goals = get("/sessions/" + sid + "/goals").second["goals"];
    for (const auto& g : goals) out.push_back(g["id"]);
    return out;
  }

  std::shared_ptr<LemmaStore> lemmas_ = std::make_shared<LemmaStore>();
  std::unique_ptr<SessionManager> sessions_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<HttpApi> api_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
  std::size_t restored_ = 0;
};

TEST_F(HttpService, HalvingEndToEnd) {
  start();
  std::string sid = open_session(kHalving);
  auto [c0, g0] = get("/sessions/" + sid + "/goals");
  ASSERT_EQ(c0, 200);
  ASSERT_EQ(g0["goals"].size(), 1u);
  EXPECT_EQ(g0["goals"][0]["sequent"], "==> x=2->[{x:=1+(x-1)/2;}*]x>=-1");
  EXPECT_EQ(g0["goals"][0]["succIds"], json::array({1}));

  auto [c1, r1] = post("/sessions/" + sid + "/goals/0/tactic", {{"text", "implyR(1); loop(\"J(x)\", 1)"}});
  ASSERT_EQ(c1, 200) << r1.dump();
  ASSERT_EQ(r1["openGoals"].size(), 3u);
  std::vector<std::string> labels;
  for (const auto& g : r1["openGoals"]) labels.push_back(g["label"]);
  EXPECT_EQ(labels, (std::vector<std::string>{"Init", "Step", "Post"}));
  EXPECT_EQ(r1["openGoals"][1]["ante"], json::array({"J(x)"}));

  long step = r1["openGoals"][1]["id"];
  auto [c2, r2] = post("/sessions/" + sid + "/goals/" + std::to_string(step) + "/tactic", {{"text", "assignb(1)"}});
  ASSERT_EQ(c2, 200) << r2.dump();
  EXPECT_EQ(r2["newGoals"][0]["sequent"], "J(x) ==> J(1+(x-1)/2)");

  auto [cd, defs] = get("/sessions/" + sid + "/definitions");
  ASSERT_EQ(cd, 200);
  ASSERT_EQ(defs["definitions"].size(), 1u);
  EXPECT_EQ(defs["definitions"][0]["name"], "J");
  EXPECT_FALSE(defs["definitions"][0]["expandable"]);

  auto [cf0, fin0] = post("/sessions/" + sid + "/finalize");
  ASSERT_EQ(cf0, 200);
  EXPECT_FALSE(fin0["closed"]);
  EXPECT_EQ(fin0["unresolved"], json::array({"J"}));

  auto [c3, r3] = post("/sessions/" + sid + "/definitions/J", {{"body", ".>=1"}});
  ASSERT_EQ(c3, 200) << r3.dump();
  EXPECT_EQ(r3["openGoals"][1]["sequent"], "x>=1 ==> 1+(x-1)/2>=1");
  auto [c4, r4] = post("/sessions/" + sid + "/definitions/J", {{"body", ".>=0"}});
  EXPECT_EQ(c4, 409);
  EXPECT_EQ(r4["error"]["kind"], "definition");

  for (long g : open_ids(sid)) {
    auto [c, r] = post("/sessions/" + sid + "/goals/" + std::to_string(g) + "/tactic", {{"text", "QE"}});
    EXPECT_EQ(c, 200) << r.dump();
  }
  EXPECT_TRUE(open_ids(sid).empty());
  auto [cf, fin] = post("/sessions/" + sid + "/finalize");
  ASSERT_EQ(cf, 200);
  EXPECT_TRUE(fin["closed"]);
  EXPECT_EQ(fin["conclusion"], "==> x=2->[{x:=1+(x-1)/2;}*]x>=-1");
  EXPECT_EQ(fin["totalSubst"][0]["what"], "J");
  EXPECT_TRUE(fin["unresolved"].empty());

  auto [ct, tac] = get("/sessions/" + sid + "/tactic");
  ASSERT_EQ(ct, 200);
  EXPECT_NE(tac["tactic"].get<std::string>().find("loop(\"J(x)\", 1)"), std::string::npos);
  auto [ch, hist] = get("/sessions/" + sid);
  EXPECT_EQ(ch, 200);
  EXPECT_GE(hist["history"].size(), 5u);
  // already closed goal
  auto [cc, rc] = post("/sessions/" + sid + "/goals/0/tactic", {{"text", "skip"}});
  EXPECT_EQ(cc, 409);
  EXPECT_EQ(rc["error"]["kind"], "not-open");
}

TEST_F(HttpService, NotFoundAndBadRequests) {
  start();
  EXPECT_EQ(get("/sessions/zzz/goals").first, 404);
  EXPECT_EQ(post("/sessions/zzz/goals/0/tactic", {{"text", "QE"}}).first, 404);
  EXPECT_EQ(get("/nowhere").first, 404);
  std::string sid = open_session(kHalving);
  auto [cg, rg] = post("/sessions/" + sid + "/goals/99/tactic", {{"text", "QE"}});
  EXPECT_EQ(cg, 404);
  EXPECT_EQ(rg["error"]["kind"], "not-found");
  EXPECT_EQ(post("/sessions/" + sid + "/definitions/nosuch/expand").first, 404);
  EXPECT_EQ(post("/sessions", {{"archiveText", kHalving}, {"entry", "other"}}).first, 404);
  auto [cs, rs] = post("/sessions", {{"archiveText", "Problem x>= End."}});
  EXPECT_EQ(cs, 400);
  EXPECT_EQ(rs["error"]["kind"], "syntax");
  EXPECT_EQ(post("/sessions/" + sid + "/goals/0/tactic", {{"text", "implyR("}}).first, 400);
  EXPECT_EQ(post("/sessions/" + sid + "/goals/0/tactic", {{"text", "frobnicate"}}).first, 400);
  EXPECT_EQ(post("/sessions/" + sid + "/goals/0/tactic", json::object()).first, 400);
  auto raw = client_->Post("/sessions/" + sid + "/goals/0/tactic", "{not json", "application/json");
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->status, 400);
  auto [cl, rl] = post("/sessions/" + sid + "/goals/0/tactic", {{"text", "andR(1)"}});
  EXPECT_EQ(cl, 422);
  EXPECT_EQ(rl["error"]["kind"], "locator");
  // failures change nothing
  EXPECT_EQ(open_ids(sid), std::vector<long>{0});
  auto del = client_->Delete("/sessions/" + sid);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 200);
  EXPECT_EQ(get("/sessions/" + sid).first, 404);
}

TEST_F(HttpService, ClashIsReportedWithDetails) {
  start();
  std::string sid = open_session(
      "Definitions Bool P(); End. ProgramVariables Real x; End. Problem \\forall x P() End.");
  auto [c, r] = post("/sessions/" + sid + "/goals/0/tactic", {{"text", "US({`P()~>x>0 :: nil`})"}});
  ASSERT_EQ(c, 422) << r.dump();
  EXPECT_EQ(r["error"]["kind"], "clash");
  EXPECT_EQ(r["error"]["clash"]["symbol"], "P");
  EXPECT_EQ(r["error"]["clash"]["offending"], json::array({"x"}));
  EXPECT_NE(r["error"]["clash"]["taboo"], json::array());
}

TEST_F(HttpService, LemmaSearchAndApply) {
  CheckOptions o;
  o.lemmas = lemmas_;
  check_archive(parse_archive(slurp("decay_lemmas.kyx")), o);
  start();
  auto [c, r] = get("/lemmas?query=FIDE21");
  ASSERT_EQ(c, 200);
  EXPECT_EQ(r["lemmas"].size(), 4u);
  EXPECT_EQ(get("/lemmas").second["lemmas"].size(), 4u);
  EXPECT_TRUE(get("/lemmas?query=zzz").second["lemmas"].empty());

  std::string sid = open_session(
      "Definitions HP ode ::= { {x'=-x} }; End. ProgramVariables Real x; End. Problem x>=0 -> [ode;]x>=0 End.");
  auto [cu, ru] = post("/sessions/" + sid + "/goals/0/useLemma",
                       {{"name", "FIDE21/Exponential decay"}, {"adaptation", "expandAllDefs; id"}});
  ASSERT_EQ(cu, 200) << ru.dump();
  EXPECT_TRUE(ru["openGoals"].empty()) << ru.dump();
  EXPECT_TRUE(post("/sessions/" + sid + "/finalize").second["closed"]);
  std::string other = open_session(kHalving);
  EXPECT_EQ(post("/sessions/" + other + "/goals/0/useLemma", {{"name", "missing"}}).first, 404);
}

TEST_F(HttpService, ExpandThroughApi) {
  start();
  std::string sid = open_session(slurp("doubling.kyx"));
  auto [c, r] = post("/sessions/" + sid + "/goals/0/tactic", {{"text", "implyR(1); loop(\"S(x)\", 1)"}});
  ASSERT_EQ(c, 200) << r.dump();
  long step = r["openGoals"][1]["id"];
  auto [ce, re] = post("/sessions/" + sid + "/definitions/ctrl/expand", {{"goal", step}});
  ASSERT_EQ(ce, 200) << re.dump();
  EXPECT_NE(re["openGoals"][1]["sequent"].get<std::string>().find("?S(x);x:=2*x;"), std::string::npos);
  EXPECT_NE(re["openGoals"][0]["sequent"].get<std::string>().find("A(x)"), std::string::npos);
  auto [ca, ra] = post("/sessions/" + sid + "/expandAll");
  ASSERT_EQ(ca, 200);
  EXPECT_EQ(ra["openGoals"][0]["sequent"], "x=2 ==> x>=0");
  std::string tac = get("/sessions/" + sid + "/tactic").second["tactic"];
  EXPECT_NE(tac.find("expand \"ctrl\""), std::string::npos) << tac;
}

TEST_F(HttpService, SnapshotRestore) {
  fs::path dir = scratch("persist");
  start(dir);
  std::string sid = open_session(kHalving);
  post("/sessions/" + sid + "/goals/0/tactic", {{"text", "implyR(1); loop(\"J(x)\", 1)"}});
  long step = open_ids(sid)[1];
  post("/sessions/" + sid + "/goals/" + std::to_string(step) + "/tactic", {{"text", "assignb(1)"}});
  post("/sessions/" + sid + "/definitions/J", {{"body", ".>=1"}});
  json before = get("/sessions/" + sid + "/goals").second;
  std::string tactic = get("/sessions/" + sid + "/tactic").second["tactic"];
  stop();

  start(dir);
  EXPECT_EQ(restored_, 1u);
  json after = get("/sessions/" + sid + "/goals").second;
  auto strip = [](json g) {
    for (auto& x : g["goals"]) x.erase("id");
    return g;
  };
  EXPECT_EQ(strip(after), strip(before));
  EXPECT_EQ(get("/sessions/" + sid + "/tactic").second["tactic"], tactic);
  for (long g : open_ids(sid)) post("/sessions/" + sid + "/goals/" + std::to_string(g) + "/tactic", {{"text", "QE"}});
  EXPECT_TRUE(post("/sessions/" + sid + "/finalize").second["closed"]);
  // fresh ids do not collide with restored ones
  EXPECT_NE(open_session(kHalving), sid);
  stop();
  fs::remove_all(dir);
}

TEST_F(HttpService, ConcurrentSessions) {
  start();
  std::vector<std::thread> workers;
  std::atomic<int> closed{0};
  for (int i = 0; i < 4; ++i) {
    workers.emplace_back([&] {
      httplib::Client cli("127.0.0.1", port_);
      auto r = cli.Post("/sessions", json{{"archiveText", "Problem x>=0 -> x>=0 End."}}.dump(), "application/json");
      if (!r || r->status != 201) return;
      std::string sid = json::parse(r->body)["sessionId"];
      cli.Post("/sessions/" + sid + "/goals/0/tactic", json{{"text", "implyR(1); id"}}.dump(), "application/json");
      auto f = cli.Post("/sessions/" + sid + "/finalize", "", "application/json");
      if (f && json::parse(f->body)["closed"]) ++closed;
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(closed.load(), 4);
  EXPECT_EQ(get("/sessions").second["sessions"].size(), 4u);
}
