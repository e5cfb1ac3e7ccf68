#include <csignal>
#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "service/check.hpp"
#include "service/http_api.hpp"
#include "service/session.hpp"

using namespace usp;

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::shared_ptr<ArithOracle> make_oracle(const std::string& smt) {
  ArithConfig c;
  c.smt_command = smt;
  return std::make_shared<ArithOracle>(c);
}

std::shared_ptr<LemmaStore> make_store(const std::string& dir, std::shared_ptr<ArithOracle> oracle) {
  std::optional<std::filesystem::path> d;
  if (!dir.empty()) d = dir;
  return std::make_shared<LemmaStore>(d, std::move(oracle));
}

void print_tree(const std::vector<std::string>& names, std::ostream& out) {
  std::vector<std::string> shown;  // folder path printed last
  for (const auto& n : names) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t k; (k = n.find('/', start)) != std::string::npos; start = k + 1) parts.push_back(n.substr(start, k - start));
    std::size_t common = 0;
    while (common < parts.size() && common < shown.size() && parts[common] == shown[common]) ++common;
    for (std::size_t d = common; d < parts.size(); ++d) out << std::string(2 * d, ' ') << parts[d] << "/\n";
    out << std::string(2 * parts.size(), ' ') << n.substr(start) << "\n";
    shown = parts;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"usp: proof checker and proof session service"};
  app.require_subcommand(1);
  std::string smt;
  std::string lemma_dir;
  app.add_option("--smt-solver", smt, "external SMT-LIB solver command")->envname("USP_SMT");
  app.add_option("--lemma-dir", lemma_dir, "lemma store directory")->envname("USP_LEMMA_DIR");

  auto* check = app.add_subcommand("check", "replay the tactics of an archive");
  std::string path;
  bool json = false;
  std::string entry;
  check->add_option("file", path, "archive file")->required();
  check->add_flag("--json", json, "machine-readable report");
  check->add_option("--entry", entry, "check only this entry");

  auto* lemmas = app.add_subcommand("lemmas", "lemma store maintenance");
  lemmas->require_subcommand(1);
  auto* list = lemmas->add_subcommand("list", "list stored lemmas");
  std::string query;
  list->add_option("query", query, "substring filter");
  auto* show = lemmas->add_subcommand("show", "print a stored lemma");
  std::string name;
  show->add_option("name", name)->required();
  auto* rm = lemmas->add_subcommand("rm", "delete a stored lemma");
  rm->add_option("name", name)->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP proof session service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string persist;
  serve->add_option("--host", host);
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--persist", persist, "snapshot sessions to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto oracle = make_oracle(smt);
  auto store = make_store(lemma_dir, oracle);

  try {
    if (*check) {
      service::CheckOptions o;
      if (!entry.empty()) o.entry = entry;
      o.lemmas = store;
      o.oracle = oracle;
      return service::cmd_check(path, o, json, std::cout, std::cerr);
    }
    if (*list) {
      print_tree(store->search(query), std::cout);
      return 0;
    }
    if (*show) {
      auto r = store->get(name);
      if (!r) {
        std::cerr << "no lemma named \"" << name << "\"\n";
        return 1;
      }
      std::cout << r->text() << "\nconclusion: " << r->provable.conclusion().str() << "\n";
      return 0;
    }
    if (*rm) {
      if (!store->remove(name)) {
        std::cerr << "no lemma named \"" << name << "\"\n";
        return 1;
      }
      return 0;
    }
    if (*serve) {
      std::optional<std::filesystem::path> pdir;
      if (!persist.empty()) pdir = persist;
      service::SessionManager sessions(store, oracle, pdir);
      std::size_t restored = sessions.load_all();
      httplib::Server server;
      server.set_read_timeout(30, 0);
      server.set_write_timeout(30, 0);
      service::HttpApi api(sessions);
      api.install(server);
      if (!server.bind_to_port(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << host << ":" << port;
      if (restored) std::cout << " (" << restored << " sessions restored)";
      std::cout << std::endl;
      server.listen_after_bind();
      g_server = nullptr;
      return 0;
    }
  } catch (const ProofError& e) {
    std::cerr << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
