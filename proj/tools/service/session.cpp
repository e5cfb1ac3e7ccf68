#include "service/session.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "usp/archive.hpp"

namespace usp::service {

namespace fs = std::filesystem;
using nlohmann::json;

Session::Session(std::string id, std::string archive_text, std::string entry, Prover prover)
    : id_(std::move(id)), archive_text_(std::move(archive_text)), entry_(std::move(entry)), prover_(std::move(prover)) {}

template <typename F>
auto Session::mutate(const std::string& command, F&& f) {
  std::lock_guard lock(mutex_);
  Prover backup = prover_;
  auto defines = defines_;
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      history_.push_back({command, "ok"});
      if (on_change_) on_change_(*this);
    } else {
      auto out = f();
      history_.push_back({command, "ok"});
      if (on_change_) on_change_(*this);
      return out;
    }
  } catch (const ProofError& e) {
    prover_ = std::move(backup);
    defines_ = std::move(defines);
    history_.push_back({command, std::string(error_kind_name(e.kind())) + ": " + e.what()});
    throw;
  } catch (...) {
    prover_ = std::move(backup);
    defines_ = std::move(defines);
    history_.push_back({command, "failed"});
    throw;
  }
}

void Session::require_open(NodeId goal) const {
  if (!prover_.tree().contains(goal)) throw ProofError(ProofErrorKind::NotFound, "unknown goal " + std::to_string(goal));
  if (!prover_.tree().node(goal).open())
    throw ProofError(ProofErrorKind::NotOpen, "goal " + std::to_string(goal) + " is already closed", goal);
}

std::vector<NodeId> Session::run_tactic(NodeId goal, const std::string& text) {
  return mutate("tactic " + std::to_string(goal) + ": " + text, [&] {
    require_open(goal);
    return prover_.run(goal, text);
  });
}

std::vector<NodeId> Session::use_lemma(NodeId goal, const std::string& name, const std::string& adaptation) {
  return mutate("useLemma " + std::to_string(goal) + ": " + name, [&] {
    require_open(goal);
    TacticPtr adapt;
    if (!adaptation.empty()) {
      try {
        adapt = parse_tactic(adaptation);
      } catch (const ParseError& e) {
        throw ProofError(ProofErrorKind::Syntax, std::string("adaptation: ") + e.what());
      }
    }
    return prover_.use_lemma(goal, name, adapt);
  });
}

void Session::expand(const std::string& name, std::optional<NodeId> goal) {
  mutate("expand " + name, [&] {
    if (!prover_.registry().find(name)) throw ProofError(ProofErrorKind::NotFound, "no definition named " + name);
    if (goal)
      prover_.expand(*goal, name, Prover::ExpandScope::Goal);
    else
      prover_.expand(prover_.tree().root(), name, Prover::ExpandScope::Everywhere);
  });
}

void Session::expand_all(std::optional<NodeId> goal) {
  mutate("expandAll", [&] {
    if (goal) {
      prover_.expand_all(*goal);
      return;
    }
    auto open = prover_.tree().open_goals();
    if (open.empty()) throw ProofError(ProofErrorKind::NotOpen, "no open goals");
    for (NodeId n : open) prover_.expand_all(n);
  });
}

void Session::define(const std::string& name, const std::string& body) {
  mutate("define " + name + " := " + body, [&] {
    prover_.define(name, std::string_view(body));
    defines_.emplace_back(name, body);
  });
}

FinalizeResult Session::finalize() const {
  std::lock_guard lock(mutex_);
  return prover_.finalize();
}

std::string Session::tactic() const {
  std::lock_guard lock(mutex_);
  return prover_.extract_tactic();
}

std::vector<HistoryItem> Session::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

std::vector<std::pair<std::string, std::string>> Session::defines() const {
  std::lock_guard lock(mutex_);
  return defines_;
}

SessionManager::SessionManager(std::shared_ptr<LemmaStore> lemmas, std::shared_ptr<ArithOracle> oracle,
                               std::optional<fs::path> persist_dir)
    : lemmas_(std::move(lemmas)), oracle_(std::move(oracle)), dir_(std::move(persist_dir)) {
  if (!oracle_) oracle_ = std::make_shared<ArithOracle>();
  if (!lemmas_) lemmas_ = std::make_shared<LemmaStore>(std::nullopt, oracle_);
}

std::shared_ptr<Session> SessionManager::make(std::string id, const std::string& archive_text,
                                              const std::optional<std::string>& entry) {
  Archive a = parse_archive(archive_text);
  const ArchiveEntry* e = nullptr;
  if (entry && !entry->empty()) {
    e = a.find(*entry);
    if (!e) throw ProofError(ProofErrorKind::NotFound, "no entry named \"" + *entry + "\"");
  } else {
    if (a.entries.empty()) throw ProofError(ProofErrorKind::NotFound, "archive has no entries");
    if (a.entries.size() > 1) throw ProofError(ProofErrorKind::NotFound, "archive has several entries; name one");
    e = &a.entries.front();
  }
  auto s = std::make_shared<Session>(std::move(id), archive_text, e->name, Prover::for_entry(*e, lemmas_, oracle_));
  if (dir_) s->on_change_ = [this](const Session& x) { save(x); };
  return s;
}

std::shared_ptr<Session> SessionManager::create(const std::string& archive_text,
                                                const std::optional<std::string>& entry) {
  std::string id;
  {
    std::unique_lock lock(mutex_);
    id = "s" + std::to_string(next_++);
  }
  auto s = make(id, archive_text, entry);
  std::unique_lock lock(mutex_);
  sessions_[id] = s;
  if (dir_) save(*s);
  return s;
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

bool SessionManager::remove(const std::string& id) {
  std::unique_lock lock(mutex_);
  bool found = sessions_.erase(id) > 0;
  if (found && dir_) {
    std::error_code ec;
    fs::remove(*dir_ / (id + ".json"), ec);
  }
  return found;
}

std::vector<std::string> SessionManager::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

// Called with the session lock held (from mutate) or on a fresh session.
void SessionManager::save(const Session& s) const {
  if (!dir_) return;
  json j;
  j["id"] = s.id_;
  j["archiveText"] = s.archive_text_;
  j["entry"] = s.entry_;
  j["defines"] = json::array();
  for (const auto& [n, b] : s.defines_) j["defines"].push_back({{"name", n}, {"body", b}});
  j["tactic"] = s.prover_.extract_tactic();
  fs::create_directories(*dir_);
  fs::path p = *dir_ / (s.id_ + ".json");
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump(2);
  }
  fs::rename(tmp, p);
}

std::size_t SessionManager::load_all() {
  if (!dir_ || !fs::exists(*dir_)) return 0;
  std::size_t n = 0;
  for (const auto& f : fs::directory_iterator(*dir_)) {
    if (f.path().extension() != ".json") continue;
    std::ifstream in(f.path());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("id")) continue;
    std::string id = j["id"];
    auto s = make(id, j.value("archiveText", ""), j.value("entry", std::string()));
    for (const auto& d : j["defines"]) {
      std::string name = d["name"], body = d["body"];
      s->prover_.define(name, std::string_view(body), Prover::DefineEffect::RegistryOnly);
      s->defines_.emplace_back(name, body);
    }
    std::string tac = j.value("tactic", "nil");
    if (tac != "nil") s->prover_.run(s->prover_.tree().root(), tac);
    s->history_.push_back({"restore", "ok"});
    std::unique_lock lock(mutex_);
    sessions_[id] = s;
    if (id.size() > 1 && id[0] == 's') {
      try {
        next_ = std::max(next_, std::stoul(id.substr(1)) + 1);
      } catch (const std::exception&) {
      }
    }
    ++n;
  }
  return n;
}

}  // namespace usp::service
