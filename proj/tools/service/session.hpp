#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "usp/lemma_store.hpp"
#include "usp/prover.hpp"

namespace usp::service {

struct HistoryItem {
  std::string command;
  std::string result;
};

// One proof attempt. Every operation locks the session and is all-or-nothing.
class Session {
 public:
  Session(std::string id, std::string archive_text, std::string entry, Prover prover);

  const std::string& id() const { return id_; }
  const std::string& archive_text() const { return archive_text_; }
  const std::string& entry() const { return entry_; }

  // Calls f(const Prover&) under the session lock.
  template <typename F>
  auto read(F&& f) const {
    std::lock_guard lock(mutex_);
    return f(prover_);
  }

  std::vector<NodeId> run_tactic(NodeId goal, const std::string& text);
  std::vector<NodeId> use_lemma(NodeId goal, const std::string& name, const std::string& adaptation);
  void expand(const std::string& name, std::optional<NodeId> goal);
  void expand_all(std::optional<NodeId> goal);
  void define(const std::string& name, const std::string& body);
  FinalizeResult finalize() const;
  std::string tactic() const;
  std::vector<HistoryItem> history() const;
  std::vector<std::pair<std::string, std::string>> defines() const;

 private:
  friend class SessionManager;
  void require_open(NodeId goal) const;
  template <typename F>
  auto mutate(const std::string& command, F&& f);

  std::string id_;
  std::string archive_text_;
  std::string entry_;
  Prover prover_;
  std::vector<HistoryItem> history_;
  std::vector<std::pair<std::string, std::string>> defines_;
  mutable std::mutex mutex_;
  std::function<void(const Session&)> on_change_;
};

class SessionManager {
 public:
  SessionManager(std::shared_ptr<LemmaStore> lemmas, std::shared_ptr<ArithOracle> oracle,
                 std::optional<std::filesystem::path> persist_dir = std::nullopt);

  // Throws ParseError for bad archive text and ProofError(NotFound) for an unknown entry.
  std::shared_ptr<Session> create(const std::string& archive_text, const std::optional<std::string>& entry);
  std::shared_ptr<Session> find(const std::string& id) const;
  bool remove(const std::string& id);
  std::vector<std::string> ids() const;

  const std::shared_ptr<LemmaStore>& lemmas() const { return lemmas_; }

  // Snapshots are the archive text, the symbols defined so far, and the recorded tactic.
  void save(const Session& s) const;
  // Restores every snapshot in the persist directory; returns how many were loaded.
  std::size_t load_all();

 private:
  std::shared_ptr<Session> make(std::string id, const std::string& archive_text, const std::optional<std::string>& entry);

  std::shared_ptr<LemmaStore> lemmas_;
  std::shared_ptr<ArithOracle> oracle_;
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_ = 1;
};

}  // namespace usp::service
