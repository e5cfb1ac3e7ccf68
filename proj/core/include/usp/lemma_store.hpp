#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "usp/archive.hpp"
#include "usp/arith.hpp"
#include "usp/kernel.hpp"

namespace usp {

struct LemmaRecord {
  std::string name;
  ArchiveEntry entry;  // definitions, variables, problem, and one recorded tactic
  Provable provable;
  std::string digest;  // SHA-256 of text()

  std::string text() const;
};

// Lemmas by name. With a directory, each lemma is a file <name>.kyx plus <name>.kyx.sha256;
// loading re-parses the file and replays its tactic before handing out the Provable.
class LemmaStore : public std::enable_shared_from_this<LemmaStore> {
 public:
  explicit LemmaStore(std::optional<std::filesystem::path> dir = std::nullopt,
                      std::shared_ptr<ArithOracle> oracle = nullptr);

  // Builds a record by proving `entry` with its first tactic. Throws ProofError.
  LemmaRecord prove(const ArchiveEntry& entry);

  // Keeps the record in memory and, with a directory, also writes it when `persist`.
  // Storing different content under an existing name throws ProofError(Lemma).
  void store(const LemmaRecord& r, bool persist = true);
  // Validated lookup; nullopt when unknown. Throws ProofError(Lemma) on a corrupt file.
  std::optional<LemmaRecord> get(const std::string& name);
  std::optional<std::string> text(const std::string& name) const;
  std::vector<std::string> list() const;
  std::vector<std::string> search(const std::string& needle) const;
  bool remove(const std::string& name);

  const std::optional<std::filesystem::path>& directory() const { return dir_; }

 private:
  std::filesystem::path file_of(const std::string& name) const;

  std::optional<std::filesystem::path> dir_;
  std::shared_ptr<ArithOracle> oracle_;
  mutable std::recursive_mutex mutex_;
  std::map<std::string, LemmaRecord> cache_;
  std::set<std::string> loading_;
};

std::string sha256_hex(const std::string& data);

}  // namespace usp
