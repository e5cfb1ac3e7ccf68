#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "usp/archive.hpp"
#include "usp/arith.hpp"
#include "usp/lemma_store.hpp"

namespace usp::service {

struct EntryReport {
  std::string name;
  EntryKind kind = EntryKind::Theorem;
  std::string tactic;  // name of the tactic that was run
  bool closed = false;
  std::vector<std::string> open_goals;
  std::string conclusion;
  std::optional<std::string> error;  // "<kind>: message"
  double seconds = 0;
};

struct CheckReport {
  std::string path;
  std::vector<EntryReport> entries;
  bool all_closed() const;
};

struct CheckOptions {
  std::optional<std::string> entry;  // only report this entry
  std::shared_ptr<LemmaStore> lemmas;
  std::shared_ptr<ArithOracle> oracle;
  bool store_lemmas = true;  // closed entries go to the store
};

// Replays every entry's first tactic in archive order.
CheckReport check_archive(const Archive& archive, const CheckOptions& options);

std::string report_json(const CheckReport& r);
std::string report_text(const CheckReport& r);

// The `check` command: 0 when every reported entry closes, 1 otherwise, 2 on unreadable input.
int cmd_check(const std::string& path, const CheckOptions& options, bool json, std::ostream& out, std::ostream& err);

}  // namespace usp::service
