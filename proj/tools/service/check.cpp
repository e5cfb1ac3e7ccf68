#include "service/check.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "usp/printer.hpp"
#include "usp/prover.hpp"

namespace usp::service {

using nlohmann::json;

bool CheckReport::all_closed() const {
  for (const auto& e : entries)
    if (!e.closed) return false;
  return true;
}

namespace {

EntryReport run_entry(const ArchiveEntry& e, const CheckOptions& o) {
  EntryReport r;
  r.name = e.name;
  r.kind = e.kind;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Prover pv = Prover::for_entry(e, o.lemmas, o.oracle);
    if (e.tactics.empty()) {
      r.error = "lemma: entry has no tactic";
    } else {
      r.tactic = e.tactics.front().name;
      try {
        pv.run(pv.tree().root(), *e.tactics.front().tactic);
      } catch (const ProofError& err) {
        r.error = std::string(error_kind_name(err.kind())) + ": " + err.what();
      }
    }
    for (NodeId n : pv.tree().open_goals()) r.open_goals.push_back(pv.tree().node(n).goal.str());
    FinalizeResult fr = pv.finalize();
    r.conclusion = fr.provable.conclusion().str();
    r.closed = !r.error && fr.provable.closed();
    if (r.closed && o.store_lemmas && o.lemmas) o.lemmas->store(o.lemmas->prove(e));
  } catch (const ProofError& err) {
    r.closed = false;
    r.error = std::string(error_kind_name(err.kind())) + ": " + err.what();
  } catch (const std::exception& err) {
    r.closed = false;
    r.error = std::string("internal: ") + err.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

CheckReport check_archive(const Archive& archive, const CheckOptions& options) {
  CheckOptions o = options;
  if (!o.oracle) o.oracle = std::make_shared<ArithOracle>();
  if (!o.lemmas) o.lemmas = std::make_shared<LemmaStore>(std::nullopt, o.oracle);
  CheckReport rep;
  for (const auto& e : archive.entries) {
    bool wanted = !o.entry || *o.entry == e.name;
    if (!wanted) {
      // later entries may use this lemma
      if (e.kind != EntryKind::Lemma) continue;
      bool known = false;
      try {
        known = o.lemmas->get(e.name).has_value();
      } catch (const ProofError&) {
      }
      if (!known) run_entry(e, o);
      continue;
    }
    rep.entries.push_back(run_entry(e, o));
  }
  return rep;
}

std::string report_json(const CheckReport& r) {
  json j;
  j["path"] = r.path;
  j["closed"] = r.all_closed();
  j["entries"] = json::array();
  for (const auto& e : r.entries) {
    json x;
    x["name"] = e.name;
    x["kind"] = e.kind == EntryKind::Lemma ? "lemma" : "theorem";
    x["tactic"] = e.tactic;
    x["closed"] = e.closed;
    x["openGoals"] = e.open_goals;
    x["openCount"] = e.open_goals.size();
    x["conclusion"] = e.conclusion;
    x["error"] = e.error ? json(*e.error) : json(nullptr);
    x["seconds"] = e.seconds;
    j["entries"].push_back(std::move(x));
  }
  return j.dump(2);
}

std::string report_text(const CheckReport& r) {
  std::ostringstream out;
  std::size_t closed = 0;
  for (const auto& e : r.entries) {
    closed += e.closed;
    out << (e.closed ? "closed " : "OPEN   ") << '"' << e.name << "\" (" << e.open_goals.size() << " open";
    out << ", " << static_cast<long>(e.seconds * 1000) << " ms)\n";
    if (!e.conclusion.empty()) out << "  conclusion: " << e.conclusion << "\n";
    for (const auto& g : e.open_goals) out << "  open: " << g << "\n";
    if (e.error) out << "  error: " << *e.error << "\n";
  }
  out << closed << "/" << r.entries.size() << " entries closed\n";
  return out.str();
}

int cmd_check(const std::string& path, const CheckOptions& options, bool json_out, std::ostream& out,
              std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "cannot read " << path << "\n";
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  Archive a;
  try {
    a = parse_archive(ss.str());
  } catch (const ParseError& e) {
    err << path << ":" << e.what() << "\n";
    return 2;
  }
  if (options.entry && !a.find(*options.entry)) {
    err << "no entry named \"" << *options.entry << "\" in " << path << "\n";
    return 2;
  }
  CheckReport r = check_archive(a, options);
  r.path = path;
  out << (json_out ? report_json(r) + "\n" : report_text(r));
  return r.all_closed() ? 0 : 1;
}

}  // namespace usp::service
