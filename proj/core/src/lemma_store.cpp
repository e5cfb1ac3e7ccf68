#include "usp/lemma_store.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "usp/prover.hpp"

namespace usp {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string LemmaRecord::text() const { return print(entry); }

namespace {

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ProofError(ProofErrorKind::Lemma, "cannot write " + p.string());
    out << text;
  }
  fs::rename(tmp, p);
}

fs::path digest_path(fs::path p) {
  p += ".sha256";
  return p;
}

}  // namespace

LemmaStore::LemmaStore(std::optional<fs::path> dir, std::shared_ptr<ArithOracle> oracle)
    : dir_(std::move(dir)), oracle_(oracle ? std::move(oracle) : std::make_shared<ArithOracle>()) {}

fs::path LemmaStore::file_of(const std::string& name) const {
  if (name.empty() || name.find("..") != std::string::npos || name.front() == '/' ||
      name.find('\\') != std::string::npos)
    throw ProofError(ProofErrorKind::Lemma, "invalid lemma name \"" + name + "\"");
  return *dir_ / (name + ".kyx");
}

LemmaRecord LemmaStore::prove(const ArchiveEntry& entry) {
  if (entry.tactics.empty()) throw ProofError(ProofErrorKind::Lemma, "lemma \"" + entry.name + "\" has no tactic");
  Prover pv = Prover::for_entry(entry, shared_from_this(), oracle_);
  pv.run(pv.tree().root(), *entry.tactics.front().tactic);
  FinalizeResult fr = pv.finalize();
  LemmaRecord r{entry.name, entry, fr.provable, ""};
  r.entry.kind = EntryKind::Lemma;
  r.entry.tactics = {TacticEntry{"Recorded", parse_tactic(pv.extract_tactic())}};
  r.digest = sha256_hex(r.text());
  return r;
}

void LemmaStore::store(const LemmaRecord& r, bool persist) {
  std::lock_guard lock(mutex_);
  std::string text = r.text();
  auto it = cache_.find(r.name);
  if (it != cache_.end() && it->second.text() != text)
    throw ProofError(ProofErrorKind::Lemma, "a different lemma named \"" + r.name + "\" already exists");
  if (dir_ && persist) {
    fs::path p = file_of(r.name);
    if (auto old = read_file(p); old && *old != text)
      throw ProofError(ProofErrorKind::Lemma, "a different lemma named \"" + r.name + "\" already exists");
    write_file(p, text);
    write_file(digest_path(p), sha256_hex(text) + "\n");
  }
  LemmaRecord copy = r;
  copy.digest = sha256_hex(text);
  cache_.insert_or_assign(r.name, std::move(copy));
}

std::optional<LemmaRecord> LemmaStore::get(const std::string& name) {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(name); it != cache_.end()) return it->second;
  if (!dir_) return std::nullopt;
  fs::path p = file_of(name);
  auto text = read_file(p);
  if (!text) return std::nullopt;
  auto digest = read_file(digest_path(p));
  std::string want = sha256_hex(*text);
  if (!digest || digest->substr(0, want.size()) != want)
    throw ProofError(ProofErrorKind::Lemma, "lemma \"" + name + "\" fails its integrity check");
  if (loading_.count(name)) throw ProofError(ProofErrorKind::Lemma, "lemma \"" + name + "\" depends on itself");
  loading_.insert(name);
  try {
    Archive a = parse_archive(*text);
    if (a.entries.size() != 1 || a.entries[0].name != name)
      throw ProofError(ProofErrorKind::Lemma, "file for lemma \"" + name + "\" holds a different entry");
    LemmaRecord r = prove(a.entries[0]);
    loading_.erase(name);
    cache_.insert_or_assign(name, r);
    return r;
  } catch (const ProofError& e) {
    loading_.erase(name);
    throw ProofError(ProofErrorKind::Lemma, "lemma \"" + name + "\" does not replay: " + e.what());
  } catch (const std::exception& e) {
    loading_.erase(name);
    throw ProofError(ProofErrorKind::Lemma, "lemma \"" + name + "\" does not replay: " + e.what());
  }
}

std::optional<std::string> LemmaStore::text(const std::string& name) const {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(name); it != cache_.end()) return it->second.text();
  if (!dir_) return std::nullopt;
  return read_file(file_of(name));
}

std::vector<std::string> LemmaStore::list() const {
  std::lock_guard lock(mutex_);
  std::set<std::string> names;
  for (const auto& [n, r] : cache_) names.insert(n);
  if (dir_ && fs::exists(*dir_)) {
    for (const auto& e : fs::recursive_directory_iterator(*dir_)) {
      if (!e.is_regular_file() || e.path().extension() != ".kyx") continue;
      fs::path rel = fs::relative(e.path(), *dir_);
      std::string s = rel.generic_string();
      names.insert(s.substr(0, s.size() - 4));
    }
  }
  return {names.begin(), names.end()};
}

std::vector<std::string> LemmaStore::search(const std::string& needle) const {
  std::vector<std::string> out;
  for (auto& n : list())
    if (n.find(needle) != std::string::npos) out.push_back(n);
  return out;
}

bool LemmaStore::remove(const std::string& name) {
  std::lock_guard lock(mutex_);
  bool found = cache_.erase(name) > 0;
  if (dir_) {
    fs::path p = file_of(name);
    std::error_code ec;
    found = fs::remove(p, ec) || found;
    fs::remove(digest_path(p), ec);
  }
  return found;
}

}  // namespace usp
