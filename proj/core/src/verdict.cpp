#include "usp/verdict.hpp"

#include "usp/printer.hpp"

namespace usp {

const char* status_text(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Valid: return "valid";
    case VerdictStatus::NotValid: return "not valid";
    case VerdictStatus::Unknown: return "unknown";
  }
  return "?";
}

std::string OracleVerdict::oracle_name() const {
  switch (oracle_) {
    case OracleKind::BuiltinGround: return "builtin-ground";
    case OracleKind::BuiltinLinear: return "builtin-linear";
    case OracleKind::BuiltinHeuristic: return "builtin-heuristic";
    case OracleKind::ExternalSMT: return "smt:" + solver_;
  }
  return "?";
}

std::string OracleVerdict::str() const {
  std::string s = std::string(status_text(status_)) + " (" + oracle_name() + ")";
  if (!counterexample_.empty()) {
    s += " counterexample {";
    bool first = true;
    for (const auto& [v, q] : counterexample_) {
      s += (first ? "" : ", ") + v.str() + "=" + to_string(q);
      first = false;
    }
    s += "}";
  }
  return s;
}

}  // namespace usp
