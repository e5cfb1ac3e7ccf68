#pragma once

#include <map>
#include <string>

#include "usp/expr.hpp"
#include "usp/sequent.hpp"

namespace usp {

enum class VerdictStatus { Valid, NotValid, Unknown };
enum class OracleKind { BuiltinGround, BuiltinLinear, BuiltinHeuristic, ExternalSMT };

using Assignment = std::map<Variable, Rational>;

namespace detail {
struct VerdictFactory;
}

// Result of an arithmetic decision for one sequent. Only the arith module creates
// verdicts, so a Valid verdict handed to the kernel always comes from a real oracle run.
class OracleVerdict {
 public:
  VerdictStatus status() const { return status_; }
  OracleKind oracle() const { return oracle_; }
  const std::string& solver() const { return solver_; }
  const Sequent& goal() const { return goal_; }
  // Falsifying assignment for NotValid verdicts (may be empty when the oracle gives no model).
  const Assignment& counterexample() const { return counterexample_; }

  bool valid() const { return status_ == VerdictStatus::Valid; }
  std::string oracle_name() const;
  std::string str() const;

 private:
  friend struct detail::VerdictFactory;
  OracleVerdict() = default;

  VerdictStatus status_ = VerdictStatus::Unknown;
  OracleKind oracle_ = OracleKind::BuiltinGround;
  std::string solver_;
  Sequent goal_;
  Assignment counterexample_;
};

const char* status_text(VerdictStatus s);

}  // namespace usp
