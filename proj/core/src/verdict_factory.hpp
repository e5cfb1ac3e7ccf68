#pragma once

#include "usp/verdict.hpp"

namespace usp::detail {

struct VerdictFactory {
  static OracleVerdict make(VerdictStatus status, OracleKind oracle, const Sequent& goal, Assignment cex = {},
                            std::string solver = {}) {
    OracleVerdict v;
    v.status_ = status;
    v.oracle_ = oracle;
    v.goal_ = goal;
    v.counterexample_ = std::move(cex);
    v.solver_ = std::move(solver);
    return v;
  }
};

}  // namespace usp::detail
