#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "usp/sequent.hpp"
#include "usp/verdict.hpp"

namespace usp {

class ArithError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact evaluation with guarded division (an atom whose denominator is zero is false).
// Variables missing from `values` read as 0. Returns nullopt for non-arithmetic input
// (uninterpreted symbols, modalities, quantifiers, differentials).
std::optional<bool> evaluate(const Expr& formula, const Assignment& values);
std::optional<bool> evaluate(const Sequent& s, const Assignment& values);

// No variables and no uninterpreted symbols.
bool is_ground(const Sequent& s);

// Exact evaluation of variable-free sequents. Throws ArithError on non-ground input.
OracleVerdict decide_ground(const Sequent& goal);

// Fourier-Motzkin over the rationals; Unknown when a nonlinear atom remains.
OracleVerdict decide_linear(const Sequent& goal);

// Sound, incomplete: equation substitution, sign analysis of monomials, linear relaxation.
OracleVerdict decide_heuristic(const Sequent& goal);

// SMT-LIB 2 script asserting the negated sequent (QF_NRA, guarded division).
std::string smt_encode(const Sequent& goal);

// Runs `solver_command` (program plus arguments, whitespace separated) on the encoded
// goal via stdin/stdout. Throws ArithError when the solver cannot be started.
OracleVerdict smt_check(const Sequent& goal, std::chrono::milliseconds timeout, const std::string& solver_command);

struct ArithConfig {
  std::string smt_command;  // empty: no external solver
  std::chrono::milliseconds smt_timeout{10000};
};

// Cascade ground -> linear -> heuristic -> SMT (when configured), with a verdict cache.
class ArithOracle {
 public:
  explicit ArithOracle(ArithConfig config = {}) : config_(std::move(config)) {}
  ArithOracle(const ArithOracle&) = delete;
  ArithOracle& operator=(const ArithOracle&) = delete;

  OracleVerdict qe(const Sequent& goal);
  const ArithConfig& config() const { return config_; }
  std::size_t cache_size() const;

 private:
  ArithConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, OracleVerdict> cache_;
};

// The cascade with built-in stages only.
OracleVerdict qe(const Sequent& goal);

}  // namespace usp
