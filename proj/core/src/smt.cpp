#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "usp/arith.hpp"
#include "usp/printer.hpp"
#include "usp/static_semantics.hpp"
#include "verdict_factory.hpp"

extern char** environ;

namespace usp {

using detail::VerdictFactory;

namespace {

std::string quoted(const std::string& s) { return "|" + s + "|"; }

std::string var_name(const Variable& v) { return quoted(print(mk::var(v))); }

std::string literal(const Rational& r) {
  Integer n = numerator_of(r);
  Integer d = denominator_of(r);
  std::string body = (n < 0 ? Integer(-n) : n).str() + ".0";
  if (d != 1) body = "(/ " + body + " " + d.str() + ".0)";
  return n < 0 ? "(- " + body + ")" : body;
}

class Encoder {
 public:
  std::string term(const Expr& t) {
    switch (t.op()) {
      case Op::Num: return literal(t.num());
      case Op::Var: {
        vars_.insert(t.var());
        return var_name(t.var());
      }
      case Op::Dot: return opaque_const(t);
      case Op::Differential: return opaque_const(t);
      case Op::Func: {
        std::string name = quoted("f!" + t.symbol().name);
        funcs_.emplace(name, t.symbol().arity);
        if (t.symbol().arity == 0) return name;
        std::string s = "(" + name;
        for (const auto& c : t.children()) s += " " + term(c);
        return s + ")";
      }
      case Op::Neg: return "(- " + term(t.child(0)) + ")";
      case Op::Power: {
        auto k = static_cast<unsigned>(numerator_of(t.child(1).num()));
        if (k == 0) return "1.0";
        std::string b = term(t.child(0));
        if (k == 1) return b;
        std::string s = "(*";
        for (unsigned i = 0; i < k; ++i) s += " " + b;
        return s + ")";
      }
      case Op::Divide: {
        std::string den = term(t.child(1));
        guards_.push_back(den);
        return "(/ " + term(t.child(0)) + " " + den + ")";
      }
      case Op::Plus: return "(+ " + term(t.child(0)) + " " + term(t.child(1)) + ")";
      case Op::Minus: return "(- " + term(t.child(0)) + " " + term(t.child(1)) + ")";
      case Op::Times: return "(* " + term(t.child(0)) + " " + term(t.child(1)) + ")";
      default: throw ArithError("smt: not a term: " + print(t));
    }
  }

  std::string formula(const Expr& f) {
    switch (f.op()) {
      case Op::True: return "true";
      case Op::False: return "false";
      case Op::Cmp: {
        std::vector<std::string> saved;
        saved.swap(guards_);
        std::string l = term(f.child(0));
        std::string r = term(f.child(1));
        std::string rel;
        switch (f.cmp()) {
          case CmpOp::Eq: rel = "(= " + l + " " + r + ")"; break;
          case CmpOp::Ne: rel = "(not (= " + l + " " + r + "))"; break;
          case CmpOp::Ge: rel = "(>= " + l + " " + r + ")"; break;
          case CmpOp::Gt: rel = "(> " + l + " " + r + ")"; break;
          case CmpOp::Le: rel = "(<= " + l + " " + r + ")"; break;
          case CmpOp::Lt: rel = "(< " + l + " " + r + ")"; break;
        }
        std::vector<std::string> guards;
        guards.swap(guards_);
        guards_ = std::move(saved);
        if (guards.empty()) return rel;
        std::string s = "(and";
        for (const auto& g : guards) s += " (not (= " + g + " 0.0))";
        return s + " " + rel + ")";
      }
      case Op::Not: return "(not " + formula(f.child(0)) + ")";
      case Op::And: return "(and " + formula(f.child(0)) + " " + formula(f.child(1)) + ")";
      case Op::Or: return "(or " + formula(f.child(0)) + " " + formula(f.child(1)) + ")";
      case Op::Imply: return "(=> " + formula(f.child(0)) + " " + formula(f.child(1)) + ")";
      case Op::Equiv: return "(= " + formula(f.child(0)) + " " + formula(f.child(1)) + ")";
      case Op::Pred: {
        std::string name = quoted("p!" + f.symbol().name);
        preds_.emplace(name, f.symbol().arity);
        if (f.symbol().arity == 0) return name;
        std::string s = "(" + name;
        for (const auto& c : f.children()) s += " " + term(c);
        return s + ")";
      }
      default: {
        abstracted_ = true;
        auto [it, fresh] = props_.emplace(f, props_.size());
        (void)fresh;
        return quoted("b!" + std::to_string(it->second));
      }
    }
  }

  std::string script(const Sequent& goal) {
    std::string body = formula(goal.as_formula());
    std::ostringstream out;
    out << (uninterpreted() ? "(set-logic QF_UFNRA)\n" : "(set-logic QF_NRA)\n");
    for (const auto& v : vars_) out << "(declare-fun " << var_name(v) << " () Real)\n";
    for (const auto& [name, k] : consts_) out << "(declare-fun " << name << " () Real)\n";
    auto sig = [](unsigned arity) {
      std::string s = "(";
      for (unsigned i = 0; i < arity; ++i) s += i ? " Real" : "Real";
      return s + ")";
    };
    for (const auto& [name, arity] : funcs_) out << "(declare-fun " << name << " " << sig(arity) << " Real)\n";
    for (const auto& [name, arity] : preds_) out << "(declare-fun " << name << " " << sig(arity) << " Bool)\n";
    for (const auto& [f, i] : props_) out << "(declare-fun " << quoted("b!" + std::to_string(i)) << " () Bool)\n";
    out << "(assert (not " << body << "))\n(check-sat)\n";
    if (!vars_.empty()) {
      out << "(get-value (";
      bool first = true;
      for (const auto& v : vars_) {
        out << (first ? "" : " ") << var_name(v);
        first = false;
      }
      out << "))\n";
    }
    out << "(exit)\n";
    return out.str();
  }

  const std::set<Variable>& vars() const { return vars_; }
  bool abstracted() const { return abstracted_; }
  bool uninterpreted() const { return !funcs_.empty() || !preds_.empty() || !consts_.empty(); }

 private:
  std::string opaque_const(const Expr& t) {
    auto [it, fresh] = consts_.emplace(quoted("c!" + print(t)), 0);
    (void)fresh;
    return it->first;
  }

  std::set<Variable> vars_;
  std::map<std::string, int> consts_;
  std::map<std::string, unsigned> funcs_;
  std::map<std::string, unsigned> preds_;
  std::map<Expr, std::size_t> props_;
  std::vector<std::string> guards_;
  bool abstracted_ = false;
};

// ---- s-expressions in solver output ----

struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_list = false;
};

class SexpReader {
 public:
  explicit SexpReader(const std::string& s) : s_(s) {}

  std::optional<Sexp> next() {
    skip();
    if (pos_ >= s_.size()) return std::nullopt;
    return read();
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip();
    if (pos_ >= s_.size()) throw ArithError("smt: unexpected end of solver output");
    Sexp e;
    if (s_[pos_] == '(') {
      ++pos_;
      e.is_list = true;
      while (true) {
        skip();
        if (pos_ >= s_.size()) throw ArithError("smt: unbalanced solver output");
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.list.push_back(read());
      }
      return e;
    }
    if (s_[pos_] == ')') throw ArithError("smt: unbalanced solver output");
    if (s_[pos_] == '|') {
      std::size_t end = s_.find('|', pos_ + 1);
      if (end == std::string::npos) throw ArithError("smt: unterminated symbol in solver output");
      e.atom = s_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return e;
    }
    if (s_[pos_] == '"') {
      std::size_t end = pos_ + 1;
      while (end < s_.size() && s_[end] != '"') ++end;
      e.atom = s_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')')
      ++pos_;
    e.atom = s_.substr(start, pos_ - start);
    return e;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::optional<Rational> value_of(const Sexp& e) {
  if (!e.is_list) return parse_decimal(e.atom);
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
    auto v = value_of(e.list[1]);
    if (!v) return std::nullopt;
    return -*v;
  }
  if (e.list.size() == 3 && !e.list[0].is_list && e.list[0].atom == "/") {
    auto a = value_of(e.list[1]);
    auto b = value_of(e.list[2]);
    if (!a || !b || *b == 0) return std::nullopt;
    return *a / *b;
  }
  return std::nullopt;
}

struct RunResult {
  std::string output;
  bool timed_out = false;
};

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> parts;
  std::string w;
  while (in >> w) parts.push_back(w);
  return parts;
}

RunResult run_solver(const std::string& command, const std::string& input, std::chrono::milliseconds timeout) {
  std::vector<std::string> parts = split_command(command);
  if (parts.empty()) throw ArithError("smt: empty solver command");
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw ArithError(std::string("smt: pipe: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ArithError(std::string("smt: pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], 0);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  std::vector<char*> argv;
  for (auto& p : parts) argv.push_back(p.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw ArithError("smt: cannot start solver '" + parts[0] + "': " + std::strerror(rc));
  }

  // the script is small; a solver that never reads it is caught by the timeout below
  signal(SIGPIPE, SIG_IGN);
  std::size_t written = 0;
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);

  RunResult result;
  auto deadline = std::chrono::steady_clock::now() + timeout;
  bool in_open = true;
  char buf[4096];
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = {out_pipe[0], POLLIN, 0};
    if (in_open) fds[n++] = {in_pipe[1], POLLOUT, 0};
    int r = poll(fds, n, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (r == 0) continue;
    if (in_open && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t w = write(in_pipe[1], input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written >= input.size()) {
        close(in_pipe[1]);
        in_open = false;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t got = read(out_pipe[0], buf, sizeof buf);
      if (got > 0) {
        result.output.append(buf, static_cast<std::size_t>(got));
      } else if (got == 0 || errno != EAGAIN) {
        break;
      }
    }
  }
  if (in_open) close(in_pipe[1]);
  close(out_pipe[0]);
  if (result.timed_out) kill(pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  return result;
}

}  // namespace

std::string smt_encode(const Sequent& goal) { return Encoder().script(goal); }

OracleVerdict smt_check(const Sequent& goal, std::chrono::milliseconds timeout, const std::string& solver_command) {
  Encoder enc;
  std::string script = enc.script(goal);
  auto make = [&](VerdictStatus s, Assignment cex = {}) {
    return VerdictFactory::make(s, OracleKind::ExternalSMT, goal, std::move(cex), split_command(solver_command).empty()
                                                                                      ? solver_command
                                                                                      : split_command(solver_command)[0]);
  };
  if (timeout.count() <= 0) return make(VerdictStatus::Unknown);
  RunResult run = run_solver(solver_command, script, timeout);
  if (run.timed_out) return make(VerdictStatus::Unknown);
  SexpReader reader(run.output);
  auto first = reader.next();
  if (!first || first->is_list) throw ArithError("smt: malformed solver output: " + run.output);
  if (first->atom == "unsat") return make(VerdictStatus::Valid);
  if (first->atom == "unknown" || first->atom == "timeout") return make(VerdictStatus::Unknown);
  if (first->atom != "sat") throw ArithError("smt: malformed solver output: " + run.output);
  if (enc.abstracted()) return make(VerdictStatus::Unknown);

  Assignment cex;
  bool complete = true;
  if (!enc.vars().empty()) {
    auto model = reader.next();
    if (!model || !model->is_list) throw ArithError("smt: missing model in solver output");
    for (const auto& pair : model->list) {
      if (!pair.is_list || pair.list.size() != 2 || pair.list[0].is_list)
        throw ArithError("smt: malformed model entry in solver output");
      auto v = value_of(pair.list[1]);
      if (!v) {
        complete = false;
        continue;
      }
      for (const auto& var : enc.vars())
        if (var_name(var) == pair.list[0].atom) cex[var] = *v;
    }
  }
  if (complete && !enc.uninterpreted()) {
    // a rational model must falsify the goal; otherwise the solver answer is not trusted
    auto value = evaluate(goal, cex);
    if (!value || *value) return make(VerdictStatus::Unknown);
  }
  return make(VerdictStatus::NotValid, std::move(cex));
}

}  // namespace usp
