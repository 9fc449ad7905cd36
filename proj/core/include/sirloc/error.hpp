#pragma once

#include <stdexcept>
#include <string>

namespace sirloc {

enum class ErrorKind {
  parse,
  empty_input,
  no_infected,
  disconnected_evidence,
  not_a_tree,
  too_large,
  invalid_trace,
  infeasible_scenario,
  config,
  domain,
};

constexpr const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::no_infected: return "no-infected";
    case ErrorKind::disconnected_evidence: return "disconnected-evidence";
    case ErrorKind::not_a_tree: return "not-a-tree";
    case ErrorKind::too_large: return "too-large";
    case ErrorKind::invalid_trace: return "invalid-trace";
    case ErrorKind::infeasible_scenario: return "infeasible-scenario";
    case ErrorKind::config: return "config";
    case ErrorKind::domain: return "domain";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace sirloc
