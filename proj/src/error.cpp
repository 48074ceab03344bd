#include "subdiff/error.hpp"

namespace subdiff {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_params: return "invalid-params";
    case ErrorKind::evaluation_failure: return "evaluation-failure";
    case ErrorKind::unsupported_operator: return "unsupported-operator";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::solver: return "solver";
  }
  return "unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& what,
                     std::optional<std::size_t> mode) {
  std::string msg = std::string(to_string(kind)) + ": " + what;
  if (mode) msg += " (mode " + std::to_string(*mode) + ")";
  return msg;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& what,
             std::optional<std::size_t> mode)
    : std::runtime_error(decorate(kind, what, mode)), kind_(kind), mode_(mode) {}

Error Error::with_mode(std::size_t mode) const {
  if (mode_) return *this;
  // strip the "<kind>: " prefix added by decorate
  std::string msg = what();
  const std::string prefix = std::string(to_string(kind_)) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return Error(kind_, msg, mode);
}

void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::invalid_params, what);
}

}  // namespace subdiff
