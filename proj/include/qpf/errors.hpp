#pragma once

#include <stdexcept>
#include <string>

namespace qpf {

// Error categories for programmatic handling. The CLI exits 2 on any thrown
// Error ("bad request"), reserving 3 for acceptance failures and 4 for
// resource-cap skips under --strict.
enum class ErrorCode {
  validation,   // bad input, schema violation, precondition failure
  numerical,    // non-convergence, singularity, degenerate probability
  resource,     // qubit budget above the simulator cap
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error validation_error(const std::string& what) { return Error(ErrorCode::validation, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorCode::numerical, what); }
inline Error resource_error(const std::string& what) { return Error(ErrorCode::resource, what); }

}  // namespace qpf
