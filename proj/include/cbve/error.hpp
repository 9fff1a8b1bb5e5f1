// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cbve {

//! Failure tagged with the module and operation that raised it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string operation, const std::string& detail)
      : std::runtime_error(module + "::" + operation + ": " + detail),
        module_(std::move(module)),
        operation_(std::move(operation)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string module_;
  std::string operation_;
};

//! Malformed input: bad bounds, unordered pieces, out-of-domain arguments.
class InvalidArgument : public Error {
  using Error::Error;
};

//! A kernel integral that is infinite for the requested bounds.
class DivergentIntegral : public Error {
  using Error::Error;
};

//! Backward solve produced a negative cumulant.
class NegativeCumulant : public Error {
  using Error::Error;
};

//! Step control could not reach the requested tolerance.
class NonConvergence : public Error {
  using Error::Error;
};

//! Envelope constants do not exist (some atom has jump of alpha <= -1).
class EnvelopeInapplicable : public Error {
  using Error::Error;
};

//! A generating function produced an impossible value.
class CorruptPgf : public Error {
  using Error::Error;
};

}  // namespace cbve
