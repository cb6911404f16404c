#pragma once

#include <stdexcept>
#include <string>

namespace prismkit {

enum class ErrorKind {
  InvalidSpec,
  RingMismatch,
  NotDivisible,
  PrecisionExhausted,
  NotDistinguished,
  NotRankOne,
  NotInUnitNygaard,
  TailNotNegligible,
  IncompatibleRoots,
  FrontierExceeded,
  NoConvergenceWitness,
  NonInvertiblePsi,
  NotMinuscule,
  NonIntegralDual,
  NotInjective,
  NotEquivariant,
  FilNotComputable,
  TooLarge,
  LengthMismatch,
  InputError,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) {
  throw Error(k, msg);
}

}  // namespace prismkit
