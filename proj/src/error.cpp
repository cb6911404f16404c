#include "prismkit/error.hpp"

namespace prismkit {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::RingMismatch: return "RingMismatch";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::NotDistinguished: return "NotDistinguished";
    case ErrorKind::NotRankOne: return "NotRankOne";
    case ErrorKind::NotInUnitNygaard: return "NotInUnitNygaard";
    case ErrorKind::TailNotNegligible: return "TailNotNegligible";
    case ErrorKind::IncompatibleRoots: return "IncompatibleRoots";
    case ErrorKind::FrontierExceeded: return "FrontierExceeded";
    case ErrorKind::NoConvergenceWitness: return "NoConvergenceWitness";
    case ErrorKind::NonInvertiblePsi: return "NonInvertiblePsi";
    case ErrorKind::NotMinuscule: return "NotMinuscule";
    case ErrorKind::NonIntegralDual: return "NonIntegralDual";
    case ErrorKind::NotInjective: return "NotInjective";
    case ErrorKind::NotEquivariant: return "NotEquivariant";
    case ErrorKind::FilNotComputable: return "FilNotComputable";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InputError: return "InputError";
  }
  return "Unknown";
}

}  // namespace prismkit
