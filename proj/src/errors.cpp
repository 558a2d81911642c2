#include "ptbec/types.hpp"

namespace ptbec {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::MissingCompanion: return "MissingCompanion";
    case Errc::NonDecaying: return "NonDecaying";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::SingularJacobian: return "SingularJacobian";
    case Errc::BranchLost: return "BranchLost";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::SingularSimilarity: return "SingularSimilarity";
    case Errc::NonConvergentLimit: return "NonConvergentLimit";
    case Errc::NoAmplitudeSolution: return "NoAmplitudeSolution";
    case Errc::CardinalityChange: return "CardinalityChange";
    case Errc::AmbiguousMatching: return "AmbiguousMatching";
    case Errc::FitFailure: return "FitFailure";
  }
  return "Unknown";
}

}  // namespace ptbec
