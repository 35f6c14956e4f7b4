#include "slipform/error.hpp"

namespace slipform {

const char *to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotOnManifold: return "NotOnManifold";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::Infeasible: return "Infeasible";
    case Errc::NonPositiveEps: return "NonPositiveEps";
    case Errc::InvalidMap: return "InvalidMap";
    case Errc::NoSharedEdge: return "NoSharedEdge";
    case Errc::AngleOutOfRange: return "AngleOutOfRange";
    case Errc::AngleTooLarge: return "AngleTooLarge";
    case Errc::SlipAngleTooLarge: return "SlipAngleTooLarge";
    case Errc::AxisSlip: return "AxisSlip";
    case Errc::AxisShearUnsupported: return "AxisShearUnsupported";
    case Errc::ShortSegment: return "ShortSegment";
    case Errc::HTooLarge: return "HTooLarge";
    case Errc::BadAlpha: return "BadAlpha";
    case Errc::GridTooSmall: return "GridTooSmall";
    case Errc::CFLViolation: return "CFLViolation";
    case Errc::BlowUp: return "BlowUp";
    case Errc::InfeasibleSqueeze: return "InfeasibleSqueeze";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string &what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace slipform
