#pragma once

#include <stdexcept>
#include <string>

namespace slipform {

/// Failure categories raised by the library. Infeasible densities are values
/// (see DensityValue), not errors; these codes cover contract violations and
/// constructions that cannot be carried out.
enum class Errc {
  NotOnManifold,
  InvalidRange,
  Infeasible,
  NonPositiveEps,
  InvalidMap,
  NoSharedEdge,
  AngleOutOfRange,
  AngleTooLarge,
  SlipAngleTooLarge,
  AxisSlip,
  AxisShearUnsupported,
  ShortSegment,
  HTooLarge,
  BadAlpha,
  GridTooSmall,
  CFLViolation,
  BlowUp,
  InfeasibleSqueeze,
  ParseError,
};

const char *to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace slipform
