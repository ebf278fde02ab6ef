#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace landau {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt_pi = 1.7724538509055160273;
inline constexpr cplx I{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StripViolation : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct SingularStep : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };
struct PoleOnContour : Error { using Error::Error; };
struct WindingAmbiguity : Error { using Error::Error; };
struct MarginError : Error { using Error::Error; };
struct MeanViolation : Error { using Error::Error; };
struct HorizonError : Error { using Error::Error; };
struct BlowUp : Error { using Error::Error; };
struct Divergence : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace landau
