#pragma once

#include <array>
#include <cstdint>

namespace randcurv {

/// Key of one standard-normal draw. Every Gaussian used by the samplers is a
/// pure function of this tuple, so results do not depend on scheduling.
struct DrawKey {
  std::uint64_t seed = 0;
  std::uint64_t draw_index = 0;
  std::uint32_t level = 0;
  std::uint32_t index = 0;
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal N(0, 1) addressed by `key` (Box-Muller on one Philox block).
double standard_normal(const DrawKey& key);

/// Uniform in the open interval (0, 1) addressed by `key`.
double uniform_open(const DrawKey& key);

/// Level tag reserved for draws that do not belong to a spectral level
/// (Cholesky sampler coordinates, negative Paneitz levels use their own tag).
inline constexpr std::uint32_t kCholeskyLevel = 0xFFFF'FFF0u;
inline constexpr std::uint32_t kNegativeLevelBase = 0x8000'0000u;

}  // namespace randcurv
