#pragma once

// Plain-text spectral data for manifolds without a built-in spectrum.
//
//   format randcurv-spectrum 1
//   dimension 2
//   volume 12.566370614359172
//   points 3
//   operator laplacian            (or gjms)
//   weights w_1 ... w_P           (optional, default volume/P each)
//   reference r_1 ... r_P         (optional R0 or Q0 per point)
//   lambda 2.0 φ(x_1) ... φ(x_P)  (one line per eigenfunction)
//
// Blank lines and text after '#' are ignored. A negative lambda -μ declares
// P ψ = -μ ψ and is only accepted with `operator gjms`. Eigenfunctions are
// L²-normalised with respect to the quadrature weights by the producer; the
// reader does not renormalise them.

#include <iosfwd>
#include <string>

#include "randcurv/point_sets.hpp"
#include "randcurv/spectral.hpp"

namespace randcurv {

SpectrumModel parse_spectrum(std::istream& in);
SpectrumModel read_spectrum_file(const std::string& path);
void write_spectrum(std::ostream& out, const SpectrumModel& spectrum);

/// Opaque point set (index-only) with the file's quadrature weights.
PointSet user_point_set(const SpectrumModel& spectrum);

}  // namespace randcurv
