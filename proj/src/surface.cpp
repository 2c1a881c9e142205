#include "seqtrace/surface.hpp"

#include <cmath>

#include "seqtrace/error.hpp"

namespace seqtrace {

Profile Profile::sphere(double radius) {
  if (radius == 0.0 || !std::isfinite(radius))
    throw Error(ErrorKind::invalid_argument, "sphere radius must be finite and non-zero");
  return Profile(ProfileKind::sphere, radius, 0.0);
}

Profile Profile::conic(double radius, double conic_constant) {
  if (radius == 0.0 || !std::isfinite(radius))
    throw Error(ErrorKind::invalid_argument, "conic radius must be finite and non-zero");
  if (!std::isfinite(conic_constant))
    throw Error(ErrorKind::invalid_argument, "conic constant must be finite");
  return Profile(ProfileKind::conic, radius, conic_constant);
}

Profile Profile::from_curvature(double curvature, double conic_constant) {
  if (curvature == 0.0) return plano();
  if (conic_constant != 0.0) return conic(1.0 / curvature, conic_constant);
  return sphere(1.0 / curvature);
}

double Profile::sag(double r2) const {
  if (kind_ == ProfileKind::plano) return 0.0;
  const double arg = 1.0 - (1.0 + conic_) * curvature_ * curvature_ * r2;
  if (arg < 0.0) return std::nan("");
  return curvature_ * r2 / (1.0 + std::sqrt(arg));
}

double Profile::meridional_curvature(double r) const {
  if (kind_ == ProfileKind::plano) return 0.0;
  const double c = curvature_;
  const double s = std::sqrt(1.0 - (1.0 + conic_) * c * c * r * r);
  const double slope = c * r / s;
  return (c / (s * s * s)) / std::pow(1.0 + slope * slope, 1.5);
}

double Profile::sagittal_curvature(double r) const {
  if (kind_ == ProfileKind::plano) return 0.0;
  const double c = curvature_;
  const double s = std::sqrt(1.0 - (1.0 + conic_) * c * c * r * r);
  const double slope = c * r / s;
  return c / (s * std::sqrt(1.0 + slope * slope));
}

}  // namespace seqtrace
