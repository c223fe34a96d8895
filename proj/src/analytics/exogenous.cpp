#include "smas/analytics/exogenous.hpp"

#include <cmath>

#include "smas/error.hpp"

namespace smas::analytics {

ExogenousTemps exogenous_transform(double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::invalid_argument, "temperature must be finite");
  ExogenousTemps x;
  if (t > kCoolingBreak) x.xt1 = t - kCoolingBreak;
  if (t < kHeatingBreak) x.xt2 = kHeatingBreak - t;
  if (t < kOverheatingBreak) x.xt3 = kOverheatingBreak - t;
  return x;
}

}  // namespace smas::analytics
