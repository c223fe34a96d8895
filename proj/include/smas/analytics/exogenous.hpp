#pragma once

namespace smas::analytics {

inline constexpr double kCoolingBreak = 20.0;
inline constexpr double kHeatingBreak = 16.0;
inline constexpr double kOverheatingBreak = 5.0;

/// Piecewise-linear temperature drivers: cooling above 20 °C, heating below
/// 16 °C and overheating below 5 °C. All three are non-negative.
struct ExogenousTemps {
  double xt1 = 0.0;
  double xt2 = 0.0;
  double xt3 = 0.0;

  [[nodiscard]] double operator[](int k) const noexcept { return k == 0 ? xt1 : (k == 1 ? xt2 : xt3); }
  friend bool operator==(const ExogenousTemps&, const ExogenousTemps&) = default;
};

/// Throws Error(invalid_argument) for a non-finite temperature.
[[nodiscard]] ExogenousTemps exogenous_transform(double temperature_c);

}  // namespace smas::analytics
