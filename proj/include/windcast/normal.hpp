#pragma once

namespace windcast {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
/// E|e| for e ~ N(0,1).
inline constexpr double kMeanAbsNormal = 0.79788456080286535588;

double normal_pdf(double x);
double normal_log_pdf(double x);
/// Lower-tail probability, computed through erfc so the far left tail keeps relative accuracy.
double normal_cdf(double x);
/// Upper-tail probability 1 - cdf(x) without cancellation.
double normal_sf(double x);
/// P(a < Z < b) evaluated in whichever tail avoids cancellation.
double normal_interval(double a, double b);

}  // namespace windcast
