#pragma once

#include <vector>

namespace phasenet {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n = 0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Fit y = C * x^p by regressing log y on log x (all values must be positive).
struct PowerFit {
  double C = 0.0;
  double exponent = 0.0;
  double r2 = 0.0;
};
PowerFit power_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace phasenet
