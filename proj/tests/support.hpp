#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "mssr/pareto.hpp"

namespace fixtures {

// Breakdown times of insulating fluid specimens at two voltages.
inline const std::vector<double> kData1{0.40,  82.85, 9.88,   89.29, 215.10, 2.75,  0.79, 15.93,
                                        3.91,  0.27,  0.69,   100.58, 27.80, 13.95, 53.24};
inline const std::vector<double> kData2{0.47, 0.73, 1.40, 0.74, 0.39, 1.13, 0.09, 2.38};

inline mssr::RecordSample records1() { return mssr::RecordSample({0.40, 82.85, 89.29, 215.10}); }
inline mssr::RecordSample records2() { return mssr::RecordSample({0.47, 0.73, 1.40, 2.38}); }

// Central difference with step h.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double se = 0.0;  // standard error of the mean
};

inline Moments moments(const std::vector<double>& x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  m.se = std::sqrt(m.var / static_cast<double>(x.size()));
  return m;
}

}  // namespace fixtures
