#pragma once

#include <array>

namespace angio::quadrature {

struct TetPoint {
  std::array<double, 4> bary;
  double weight;  // fraction of the element volume
};

// Symmetric 4-point rule, exact for polynomials of degree 2.
inline constexpr double kTetA = 0.5854101966249685;
inline constexpr double kTetB = 0.1381966011250105;

inline constexpr std::array<TetPoint, 4> kTet4 = {{
    {{kTetA, kTetB, kTetB, kTetB}, 0.25},
    {{kTetB, kTetA, kTetB, kTetB}, 0.25},
    {{kTetB, kTetB, kTetA, kTetB}, 0.25},
    {{kTetB, kTetB, kTetB, kTetA}, 0.25},
}};

struct LinePoint {
  double xi;      // position on [0, 1]
  double weight;  // fraction of the interval length
};

// 2-point Gauss-Legendre on [0, 1], exact up to cubics.
inline constexpr double kGaussOffset = 0.21132486540518713;  // (1 - 1/sqrt(3)) / 2
inline constexpr std::array<LinePoint, 2> kGauss2 = {{
    {kGaussOffset, 0.5},
    {1.0 - kGaussOffset, 0.5},
}};

}  // namespace angio::quadrature
