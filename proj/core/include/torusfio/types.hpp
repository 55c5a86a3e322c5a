#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <string>

namespace torusfio {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 3;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Points on the torus, points of R^n and real frequencies. Components past the
// active dimension are kept at zero.
using Coord = std::array<double, kMaxDim>;

// Lattice frequencies in Z^n and multi-indices in N_0^n.
using Index = std::array<int, kMaxDim>;

using Matrix = std::array<std::array<double, kMaxDim>, kMaxDim>;

/// Japanese bracket <xi> = (1 + |xi|^2)^{1/2}.
double bracket(const Index& xi, int dim);
double bracket(const Coord& xi, int dim);

double euclidean_norm(const Coord& v, int dim);
double euclidean_norm(const Index& v, int dim);
double dot(const Coord& a, const Coord& b, int dim);
double dot(const Coord& a, const Index& b, int dim);

/// |alpha| for a multi-index.
int total_order(const Index& alpha, int dim);

Coord to_coord(const Index& xi);

/// e^{2 pi i theta}, reducing theta mod 1 first so large phases stay accurate.
Complex unimodular(double theta);

std::string format_index(const Index& v, int dim);
std::string format_coord(const Coord& v, int dim);

}  // namespace torusfio
