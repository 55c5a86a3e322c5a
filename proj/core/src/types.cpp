#include "torusfio/types.hpp"

#include <cmath>
#include <cstdio>

namespace torusfio {

double bracket(const Index& xi, int dim) {
  double s = 1.0;
  for (int j = 0; j < dim; ++j) s += static_cast<double>(xi[j]) * xi[j];
  return std::sqrt(s);
}

double bracket(const Coord& xi, int dim) {
  double s = 1.0;
  for (int j = 0; j < dim; ++j) s += xi[j] * xi[j];
  return std::sqrt(s);
}

double euclidean_norm(const Coord& v, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) s += v[j] * v[j];
  return std::sqrt(s);
}

double euclidean_norm(const Index& v, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) s += static_cast<double>(v[j]) * v[j];
  return std::sqrt(s);
}

double dot(const Coord& a, const Coord& b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) s += a[j] * b[j];
  return s;
}

double dot(const Coord& a, const Index& b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) s += a[j] * b[j];
  return s;
}

int total_order(const Index& alpha, int dim) {
  int s = 0;
  for (int j = 0; j < dim; ++j) s += alpha[j];
  return s;
}

Coord to_coord(const Index& xi) {
  return {static_cast<double>(xi[0]), static_cast<double>(xi[1]), static_cast<double>(xi[2])};
}

Complex unimodular(double theta) {
  const double frac = theta - std::floor(theta);
  return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

std::string format_index(const Index& v, int dim) {
  std::string out = "(";
  for (int j = 0; j < dim; ++j) {
    if (j) out += ",";
    out += std::to_string(v[j]);
  }
  return out + ")";
}

std::string format_coord(const Coord& v, int dim) {
  std::string out = "(";
  char buf[32];
  for (int j = 0; j < dim; ++j) {
    if (j) out += ",";
    std::snprintf(buf, sizeof(buf), "%.6g", v[j]);
    out += buf;
  }
  return out + ")";
}

}  // namespace torusfio
