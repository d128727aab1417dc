// fplab/core.hpp
//
// Ambient-space primitives: dense real vectors, the two norms used across
// the toolkit (Euclidean and sup), affine combinations, and residual values.
// All arithmetic is IEEE double. Vectors reject NaN/Inf at construction, so
// non-finite values can only appear inside solver loops, where the solvers
// test for them explicitly and abort with a diagnostic.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fplab {

enum class NormKind { EuclideanL2, SupLinf };

inline const char* to_string(NormKind kind) {
  return kind == NormKind::EuclideanL2 ? "l2" : "linf";
}

inline bool all_finite(const std::vector<double>& coords) {
  for (double v : coords) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Norm of a raw coordinate buffer. Solvers iterate on raw buffers and only
// wrap endpoints into RealVector, so the buffer-level helpers are the
// workhorses; the RealVector overloads below defer to them.
inline double norm_of(const std::vector<double>& coords, NormKind kind) {
  if (kind == NormKind::EuclideanL2) {
    double sum = 0.0;
    for (double v : coords) sum += v * v;
    return std::sqrt(sum);
  }
  double worst = 0.0;
  for (double v : coords) worst = std::max(worst, std::abs(v));
  return worst;
}

inline double distance_of(const std::vector<double>& a, const std::vector<double>& b,
                          NormKind kind) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distance_of: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
  }
  if (kind == NormKind::EuclideanL2) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      sum += d * d;
    }
    return std::sqrt(sum);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

// out = lambda*a + (1-lambda)*b, written coordinatewise into a caller buffer.
inline void combine_into(const std::vector<double>& a, const std::vector<double>& b,
                         double lambda, std::vector<double>& out) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("combine: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  out.resize(a.size());
  const double mu = 1.0 - lambda;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = lambda * a[i] + mu * b[i];
}

// A point of R^d with d >= 1 and all coordinates finite.
class RealVector {
 public:
  explicit RealVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("RealVector: dim must be >= 1");
    if (!all_finite(coords_)) {
      throw std::invalid_argument("RealVector: non-finite coordinate rejected");
    }
  }

  static RealVector zeros(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("RealVector: dim must be >= 1");
    return RealVector(std::vector<double>(dim, 0.0));
  }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_.at(i); }
  const std::vector<double>& coords() const { return coords_; }

  bool operator==(const RealVector& other) const { return coords_ == other.coords_; }

 private:
  std::vector<double> coords_;
};

inline double norm(const RealVector& v, NormKind kind) { return norm_of(v.coords(), kind); }

inline double distance(const RealVector& a, const RealVector& b, NormKind kind) {
  return distance_of(a.coords(), b.coords(), kind);
}

inline RealVector combine(const RealVector& a, const RealVector& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("combine: lambda must lie in [0,1]");
  }
  std::vector<double> out;
  combine_into(a.coords(), b.coords(), lambda, out);
  return RealVector(std::move(out));
}

// ||T(x) - x|| for a cached image tx = T(x); see oracle.hpp for the
// counter-aware wrapper. Kept as a distinct type so call sites cannot
// confuse residual magnitudes with distances to a fixed point.
struct Residual {
  double value = 0.0;
};

}  // namespace fplab
