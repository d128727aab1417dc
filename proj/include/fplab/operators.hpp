// fplab/operators.hpp
//
// The benchmark operator zoo: closed-form maps T : R^d -> R^d used by the
// solvers and property checkers, plus combinators (composition, pointwise
// sum, projected forward step) and a deterministic domain sampler. Every
// spec carries its dimension, the norm it is meant to be measured in, and,
// when known, its Lipschitz constant and domain diameter.

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "fplab/core.hpp"

namespace fplab {

// ---------------------------------------------------------------------------
// Regions (domains for projections and samplers).

struct BoxRegion {
  double lo = -1.0;
  double hi = 1.0;  // the box [lo, hi]^d
};

struct BallRegion {
  double radius = 1.0;  // Euclidean ball of this radius centered at the origin
};

using Region = std::variant<BoxRegion, BallRegion>;

// ---------------------------------------------------------------------------
// Operator variants.

class OperatorSpec;

struct IdentityOp {};

// T(x) = gamma * x. gamma = 0 gives the zero operator.
struct LinearScaleOp {
  double gamma = 1.0;
};

// T(x) = scale * x + offset (offset empty means zero).
struct AffineOp {
  double scale = 1.0;
  std::vector<double> offset;
};

// The rotation-like hard instance: coordinate 1 is s - gamma*x^(d), and
// coordinate i in {2..d} is gamma*x^(i-1) (a scaled cyclic shift). The
// `literal` flag instead feeds gamma*x^(d-1) to every coordinate i >= 2,
// which collapses the map to rank two; it exists only for side-by-side
// comparison and is not used by any preset.
struct RotationHardOp {
  double gamma = 1.0;
  double s = 0.0;
  bool literal = false;
};

// Coordinatewise piecewise-affine expansion: slope gamma > 1 on |x| <= 1-c,
// slope 1 outside, glued continuously (the outer branch carries a sign(x)
// correction so the negative knot matches too).
struct PiecewiseScaleOp {
  double gamma = 1.01;
  double c = 0.5;
};

// Coordinatewise even function f(x) = g(|x|) with g(t) = m_near*t on t <= 1
// and g(t) = m_near + m_far*(t-1) beyond; odd parity applies sign(x)*g(|x|).
struct PiecewiseSlopeOp {
  double m_near = 1.0;
  double m_far = 1.0;
  bool even_parity = true;
};

// P(x) = x / max{1, ||x||_2}: projection onto the unit Euclidean ball.
struct BallProjectionOp {};

// Coordinatewise clip onto [lo, hi]^d.
struct BoxProjectionOp {
  double lo = -1.0;
  double hi = 1.0;
};

// t(x) = clip(x + e^{alpha*x/D}, -D/2, D/2), coordinatewise; measured in the
// sup norm. Expansive near the lower face, but the expansion factor decays
// with the residual, which is exactly the gradual-expansion property the
// checkers certify.
struct ExpShiftOp {
  double alpha = 0.4;
  double D = 2.0;
};

// Composition; parts are applied right-to-left (last element innermost).
// One oracle query covers the whole composite.
struct ComposeOp {
  std::vector<OperatorSpec> parts;
};

// Pointwise sum of parts; like ComposeOp, one query per evaluation.
struct SumOp {
  std::vector<OperatorSpec> parts;
};

// T(x) = Proj_region(x - F(x)): the natural-residual map of a field F.
struct ProjectedForwardStepOp {
  std::shared_ptr<const OperatorSpec> field;
  Region region;
};

using OperatorVariant =
    std::variant<IdentityOp, LinearScaleOp, AffineOp, RotationHardOp, PiecewiseScaleOp,
                 PiecewiseSlopeOp, BallProjectionOp, BoxProjectionOp, ExpShiftOp, ComposeOp,
                 SumOp, ProjectedForwardStepOp>;

// An immutable operator description: the variant plus dimension, measurement
// norm, and optional metadata (known Lipschitz constant, domain diameter).
class OperatorSpec {
 public:
  OperatorSpec(OperatorVariant variant, std::size_t dim, NormKind norm, std::string label,
               std::optional<double> gamma_known = std::nullopt,
               std::optional<double> diameter = std::nullopt)
      : variant_(std::move(variant)),
        dim_(dim),
        norm_(norm),
        label_(std::move(label)),
        gamma_known_(gamma_known),
        diameter_(diameter) {
    if (dim_ == 0) throw std::invalid_argument("OperatorSpec: dim must be >= 1");
  }

  const OperatorVariant& variant() const { return variant_; }
  std::size_t dim() const { return dim_; }
  NormKind norm() const { return norm_; }
  const std::string& label() const { return label_; }
  std::optional<double> gamma_known() const { return gamma_known_; }
  std::optional<double> diameter() const { return diameter_; }

 private:
  OperatorVariant variant_;
  std::size_t dim_;
  NormKind norm_;
  std::string label_;
  std::optional<double> gamma_known_;
  std::optional<double> diameter_;
};

// ---------------------------------------------------------------------------
// Evaluation kernel (raw buffers; query counting lives in oracle.hpp).

namespace detail {

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

inline void project_region(const Region& region, std::vector<double>& x) {
  if (const auto* box = std::get_if<BoxRegion>(&region)) {
    for (double& v : x) v = std::min(std::max(v, box->lo), box->hi);
    return;
  }
  const auto& ball = std::get<BallRegion>(region);
  const double r = norm_of(x, NormKind::EuclideanL2);
  if (r > ball.radius) {
    const double scale = ball.radius / r;
    for (double& v : x) v *= scale;
  }
}

}  // namespace detail

inline void apply_operator(const OperatorSpec& spec, const std::vector<double>& in,
                           std::vector<double>& out);

namespace detail {

struct ApplyVisitor {
  const OperatorSpec& spec;
  const std::vector<double>& in;
  std::vector<double>& out;

  void operator()(const IdentityOp&) const { out = in; }

  void operator()(const LinearScaleOp& op) const {
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = op.gamma * in[i];
  }

  void operator()(const AffineOp& op) const {
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      out[i] = op.scale * in[i] + (op.offset.empty() ? 0.0 : op.offset[i]);
    }
  }

  void operator()(const RotationHardOp& op) const {
    const std::size_t d = in.size();
    out.resize(d);
    std::vector<double> tmp;
    const std::vector<double>* src = &in;
    if (&in == &out) {  // aliasing guard: the shift reads every input slot
      tmp = in;
      src = &tmp;
    }
    out[0] = op.s - op.gamma * (*src)[d - 1];
    if (op.literal) {
      for (std::size_t i = 1; i < d; ++i) out[i] = op.gamma * (*src)[d - 2];
    } else {
      for (std::size_t i = d; i-- > 1;) out[i] = op.gamma * (*src)[i - 1];
    }
  }

  void operator()(const PiecewiseScaleOp& op) const {
    const double knee = 1.0 - op.c;
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double v = in[i];
      out[i] = std::abs(v) <= knee ? op.gamma * v : v + sign_of(v) * (op.gamma - 1.0) * knee;
    }
  }

  void operator()(const PiecewiseSlopeOp& op) const {
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double t = std::abs(in[i]);
      const double g = t <= 1.0 ? op.m_near * t : op.m_near + op.m_far * (t - 1.0);
      out[i] = op.even_parity ? g : sign_of(in[i]) * g;
    }
  }

  void operator()(const BallProjectionOp&) const {
    out = in;
    project_region(BallRegion{1.0}, out);
  }

  void operator()(const BoxProjectionOp& op) const {
    out = in;
    project_region(BoxRegion{op.lo, op.hi}, out);
  }

  void operator()(const ExpShiftOp& op) const {
    const double half = op.D / 2.0;
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double v = in[i] + std::exp(op.alpha * in[i] / op.D);
      out[i] = std::min(std::max(v, -half), half);
    }
  }

  void operator()(const ComposeOp& op) const {
    std::vector<double> cur = in;
    std::vector<double> next;
    for (std::size_t i = op.parts.size(); i-- > 0;) {  // rightmost part first
      apply_operator(op.parts[i], cur, next);
      cur.swap(next);
    }
    out = std::move(cur);
  }

  void operator()(const SumOp& op) const {
    out.assign(in.size(), 0.0);
    std::vector<double> part;
    for (const OperatorSpec& p : op.parts) {
      apply_operator(p, in, part);
      for (std::size_t i = 0; i < in.size(); ++i) out[i] += part[i];
    }
  }

  void operator()(const ProjectedForwardStepOp& op) const {
    std::vector<double> f;
    apply_operator(*op.field, in, f);
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] - f[i];
    project_region(op.region, out);
  }
};

}  // namespace detail

inline void apply_operator(const OperatorSpec& spec, const std::vector<double>& in,
                           std::vector<double>& out) {
  if (in.size() != spec.dim()) {
    throw std::invalid_argument("apply_operator: input dim " + std::to_string(in.size()) +
                                " does not match operator dim " + std::to_string(spec.dim()));
  }
  std::visit(detail::ApplyVisitor{spec, in, out}, spec.variant());
}

// ---------------------------------------------------------------------------
// Constructors. Each validates its parameters and fills in metadata.

inline OperatorSpec make_identity(std::size_t d, NormKind norm = NormKind::EuclideanL2) {
  return OperatorSpec(IdentityOp{}, d, norm, "identity", 1.0);
}

inline OperatorSpec make_linear_scale(double gamma, std::size_t d,
                                      NormKind norm = NormKind::EuclideanL2) {
  if (!std::isfinite(gamma)) throw std::invalid_argument("linear_scale: gamma must be finite");
  return OperatorSpec(LinearScaleOp{gamma}, d, norm, "linear_scale", std::abs(gamma));
}

inline OperatorSpec make_affine(double scale, std::vector<double> offset, std::size_t d,
                                NormKind norm = NormKind::EuclideanL2) {
  if (!offset.empty() && offset.size() != d) {
    throw std::invalid_argument("affine: offset length must be 0 or d");
  }
  if (!all_finite(offset) || !std::isfinite(scale)) {
    throw std::invalid_argument("affine: non-finite parameter");
  }
  return OperatorSpec(AffineOp{scale, std::move(offset)}, d, norm, "affine", std::abs(scale));
}

// The published shift choices for the rotation instance: s = 2 for
// contractive gamma, s = 2/sqrt(d) at gamma = 1.
inline double rotation_default_shift(std::size_t d, double gamma) {
  return gamma < 1.0 ? 2.0 : 2.0 / std::sqrt(static_cast<double>(d));
}

inline OperatorSpec make_rotation_hard(std::size_t d, double gamma,
                                       std::optional<double> s = std::nullopt,
                                       bool literal = false) {
  if (d < 2) throw std::invalid_argument("rotation_hard: d must be >= 2");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("rotation_hard: gamma must lie in (0,1]");
  }
  const double shift = s.value_or(rotation_default_shift(d, gamma));
  return OperatorSpec(RotationHardOp{gamma, shift, literal}, d, NormKind::EuclideanL2,
                      "rotation_hard", gamma);
}

// Fixed point of the (cyclic-shift) rotation instance:
//   x*_i = s * gamma^{i-1} / (1 + gamma^d),  i = 1..d.
inline RealVector rotation_hard_fixed_point(std::size_t d, double gamma, double s) {
  std::vector<double> x(d);
  const double denom = 1.0 + std::pow(gamma, static_cast<double>(d));
  double pow_g = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    x[i] = s * pow_g / denom;
    pow_g *= gamma;
  }
  return RealVector(std::move(x));
}

inline OperatorSpec make_piecewise_scale(double gamma, double c, std::size_t d,
                                         NormKind norm = NormKind::EuclideanL2) {
  if (!(gamma > 1.0)) {
    throw std::invalid_argument("piecewise_scale: gamma must be > 1 (use linear_scale otherwise)");
  }
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("piecewise_scale: c must lie in [0,1]");
  return OperatorSpec(PiecewiseScaleOp{gamma, c}, d, norm, "piecewise_scale", gamma);
}

inline OperatorSpec make_piecewise_slope(double m_near, double m_far, std::size_t d,
                                         bool even_parity = true,
                                         NormKind norm = NormKind::EuclideanL2) {
  if (!(m_near > 0.0 && m_near <= 1.0 && m_far > 0.0 && m_far <= 1.0)) {
    throw std::invalid_argument("piecewise_slope: slopes must lie in (0,1]");
  }
  return OperatorSpec(PiecewiseSlopeOp{m_near, m_far, even_parity}, d, norm, "piecewise_slope",
                      std::max(m_near, m_far));
}

inline OperatorSpec make_ball_projection(std::size_t d) {
  return OperatorSpec(BallProjectionOp{}, d, NormKind::EuclideanL2, "ball_projection", 1.0, 2.0);
}

inline OperatorSpec make_box_projection(double lo, double hi, std::size_t d,
                                        NormKind norm = NormKind::EuclideanL2) {
  if (!(lo < hi)) throw std::invalid_argument("box_projection: requires lo < hi");
  return OperatorSpec(BoxProjectionOp{lo, hi}, d, norm, "box_projection", 1.0);
}

inline OperatorSpec make_exp_shift(double alpha, double D, std::size_t d) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("exp_shift: alpha must lie in [0,1)");
  }
  if (!(D > 0.0)) throw std::invalid_argument("exp_shift: D must be > 0");
  return OperatorSpec(ExpShiftOp{alpha, D}, d, NormKind::SupLinf, "exp_shift", std::nullopt, D);
}

inline OperatorSpec make_compose(std::vector<OperatorSpec> parts) {
  if (parts.empty()) throw std::invalid_argument("compose: needs at least one part");
  const std::size_t d = parts.front().dim();
  std::optional<double> gamma = 1.0;
  for (const OperatorSpec& p : parts) {
    if (p.dim() != d) throw std::invalid_argument("compose: parts disagree on dim");
    if (gamma && p.gamma_known()) {
      *gamma *= *p.gamma_known();
    } else {
      gamma.reset();
    }
  }
  const NormKind norm = parts.front().norm();
  return OperatorSpec(ComposeOp{std::move(parts)}, d, norm, "compose", gamma);
}

inline OperatorSpec make_sum(std::vector<OperatorSpec> parts) {
  if (parts.empty()) throw std::invalid_argument("sum: needs at least one part");
  const std::size_t d = parts.front().dim();
  std::optional<double> gamma = 0.0;
  for (const OperatorSpec& p : parts) {
    if (p.dim() != d) throw std::invalid_argument("sum: parts disagree on dim");
    if (gamma && p.gamma_known()) {
      *gamma += *p.gamma_known();
    } else {
      gamma.reset();
    }
  }
  const NormKind norm = parts.front().norm();
  return OperatorSpec(SumOp{std::move(parts)}, d, norm, "sum", gamma);
}

// Same operator under a different display label (used to give composites a
// stable name in trace files).
inline OperatorSpec relabel(const OperatorSpec& spec, std::string label) {
  return OperatorSpec(spec.variant(), spec.dim(), spec.norm(), std::move(label),
                      spec.gamma_known(), spec.diameter());
}

// Nonexpansive rotation composed with the coordinatewise slope map (slope
// applied first, rotation last).
inline OperatorSpec make_rotation_slope(std::size_t d, double m_near, double m_far,
                                        std::optional<double> s = std::nullopt) {
  OperatorSpec rot = make_rotation_hard(d, 1.0, s);
  OperatorSpec slope = make_piecewise_slope(m_near, m_far, d);
  return relabel(make_compose({std::move(rot), std::move(slope)}), "rotation_slope");
}

// Unit-ball projection of the rotation applied to the mildly expansive
// coordinatewise scale map (scale first, projection last).  The scale map
// only expands, and the other two stages are nonexpansive, so gamma is the
// composite's modulus; the ball gives diameter 2.
inline OperatorSpec make_ball_rotation_scale(std::size_t d, double gamma, double c,
                                             std::optional<double> s = std::nullopt) {
  OperatorSpec proj = make_ball_projection(d);
  OperatorSpec rot = make_rotation_hard(d, 1.0, s);
  OperatorSpec scale = make_piecewise_scale(gamma, c, d);
  OperatorSpec composed = make_compose({std::move(proj), std::move(rot), std::move(scale)});
  return OperatorSpec(composed.variant(), d, NormKind::EuclideanL2, "ball_rotation_scale",
                      gamma, 2.0);
}

inline OperatorSpec make_projected_forward_step(OperatorSpec field, Region region) {
  const std::size_t d = field.dim();
  const NormKind norm = field.norm();
  auto boxed = std::make_shared<const OperatorSpec>(std::move(field));
  return OperatorSpec(ProjectedForwardStepOp{std::move(boxed), region}, d, norm,
                      "projected_forward_step");
}

// ---------------------------------------------------------------------------
// Domain sampler: deterministic uniform draws from a box or ball region.
// Uniform deviates come straight from the mt19937_64 stream ((x >> 11) *
// 2^-53) so the sequence is identical across standard libraries.

class DomainSampler {
 public:
  DomainSampler(Region region, std::size_t dim, std::uint64_t seed)
      : region_(region), dim_(dim), seed_(seed), engine_(seed) {
    if (dim_ == 0) throw std::invalid_argument("DomainSampler: dim must be >= 1");
    if (const auto* box = std::get_if<BoxRegion>(&region_)) {
      if (!(box->lo < box->hi)) throw std::invalid_argument("DomainSampler: requires lo < hi");
    } else if (!(std::get<BallRegion>(region_).radius > 0.0)) {
      throw std::invalid_argument("DomainSampler: ball radius must be > 0");
    }
  }

  std::uint64_t seed() const { return seed_; }
  std::size_t dim() const { return dim_; }
  const Region& region() const { return region_; }

  RealVector sample() {
    std::vector<double> x(dim_);
    if (const auto* box = std::get_if<BoxRegion>(&region_)) {
      for (double& v : x) v = box->lo + (box->hi - box->lo) * next_unit();
      return RealVector(std::move(x));
    }
    const double radius = std::get<BallRegion>(region_).radius;
    // Gaussian direction (Box-Muller) scaled to radius * u^(1/d).
    double nrm2 = 0.0;
    for (std::size_t i = 0; i < dim_; i += 2) {
      const double u1 = std::max(next_unit(), 1e-300);  // keep log finite
      const double u2 = next_unit();
      const double mag = std::sqrt(-2.0 * std::log(u1));
      x[i] = mag * std::cos(2.0 * M_PI * u2);
      if (i + 1 < dim_) x[i + 1] = mag * std::sin(2.0 * M_PI * u2);
    }
    for (double v : x) nrm2 += v * v;
    const double nrm = std::sqrt(std::max(nrm2, 1e-300));
    const double scale =
        radius * std::pow(next_unit(), 1.0 / static_cast<double>(dim_)) / nrm;
    for (double& v : x) v *= scale;
    return RealVector(std::move(x));
  }

 private:
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  Region region_;
  std::size_t dim_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace fplab
