#pragma once

// Built-in one-parameter families on a natural interval, conjugated into the
// normalized ball [-1, 1], plus the rational-parameter classifier.

#include "lsf/ifs.hpp"

#include <map>
#include <numeric>
#include <string>

namespace lsf
{

/// Affine change of coordinates between a natural interval [lo, hi] and the
/// normalized ball [-1, 1] (1-D families). Custom systems use the identity.
struct Frame
{
  double lo = -1.0;
  double hi = 1.0;

  double scale() const { return 0.5 * (hi - lo); }
  double to_normalized(double x) const { return 2.0 * (x - lo) / (hi - lo) - 1.0; }
  double to_natural(double y) const { return lo + scale() * (y + 1.0); }
  double length_to_natural(double len) const { return len * scale(); }
  double measure_to_natural(double vol, int dim = 1) const
  {
    return vol * std::pow(scale(), dim);
  }
  bool is_identity() const { return lo == -1.0 && hi == 1.0; }
};

/// Conjugates the natural-frame map x -> s*x + d into the normalized frame.
inline ContractionMap conjugate_affine_1d(double s, double d, Frame const &fr)
{
  double const shift = s - 1.0 + 2.0 * (s * fr.lo + d - fr.lo) / (fr.hi - fr.lo);
  return ContractionMap::affine(Mat::Constant(1, 1, s), make_vec({shift}));
}

inline Frame unit_frame() { return {0.0, 1.0}; }

/// F_t: x/3, (x+t)/3, (x+1)/3 on [0,1]. The interesting range is [0, 1/2]; t up
/// to 1 is admitted so probes can straddle t = 1/2 (F_t and F_{1-t} are
/// conjugate by x -> 1 - x followed by a shift of the attractor).
inline System make_three_branch(double t)
{
  if (!(t >= 0.0 && t <= 1.0))
    throw domain_error("three_branch parameter t must lie in [0, 1], got " +
                       std::to_string(t));
  auto const fr = unit_frame();
  return System(1, {conjugate_affine_1d(1.0 / 3, 0.0, fr),
                    conjugate_affine_1d(1.0 / 3, t / 3, fr),
                    conjugate_affine_1d(1.0 / 3, 1.0 / 3, fr)});
}

/// G_lambda: lambda x, lambda (x+1), lambda (x+3) on [0,1]; the last image
/// reaches 4 lambda, so containment is certified only for lambda <= 1/4.
inline System make_g_lambda(double lambda)
{
  if (!(lambda > 0.0 && lambda <= 0.25))
    throw domain_error("g_lambda parameter must lie in (0, 1/4]; larger values "
                       "send [0,1] outside itself (lambda(x+3) > 1), got " +
                       std::to_string(lambda));
  auto const fr = unit_frame();
  return System(1, {conjugate_affine_1d(lambda, 0.0, fr),
                    conjugate_affine_1d(lambda, lambda, fr),
                    conjugate_affine_1d(lambda, 3.0 * lambda, fr)});
}

/// Middle-thirds Cantor system x/3, (x+2)/3 on [0,1].
inline System make_cantor()
{
  auto const fr = unit_frame();
  return System(1, {conjugate_affine_1d(1.0 / 3, 0.0, fr),
                    conjugate_affine_1d(1.0 / 3, 2.0 / 3, fr)});
}

/// x/2, (x+1)/2 on [0,1]: two halves tiling the interval.
inline System make_full_interval()
{
  auto const fr = unit_frame();
  return System(1, {conjugate_affine_1d(0.5, 0.0, fr),
                    conjugate_affine_1d(0.5, 0.5, fr)});
}

struct FamilySpec
{
  std::string name = "three_branch";
  std::map<std::string, double> params;
  std::optional<System> custom;  // only for name == "custom"

  /// Name of the swept parameter, empty for constant families.
  std::string parameter() const
  {
    if (name == "three_branch")
      return "t";
    if (name == "g_lambda")
      return "lambda";
    return {};
  }

  Frame frame() const
  {
    if (name == "custom")
      return {};
    return unit_frame();
  }

  bool in_domain(double p) const
  {
    if (name == "three_branch")
      return p >= 0.0 && p <= 1.0;
    if (name == "g_lambda")
      return p > 0.0 && p <= 0.25;
    return true;
  }

  double value() const
  {
    auto const key = parameter();
    if (key.empty())
      return 0.0;
    auto it = params.find(key);
    if (it == params.end())
      throw domain_error("family " + name + " needs parameter " + key);
    return it->second;
  }

  FamilySpec at(double p) const
  {
    FamilySpec s = *this;
    if (!parameter().empty())
      s.params[parameter()] = p;
    return s;
  }

  System system() const
  {
    if (name == "three_branch")
      return make_three_branch(value());
    if (name == "g_lambda")
      return make_g_lambda(value());
    if (name == "cantor")
      return make_cantor();
    if (name == "full_interval")
      return make_full_interval();
    if (name == "custom")
    {
      if (!custom)
        throw domain_error("custom family without a system");
      return *custom;
    }
    throw domain_error("unknown family '" + name + "'");
  }
};

inline FamilySpec three_branch_family(double t) { return {"three_branch", {{"t", t}}, {}}; }
inline FamilySpec g_lambda_family(double l) { return {"g_lambda", {{"lambda", l}}, {}}; }
inline FamilySpec cantor_family() { return {"cantor", {}, {}}; }
inline FamilySpec full_interval_family() { return {"full_interval", {}, {}}; }
inline FamilySpec custom_family(System F) { return {"custom", {}, std::move(F)}; }

enum class RationalCase
{
  full_measure,
  dimension_deficit
};

struct RationalClass
{
  RationalCase label;
  long p = 0;  // lowest terms
  long q = 1;
  double measure = 0.0;  // 1/q for full_measure, 0 otherwise

  std::string name() const
  {
    return label == RationalCase::full_measure
               ? "FULL_MEASURE(1/" + std::to_string(q) + ")"
               : "DIMENSION_DEFICIT";
  }
};

/// t = p/q, reduced first: pq mod 3 == 2 gives measure 1/q, otherwise the
/// attractor has dimension below one.
inline RationalClass classify_rational(long p, long q)
{
  if (q <= 0)
    throw domain_error("denominator must be positive");
  if (p < 0 || 2 * p > q)
    throw domain_error("t = p/q must lie in [0, 1/2]");
  long const g = std::gcd(p, q);
  RationalClass c{RationalCase::dimension_deficit, p / g, q / g, 0.0};
  if ((c.p * c.q) % 3 == 2)
  {
    c.label = RationalCase::full_measure;
    c.measure = 1.0 / double(c.q);
  }
  return c;
}

} // namespace lsf
