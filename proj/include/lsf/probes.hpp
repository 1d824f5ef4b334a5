#pragma once

// Parameter sweeps probing lower semi-continuity of the dimension.

#include "lsf/measure.hpp"

namespace lsf
{

struct DimensionProbeRow
{
  double t = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double capacity = 0.0;
  std::uint64_t N = 0;
};

struct DimensionProbe
{
  double t_star = 0.0;
  double radius = 0.0;
  int n = 0;
  int level = 0;
  double slack = 1.0;        // contraction-constant slack factor used
  std::vector<DimensionProbeRow> rows;
  std::vector<double> skipped;
  double lower_star = 0.0;
  double width_star = 0.0;   // bracket width at t*
  double tolerance = 0.0;    // allowed dip below lower_star
  double min_lower = 0.0;
  bool pass = false;
};

/// Lower dimension bounds along a symmetric grid around t*; asserts
/// min lower(t) >= lower(t*) - tolerance (tolerance < 0 selects the bracket
/// width at t*).
inline DimensionProbe dimension_semicontinuity_probe(FamilySpec const &family, double t_star,
                                                     double radius, int steps, int n, int level,
                                                     double tolerance = -1.0,
                                                     double slack = 1.0)
{
  if (steps < 1)
    throw domain_error("probe needs at least one step");
  if (!family.in_domain(t_star))
    throw domain_error("t* outside the family domain");
  DimensionProbe pr;
  pr.t_star = t_star;
  pr.radius = radius;
  pr.n = n;
  pr.level = level;
  pr.slack = slack;

  auto const star = hdim_bracket(family.at(t_star).system(), n, slack);
  pr.lower_star = star.bracket.lower;
  pr.width_star = star.bracket.upper - star.bracket.lower;
  pr.tolerance = tolerance < 0.0 ? pr.width_star : tolerance;
  pr.min_lower = std::numeric_limits<double>::infinity();
  int const j1 = std::max(3, level - 2);
  for (int i = 0; i < steps; ++i)
  {
    double const t = steps == 1 ? t_star : t_star - radius + 2.0 * radius * i / (steps - 1);
    if (!family.in_domain(t))
    {
      pr.skipped.push_back(t);
      continue;
    }
    auto const F = family.at(t).system();
    auto const h = hdim_bracket(F, n, slack);
    GridSet const shape(F.dim(), level, {});
    auto const att = attractor(F, 2.0 * shape.diagonal(), level);
    auto const cap = limit_capacity(att.grid, 2, j1);
    pr.rows.push_back({t, h.bracket.lower, h.bracket.upper, cap.slope, h.bracket.N});
    pr.min_lower = std::min(pr.min_lower, h.bracket.lower);
  }
  pr.pass = pr.min_lower >= pr.lower_star - pr.tolerance;
  return pr;
}

} // namespace lsf
