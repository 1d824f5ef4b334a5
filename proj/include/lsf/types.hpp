#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsf
{

inline constexpr const char *version = "0.3.0";

/// Points and tangent vectors in R^n, n <= 3. Fixed capacity, no heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
/// Square matrices of size n <= 3.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline constexpr int max_dim = 3;

// Tolerance used when deciding whether two computed boundaries coincide.
inline constexpr double touch_tol = 1e-12;

class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// mismatched dimension, representation kind or grid level
class representation_mismatch : public error
{
public:
  using error::error;
};

class domain_error : public error
{
public:
  using error::error;
};

class empty_set_error : public error
{
public:
  using error::error;
};

class resolution_error : public error
{
public:
  resolution_error(std::string const &what, double min_feasible)
      : error(what), min_feasible_(min_feasible)
  {}
  double min_feasible() const { return min_feasible_; }

private:
  double min_feasible_;
};

class singularity_error : public error
{
public:
  using error::error;
};

class cap_error : public error
{
public:
  using error::error;
};

class precondition_error : public error
{
public:
  using error::error;
};

class bracket_degenerate : public error
{
public:
  using error::error;
};

/// A measured length together with an additive error bar.
struct Distance
{
  double value = 0.0;
  double uncertainty = 0.0;

  double upper() const { return value + uncertainty; }
  double lower() const { return value - uncertainty; }
};

inline Vec zero_vec(int dim) { return Vec::Zero(dim); }

inline Vec make_vec(std::initializer_list<double> xs)
{
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs)
    v(i++) = x;
  return v;
}

inline void check_dim(int dim)
{
  if (dim < 1 || dim > max_dim)
    throw domain_error("ambient dimension must be 1, 2 or 3, got " +
                       std::to_string(dim));
}

/// Volume of the closed unit ball in R^n.
inline double unit_ball_volume(int dim)
{
  switch (dim)
  {
  case 1:
    return 2.0;
  case 2:
    return M_PI;
  case 3:
    return 4.0 * M_PI / 3.0;
  }
  check_dim(dim);
  return 0.0;
}

} // namespace lsf
