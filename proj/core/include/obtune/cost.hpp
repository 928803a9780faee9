#pragma once

#include <utility>
#include <vector>

namespace obtune {

// Per-parameter computational-cost penalty. Maps a native parameter value to
// a cost in [0, 1]; the cost-based selector discounts a proposal's quality
// gain by (1 - cost).
class CostFunction {
public:
  enum class Kind { Zero, LinearNormalized, Table };

  // cost == 0 everywhere; makes cost-based selection behave like the basic one
  static CostFunction zero();

  // cost == position of the value inside [lower, upper], clamped
  static CostFunction linear_normalized(double lower, double upper);

  // piecewise-linear interpolation over (value, cost) points; outside the
  // table the nearest endpoint's cost holds. Points must be strictly
  // increasing in value with costs in [0, 1].
  static CostFunction table(std::vector<std::pair<double, double>> points);

  double operator()(double native_value) const;

  Kind kind() const { return kind_; }
  const std::vector<std::pair<double, double>>& points() const {
    return points_;
  }

private:
  CostFunction() = default;

  Kind kind_ = Kind::Zero;
  double lower_ = 0.0;
  double upper_ = 1.0;
  std::vector<std::pair<double, double>> points_;
};

}  // namespace obtune
