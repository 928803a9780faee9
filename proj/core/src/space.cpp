#include "obtune/space.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "obtune/hash.hpp"

namespace obtune {

const char* to_string(ParamKind kind) {
  return kind == ParamKind::Continuous ? "continuous" : "integer";
}

CostFunction CostFunction::zero() { return CostFunction(); }

CostFunction CostFunction::linear_normalized(double lower, double upper) {
  if (!(lower < upper))
    throw std::invalid_argument("cost range: lower must be < upper");
  CostFunction c;
  c.kind_ = Kind::LinearNormalized;
  c.lower_ = lower;
  c.upper_ = upper;
  return c;
}

CostFunction CostFunction::table(
    std::vector<std::pair<double, double>> points) {
  if (points.empty())
    throw std::invalid_argument("cost table must not be empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second < 0.0 || points[i].second > 1.0)
      throw std::invalid_argument("cost table: costs must lie in [0, 1]");
    if (i > 0 && !(points[i - 1].first < points[i].first))
      throw std::invalid_argument(
          "cost table: values must be strictly increasing");
  }
  CostFunction c;
  c.kind_ = Kind::Table;
  c.points_ = std::move(points);
  return c;
}

double CostFunction::operator()(double native_value) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::LinearNormalized: {
      const double u = (native_value - lower_) / (upper_ - lower_);
      return clamp01(u);
    }
    case Kind::Table: {
      if (native_value <= points_.front().first)
        return points_.front().second;
      if (native_value >= points_.back().first) return points_.back().second;
      for (std::size_t i = 1; i < points_.size(); ++i) {
        if (native_value <= points_[i].first) {
          const auto& [x0, y0] = points_[i - 1];
          const auto& [x1, y1] = points_[i];
          const double t = (native_value - x0) / (x1 - x0);
          return y0 + t * (y1 - y0);
        }
      }
      return points_.back().second;
    }
  }
  return 0.0;
}

namespace {

bool is_whole(double v) { return std::floor(v) == v; }

void validate_spec(const ParamSpec& p) {
  if (p.name.empty())
    throw std::invalid_argument("parameter name must not be empty");
  if (!std::isfinite(p.lower) || !std::isfinite(p.upper))
    throw std::invalid_argument("parameter '" + p.name +
                                "': bounds must be finite");
  if (!(p.lower < p.upper))
    throw std::invalid_argument("parameter '" + p.name +
                                "': lower must be < upper");
  if (p.kind == ParamKind::Integer) {
    if (!is_whole(p.lower) || !is_whole(p.upper))
      throw std::invalid_argument("parameter '" + p.name +
                                  "': integer bounds must be whole numbers");
    if (p.upper - p.lower < 1.0)
      throw std::invalid_argument("parameter '" + p.name +
                                  "': integer range must span at least 1");
  }
}

}  // namespace

HyperParamSpace::HyperParamSpace(std::vector<ParamSpec> params)
    : params_(std::move(params)) {
  if (params_.empty())
    throw std::invalid_argument("a space needs at least one parameter");
  std::unordered_set<std::string> names;
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const ParamSpec& p : params_) {
    validate_spec(p);
    if (!names.insert(p.name).second)
      throw std::invalid_argument("duplicate parameter name '" + p.name + "'");
    h = fnv1a64(p.name, h);
    h = fnv1a64_u64(p.kind == ParamKind::Integer ? 1 : 0, h);
    h = fnv1a64_double(p.lower, h);
    h = fnv1a64_double(p.upper, h);
  }
  digest_ = h;
}

bool HyperParamSpace::contains(const HyperParamVector& hp) const {
  if (hp.size() != params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const ParamSpec& p = params_[i];
    const double v = hp[i];
    if (!std::isfinite(v) || v < p.lower || v > p.upper) return false;
    if (p.kind == ParamKind::Integer && !is_whole(v)) return false;
  }
  return true;
}

void HyperParamSpace::require_valid(const HyperParamVector& hp) const {
  if (hp.size() != params_.size())
    throw std::invalid_argument("vector has " + std::to_string(hp.size()) +
                                " values, space has " +
                                std::to_string(params_.size()));
  if (!contains(hp))
    throw std::invalid_argument("vector lies outside the parameter space");
}

HyperParamVector HyperParamSpace::sample(SplitMix64& rng) const {
  std::vector<double> values(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const ParamSpec& p = params_[i];
    if (p.kind == ParamKind::Integer) {
      values[i] = static_cast<double>(
          rng.next_int(static_cast<std::int64_t>(p.lower),
                       static_cast<std::int64_t>(p.upper)));
    } else {
      values[i] = denormalize_coord(i, rng.next_double());
    }
  }
  return HyperParamVector(std::move(values));
}

double HyperParamSpace::denormalize_coord(std::size_t i, double unit) const {
  const ParamSpec& p = params_[i];
  if (std::isnan(unit))
    throw std::invalid_argument("parameter '" + p.name +
                                "': normalized value is NaN");
  const double u = clamp01(unit);
  if (u == 0.0) return p.lower;
  if (u == 1.0) return p.upper;
  double native = p.lower + u * p.span();
  if (p.kind == ParamKind::Integer) {
    // ties round up
    native = std::floor(native + 0.5);
    if (native < p.lower) native = p.lower;
    if (native > p.upper) native = p.upper;
  }
  return native;
}

double HyperParamSpace::normalize_coord(std::size_t i, double native) const {
  const ParamSpec& p = params_[i];
  const double span = p.span();
  double u = clamp01((native - p.lower) / span);
  if (p.kind == ParamKind::Integer) return u;
  if (u == 0.0 || u == 1.0) return u;
  // Snap to an exact preimage of `native` under denormalize_coord when one
  // is within a few ulps, so normalize/denormalize round-trips bit-for-bit.
  // Every value this library produces is in the image of denormalize_coord;
  // foreign values land within one ulp.
  double mapped = p.lower + u * span;
  for (int step = 0; step < 8 && mapped != native; ++step) {
    const double next = std::nextafter(u, mapped < native ? 2.0 : -1.0);
    if (next < 0.0 || next > 1.0) break;
    const double next_mapped = p.lower + next * span;
    if (std::abs(next_mapped - native) > std::abs(mapped - native)) break;
    u = next;
    mapped = next_mapped;
  }
  return u;
}

std::vector<double> HyperParamSpace::normalize(
    const HyperParamVector& hp) const {
  require_valid(hp);
  std::vector<double> unit(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i)
    unit[i] = normalize_coord(i, hp[i]);
  return unit;
}

HyperParamVector HyperParamSpace::denormalize(
    const std::vector<double>& unit) const {
  if (unit.size() != params_.size())
    throw std::invalid_argument("normalized vector has wrong length");
  std::vector<double> values(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i)
    values[i] = denormalize_coord(i, unit[i]);
  return HyperParamVector(std::move(values));
}

}  // namespace obtune
