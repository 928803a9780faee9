#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "obtune/experiments.hpp"
#include "obtune/space.hpp"

namespace obtune {

enum class MapperKind { Knn, Linear };

const char* to_string(MapperKind kind);

struct MapperParams {
  std::size_t k = 5;  // knn neighbor count
};

// k-nearest-neighbor regressor. Prediction is the inverse-distance-weighted
// mean of the k nearest targets under Euclidean distance; an exact feature
// match short-circuits to that row's target. Ties on distance keep the
// lower row index.
class KnnModel {
public:
  static constexpr double kDistanceEpsilon = 1e-12;

  // rows must form a nonempty rectangle with k <= row count
  static KnnModel fit(std::vector<std::vector<double>> features,
                      std::vector<double> targets, std::size_t k);

  double predict(const std::vector<double>& query) const;

  std::size_t k() const { return k_; }
  std::size_t rows() const { return targets_.size(); }
  std::size_t dimension() const {
    return features_.empty() ? 0 : features_[0].size();
  }

private:
  std::vector<std::vector<double>> features_;
  std::vector<double> targets_;
  std::size_t k_ = 0;
};

// Ordinary least squares via normal equations. A small ridge term is always
// added to the diagonal, so rank-deficient designs stay solvable; the bias
// it introduces is far below the accuracy anything here needs.
class LinearModel {
public:
  static constexpr double kRidge = 1e-8;

  // needs at least dimension+1 rows
  static LinearModel fit(const std::vector<std::vector<double>>& features,
                         const std::vector<double>& targets);

  double predict(const std::vector<double>& query) const;

  const std::vector<double>& coefficients() const { return coef_; }
  double intercept() const { return intercept_; }

private:
  std::vector<double> coef_;
  double intercept_ = 0.0;
};

namespace detail {

using FittedModel = std::variant<KnnModel, LinearModel>;

double predict_model(const FittedModel& model, const std::vector<double>& q);

FittedModel fit_model(std::vector<std::vector<double>> features,
                      std::vector<double> targets, MapperKind kind,
                      const MapperParams& params);

}  // namespace detail

// map_q: normalized hyper-parameters -> predicted quality, clamped to [0,1].
class QualityMapper {
public:
  double predict(const HyperParamVector& hp) const;
  double predict_unit(const std::vector<double>& unit) const;

  MapperKind kind() const { return kind_; }
  const HyperParamSpace& space() const { return space_; }
  std::uint64_t space_digest() const { return space_.digest(); }
  std::uint64_t log_digest() const { return log_digest_; }
  std::string describe() const;

private:
  friend QualityMapper fit_quality_mapper(const ExperimentLog&, MapperKind,
                                          const MapperParams&);

  QualityMapper(MapperKind kind, detail::FittedModel model,
                HyperParamSpace space, std::uint64_t log_digest)
      : kind_(kind),
        model_(std::move(model)),
        space_(std::move(space)),
        log_digest_(log_digest) {}

  MapperKind kind_;
  detail::FittedModel model_;
  HyperParamSpace space_;
  std::uint64_t log_digest_;
};

// map_i: (other normalized coordinates in ascending index order, quality
// last) -> normalized u_i. Training rows pair recorded coordinates with
// recorded qualities; at query time the caller's target quality substitutes
// for the recorded one.
class ParamMapper {
public:
  // native proposal for coordinate index() given the full current vector
  double propose(const HyperParamVector& current, double q_ex) const;

  // normalized prediction from the n-1 other coordinates plus the quality
  double predict_unit(const std::vector<double>& others_unit,
                      double q_ex) const;

  std::size_t index() const { return index_; }
  MapperKind kind() const { return kind_; }
  const HyperParamSpace& space() const { return space_; }
  std::uint64_t space_digest() const { return space_.digest(); }
  std::uint64_t log_digest() const { return log_digest_; }
  std::string describe() const;

private:
  friend ParamMapper fit_param_mapper(const ExperimentLog&, std::size_t,
                                      MapperKind, const MapperParams&);

  ParamMapper(std::size_t index, MapperKind kind, detail::FittedModel model,
              HyperParamSpace space, std::uint64_t log_digest)
      : index_(index),
        kind_(kind),
        model_(std::move(model)),
        space_(std::move(space)),
        log_digest_(log_digest) {}

  std::size_t index_;
  MapperKind kind_;
  detail::FittedModel model_;
  HyperParamSpace space_;
  std::uint64_t log_digest_;
};

// Both throw InsufficientDataError when the log is smaller than the chosen
// kind's minimum: k records for knn, feature-dimension+1 for linear.
QualityMapper fit_quality_mapper(const ExperimentLog& log, MapperKind kind,
                                 const MapperParams& params = {});
ParamMapper fit_param_mapper(const ExperimentLog& log, std::size_t i,
                             MapperKind kind, const MapperParams& params = {});

}  // namespace obtune
