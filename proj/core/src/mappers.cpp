#include "obtune/mappers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "obtune/errors.hpp"
#include "obtune/hash.hpp"

namespace obtune {

const char* to_string(MapperKind kind) {
  return kind == MapperKind::Knn ? "knn" : "linear";
}

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void require_rectangle(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& targets) {
  if (features.empty() || features.size() != targets.size())
    throw std::invalid_argument("features and targets must align, nonempty");
  const std::size_t dim = features[0].size();
  for (const auto& row : features)
    if (row.size() != dim)
      throw std::invalid_argument("feature rows must share one dimension");
}

}  // namespace

KnnModel KnnModel::fit(std::vector<std::vector<double>> features,
                       std::vector<double> targets, std::size_t k) {
  require_rectangle(features, targets);
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (targets.size() < k) throw InsufficientDataError(targets.size(), k);
  KnnModel m;
  m.features_ = std::move(features);
  m.targets_ = std::move(targets);
  m.k_ = k;
  return m;
}

double KnnModel::predict(const std::vector<double>& query) const {
  if (query.size() != dimension())
    throw std::invalid_argument("query dimension mismatch");

  const std::size_t rows = targets_.size();
  std::vector<std::pair<double, std::size_t>> order(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double d2 = 0.0;
    const std::vector<double>& f = features_[r];
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double delta = query[j] - f[j];
      d2 += delta * delta;
    }
    if (d2 == 0.0) return targets_[r];  // exact match, lowest index wins
    order[r] = {d2, r};
  }

  std::partial_sort(order.begin(), order.begin() + static_cast<long>(k_),
                    order.end());

  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < k_; ++i) {
    const double w = 1.0 / (std::sqrt(order[i].first) + kDistanceEpsilon);
    weighted += w * targets_[order[i].second];
    total += w;
  }
  return weighted / total;
}

LinearModel LinearModel::fit(const std::vector<std::vector<double>>& features,
                             const std::vector<double>& targets) {
  require_rectangle(features, targets);
  const std::size_t dim = features[0].size();
  const std::size_t rows = targets.size();
  if (rows < dim + 1) throw InsufficientDataError(rows, dim + 1);

  // normal equations over the intercept-augmented design, ridge on the
  // whole diagonal
  const std::size_t w = dim + 1;
  std::vector<std::vector<double>> a(w, std::vector<double>(w, 0.0));
  std::vector<double> b(w, 0.0);
  std::vector<double> x(w, 1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < dim; ++j) x[j] = features[r][j];
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t j = 0; j < w; ++j) a[i][j] += x[i] * x[j];
      b[i] += x[i] * targets[r];
    }
  }
  for (std::size_t i = 0; i < w; ++i) a[i][i] += kRidge;

  // Gaussian elimination with partial pivoting. The ridge keeps every pivot
  // nonzero even for rank-deficient designs.
  for (std::size_t col = 0; col < w; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < w; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
    }
    const double p = a[col][col];
    for (std::size_t r = col + 1; r < w; ++r) {
      const double factor = a[r][col] / p;
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < w; ++j) a[r][j] -= factor * a[col][j];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> solution(w, 0.0);
  for (std::size_t i = w; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < w; ++j) s -= a[i][j] * solution[j];
    solution[i] = s / a[i][i];
  }

  LinearModel m;
  m.coef_.assign(solution.begin(), solution.begin() + static_cast<long>(dim));
  m.intercept_ = solution[dim];
  return m;
}

double LinearModel::predict(const std::vector<double>& query) const {
  if (query.size() != coef_.size())
    throw std::invalid_argument("query dimension mismatch");
  double out = intercept_;
  for (std::size_t j = 0; j < coef_.size(); ++j) out += coef_[j] * query[j];
  return out;
}

namespace detail {

double predict_model(const FittedModel& model, const std::vector<double>& q) {
  return std::visit([&q](const auto& m) { return m.predict(q); }, model);
}

FittedModel fit_model(std::vector<std::vector<double>> features,
                      std::vector<double> targets, MapperKind kind,
                      const MapperParams& params) {
  if (kind == MapperKind::Knn)
    return KnnModel::fit(std::move(features), std::move(targets), params.k);
  return LinearModel::fit(features, targets);
}

}  // namespace detail

double QualityMapper::predict(const HyperParamVector& hp) const {
  return predict_unit(space_.normalize(hp));
}

double QualityMapper::predict_unit(const std::vector<double>& unit) const {
  if (unit.size() != space_.size())
    throw std::invalid_argument("normalized vector has wrong length");
  return clamp01(detail::predict_model(model_, unit));
}

std::string QualityMapper::describe() const {
  std::string out = "map_q kind=";
  out += to_string(kind_);
  if (const auto* knn = std::get_if<KnnModel>(&model_)) {
    out += " k=" + std::to_string(knn->k());
    out += " rows=" + std::to_string(knn->rows());
  } else {
    const auto& lin = std::get<LinearModel>(model_);
    out += " coef=[";
    for (std::size_t j = 0; j < lin.coefficients().size(); ++j) {
      if (j) out += ",";
      out += fmt_g(lin.coefficients()[j]);
    }
    out += "] intercept=" + fmt_g(lin.intercept());
  }
  out += " space=" + to_hex(space_.digest());
  out += " log=" + to_hex(log_digest_);
  return out;
}

double ParamMapper::propose(const HyperParamVector& current,
                            double q_ex) const {
  space_.require_valid(current);
  std::vector<double> others;
  others.reserve(space_.size() - 1);
  for (std::size_t j = 0; j < space_.size(); ++j)
    if (j != index_) others.push_back(space_.normalize_coord(j, current[j]));
  const double unit = predict_unit(others, q_ex);
  return space_.denormalize_coord(index_, unit);
}

double ParamMapper::predict_unit(const std::vector<double>& others_unit,
                                 double q_ex) const {
  if (others_unit.size() != space_.size() - 1)
    throw std::invalid_argument("expected one coordinate per other parameter");
  std::vector<double> query(others_unit);
  query.push_back(q_ex);
  return clamp01(detail::predict_model(model_, query));
}

std::string ParamMapper::describe() const {
  std::string out = "map_" + std::to_string(index_) + " kind=";
  out += to_string(kind_);
  if (const auto* knn = std::get_if<KnnModel>(&model_)) {
    out += " k=" + std::to_string(knn->k());
    out += " rows=" + std::to_string(knn->rows());
  } else {
    const auto& lin = std::get<LinearModel>(model_);
    out += " coef=[";
    for (std::size_t j = 0; j < lin.coefficients().size(); ++j) {
      if (j) out += ",";
      out += fmt_g(lin.coefficients()[j]);
    }
    out += "] intercept=" + fmt_g(lin.intercept());
  }
  out += " space=" + to_hex(space_.digest());
  out += " log=" + to_hex(log_digest_);
  return out;
}

QualityMapper fit_quality_mapper(const ExperimentLog& log, MapperKind kind,
                                 const MapperParams& params) {
  const HyperParamSpace& space = log.space();
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  features.reserve(log.size());
  targets.reserve(log.size());
  for (const ExperimentRecord& r : log.records()) {
    features.push_back(space.normalize(r.hp));
    targets.push_back(r.quality);
  }
  return QualityMapper(kind,
                       detail::fit_model(std::move(features),
                                         std::move(targets), kind, params),
                       space, log.digest());
}

ParamMapper fit_param_mapper(const ExperimentLog& log, std::size_t i,
                             MapperKind kind, const MapperParams& params) {
  const HyperParamSpace& space = log.space();
  if (i >= space.size())
    throw std::invalid_argument("parameter index out of range");
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  features.reserve(log.size());
  targets.reserve(log.size());
  for (const ExperimentRecord& r : log.records()) {
    std::vector<double> u = space.normalize(r.hp);
    std::vector<double> row;
    row.reserve(space.size());
    for (std::size_t j = 0; j < space.size(); ++j)
      if (j != i) row.push_back(u[j]);
    row.push_back(r.quality);  // quality is always the last feature
    features.push_back(std::move(row));
    targets.push_back(u[i]);
  }
  return ParamMapper(i, kind,
                     detail::fit_model(std::move(features),
                                       std::move(targets), kind, params),
                     space, log.digest());
}

}  // namespace obtune
