#include "cefl/fedmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cefl/error.hpp"

namespace cefl {
namespace {

void check_dimension(const ModelVector& w, const ClientDataset& data) {
  if (w.size() != data.dimension()) {
    throw InvalidInput("model dimension " + std::to_string(w.size()) +
                       " does not match feature dimension " + std::to_string(data.dimension()));
  }
}

// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z) {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z))
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double largest_eigenvalue(const Eigen::MatrixXd& sym) {
  const Eigen::Index d = sym.rows();
  if (d == 0) return 0.0;
  if (d == 1) return sym(0, 0);

  Eigen::VectorXd v(d);
  for (Eigen::Index j = 0; j < d; ++j) v(j) = 1.0 + 0.1 * std::sin(static_cast<double>(j + 1));
  v.normalize();

  double lambda = 0.0;
  constexpr int kMaxIterations = 1'000'000;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::VectorXd next = sym * v;
    lambda = v.dot(next);
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    const double residual = (next - lambda * v).norm();
    v = next / norm;
    if (residual <= 1e-11 * std::abs(lambda)) break;
  }
  return lambda;
}

}  // namespace

void validate_dataset(const ClientDataset& data) {
  if (data.labels.size() == 0) throw InvalidInput("client dataset is empty");
  if (data.features.rows() != data.labels.size()) {
    throw InvalidInput("feature rows and label count differ");
  }
  if (!data.features.allFinite() || !data.labels.allFinite()) {
    throw InvalidInput("client dataset contains non-finite values");
  }
}

double local_loss(const ModelVector& w, const ClientDataset& data, const LossSpec& spec) {
  check_dimension(w, data);
  const double n = static_cast<double>(data.size());
  const Eigen::VectorXd margin = data.features * w;
  double sum = 0.0;
  switch (spec.kind) {
    case LossKind::Ridge:
      sum = 0.5 * (margin - data.labels).squaredNorm();
      break;
    case LossKind::Logistic:
      for (Eigen::Index l = 0; l < margin.size(); ++l) {
        sum += log1p_exp_neg(data.labels(l) * margin(l));
      }
      break;
  }
  return sum / n + 0.5 * spec.lambda * w.squaredNorm();
}

Eigen::VectorXd local_gradient(const ModelVector& w, const ClientDataset& data,
                               const LossSpec& spec) {
  check_dimension(w, data);
  if (data.size() == 0) throw InvalidInput("client dataset is empty");
  const double n = static_cast<double>(data.size());
  const Eigen::VectorXd margin = data.features * w;
  Eigen::VectorXd residual(margin.size());
  switch (spec.kind) {
    case LossKind::Ridge:
      residual = margin - data.labels;
      break;
    case LossKind::Logistic:
      for (Eigen::Index l = 0; l < margin.size(); ++l) {
        const double y = data.labels(l);
        residual(l) = -y * sigmoid(-y * margin(l));
      }
      break;
  }
  return data.features.transpose() * residual / n + spec.lambda * w;
}

ModelVector local_update(const ModelVector& w, const ClientDataset& data, const LossSpec& spec,
                         double eta, int epochs) {
  return local_update_from(w, local_gradient(w, data, spec), data, spec, eta, epochs);
}

ModelVector local_update_from(const ModelVector& w, const Eigen::VectorXd& gradient_at_w,
                              const ClientDataset& data, const LossSpec& spec, double eta,
                              int epochs) {
  if (!(eta > 0.0)) throw InvalidInput("learning rate must be positive");
  if (epochs < 1) throw InvalidInput("local epochs must be >= 1");
  ModelVector out = w - eta * gradient_at_w;
  for (int e = 1; e < epochs; ++e) out = out - eta * local_gradient(out, data, spec);
  return out;
}

std::vector<double> data_weights(std::span<const ClientDataset> datasets) {
  double total = 0.0;
  for (const auto& d : datasets) total += static_cast<double>(d.size());
  std::vector<double> weights;
  weights.reserve(datasets.size());
  for (const auto& d : datasets) weights.push_back(static_cast<double>(d.size()) / total);
  return weights;
}

double global_loss(const ModelVector& w, std::span<const ClientDataset> datasets,
                   const LossSpec& spec) {
  if (datasets.empty()) throw InvalidInput("no client datasets");
  const auto weights = data_weights(datasets);
  double f = 0.0;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    f += weights[i] * local_loss(w, datasets[i], spec);
  }
  return f;
}

Eigen::VectorXd global_gradient(const ModelVector& w, std::span<const ClientDataset> datasets,
                                const LossSpec& spec) {
  if (datasets.empty()) throw InvalidInput("no client datasets");
  const auto weights = data_weights(datasets);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    g += weights[i] * local_gradient(w, datasets[i], spec);
  }
  return g;
}

ClientDataset pool(std::span<const ClientDataset> datasets) {
  if (datasets.empty()) throw InvalidInput("no client datasets");
  Eigen::Index rows = 0;
  const Eigen::Index d = datasets.front().dimension();
  for (const auto& ds : datasets) {
    if (ds.dimension() != d) throw InvalidInput("client feature dimensions differ");
    rows += ds.features.rows();
  }
  ClientDataset out;
  out.features.resize(rows, d);
  out.labels.resize(rows);
  Eigen::Index at = 0;
  for (const auto& ds : datasets) {
    out.features.middleRows(at, ds.features.rows()) = ds.features;
    out.labels.segment(at, ds.labels.size()) = ds.labels;
    at += ds.features.rows();
  }
  return out;
}

SmoothnessConstants smoothness_constants(std::span<const ClientDataset> datasets,
                                         const LossSpec& spec) {
  const ClientDataset all = pool(datasets);
  const double n = static_cast<double>(all.size());
  Eigen::MatrixXd gram = all.features.transpose() * all.features / n;
  if (spec.kind == LossKind::Logistic) gram *= 0.25;

  const double top = largest_eigenvalue(gram);
  SmoothnessConstants c;
  c.L = top + spec.lambda;
  if (spec.kind == LossKind::Logistic) {
    c.mu = spec.lambda;
    return c;
  }
  // Smallest eigenvalue via the spectrum of (top*I - gram).
  const Eigen::MatrixXd shifted =
      top * Eigen::MatrixXd::Identity(gram.rows(), gram.cols()) - gram;
  const double bottom = top - largest_eigenvalue(shifted);
  c.mu = std::max(bottom, 0.0) + spec.lambda;
  return c;
}

OptimalValue optimal_value(std::span<const ClientDataset> datasets, const LossSpec& spec) {
  if (!(spec.lambda > 0.0)) throw InvalidInput("optimal_value requires lambda > 0");
  const ClientDataset all = pool(datasets);
  const Eigen::Index d = all.dimension();
  const double n = static_cast<double>(all.size());
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);

  OptimalValue out;
  out.w_star = ModelVector::Zero(d);
  auto grad = [&](const ModelVector& w) { return global_gradient(w, datasets, spec); };

  if (spec.kind == LossKind::Ridge) {
    const Eigen::MatrixXd hessian =
        all.features.transpose() * all.features / n + spec.lambda * identity;
    const Eigen::LDLT<Eigen::MatrixXd> solver(hessian);
    out.w_star = solver.solve(all.features.transpose() * all.labels / n);
    for (int refine = 0; refine < 20; ++refine) {
      const Eigen::VectorXd g = grad(out.w_star);
      if (g.norm() <= kOracleGradientTolerance) break;
      out.w_star -= solver.solve(g);
    }
  } else {
    ModelVector& w = out.w_star;
    for (int it = 0; it < 100; ++it) {
      const Eigen::VectorXd g = grad(w);
      if (g.norm() <= kOracleGradientTolerance) break;
      const Eigen::VectorXd margin = all.features * w;
      Eigen::VectorXd curvature(margin.size());
      for (Eigen::Index l = 0; l < margin.size(); ++l) {
        const double s = sigmoid(all.labels(l) * margin(l));
        curvature(l) = s * (1.0 - s);
      }
      const Eigen::MatrixXd hessian =
          all.features.transpose() * curvature.asDiagonal() * all.features / n +
          spec.lambda * identity;
      const Eigen::VectorXd step = hessian.ldlt().solve(g);

      const double f0 = global_loss(w, datasets, spec);
      const double slope = g.dot(step);
      double t = 1.0;
      while (t > 1e-10 && global_loss(w - t * step, datasets, spec) > f0 - 0.25 * t * slope) {
        t *= 0.5;
      }
      // Inside the quadratic region the loss change is below rounding; take the full step.
      if (t <= 1e-10) t = 1.0;
      w -= t * step;
    }
  }

  const double residual = grad(out.w_star).norm();
  if (!(residual <= kOracleGradientTolerance)) {
    throw OracleFailure("centralized optimum not reached: gradient norm " +
                        std::to_string(residual));
  }
  out.f_star = global_loss(out.w_star, datasets, spec);
  return out;
}

}  // namespace cefl
