#pragma once

// Learning tasks for the federated simulator: per-client losses and
// gradients, smoothness constants of the pooled objective, and a
// high-precision centralized optimum.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cefl {

/// Dense model parameter vector shared by server and clients.
using ModelVector = Eigen::VectorXd;

/// Labeled samples held by one client. Row l of `features` is sample l.
struct ClientDataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
  Eigen::Index dimension() const { return features.cols(); }
};

enum class LossKind { Ridge, Logistic };

/// Per-sample loss family plus an l2 regularizer `lambda`.
///
/// Ridge:    F(w; x, y) = 0.5 (x.w - y)^2
/// Logistic: F(w; x, y) = log(1 + exp(-y x.w)),  y in {-1, +1}
///
/// Every local objective is f_i(w) = mean_l F(w; x_l, y_l) + (lambda/2)|w|^2.
struct LossSpec {
  LossKind kind = LossKind::Ridge;
  double lambda = 0.1;
};

struct SmoothnessConstants {
  double L = 1.0;
  double mu = 1.0;
};

struct OptimalValue {
  ModelVector w_star;
  double f_star = 0.0;
};

/// Throws InvalidInput unless the dataset is non-empty, consistent and finite.
void validate_dataset(const ClientDataset& data);

double local_loss(const ModelVector& w, const ClientDataset& data, const LossSpec& spec);

Eigen::VectorXd local_gradient(const ModelVector& w, const ClientDataset& data,
                               const LossSpec& spec);

/// `epochs` full-gradient descent steps from `w` with step `eta`.
ModelVector local_update(const ModelVector& w, const ClientDataset& data, const LossSpec& spec,
                         double eta, int epochs);

/// Same as local_update, but the first step uses a gradient the caller has
/// already evaluated at `w`.
ModelVector local_update_from(const ModelVector& w, const Eigen::VectorXd& gradient_at_w,
                              const ClientDataset& data, const LossSpec& spec, double eta,
                              int epochs);

/// Data-size weights D_i / D.
std::vector<double> data_weights(std::span<const ClientDataset> datasets);

double global_loss(const ModelVector& w, std::span<const ClientDataset> datasets,
                   const LossSpec& spec);

Eigen::VectorXd global_gradient(const ModelVector& w, std::span<const ClientDataset> datasets,
                                const LossSpec& spec);

/// Concatenates client datasets in order.
ClientDataset pool(std::span<const ClientDataset> datasets);

/// L and mu of the pooled objective. The extreme eigenvalues of the scaled
/// Gram matrix are found by (shifted) power iteration.
SmoothnessConstants smoothness_constants(std::span<const ClientDataset> datasets,
                                         const LossSpec& spec);

/// Centralized minimizer to gradient norm <= 1e-12. Ridge uses a direct
/// solve with iterative refinement, logistic a damped Newton method.
/// Throws OracleFailure when the tolerance is not met.
OptimalValue optimal_value(std::span<const ClientDataset> datasets, const LossSpec& spec);

inline constexpr double kOracleGradientTolerance = 1e-12;

}  // namespace cefl
