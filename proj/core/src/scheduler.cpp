#include "cefl/scheduler.hpp"

#include <algorithm>

#include "cefl/error.hpp"

namespace cefl {

void DiffHistory::push(double squared_step) {
  if (capacity_ == 0) return;
  window_.push_front(squared_step);
  while (window_.size() > capacity_) window_.pop_back();
}

CensorConfig CensorConfig::with_intensity(std::size_t K, double xi, int T0, std::size_t N,
                                          double eta) {
  CensorConfig cfg;
  cfg.K = K;
  const double n = static_cast<double>(N);
  cfg.delta.assign(K, xi / (static_cast<double>(K) * n * n));
  cfg.T0 = T0;
  cfg.N = N;
  cfg.eta = eta;
  return cfg;
}

void CensorConfig::validate() const {
  if (K == 0) throw InvalidInput("censoring window K must be positive");
  if (delta.size() != K) throw InvalidInput("censoring weights must have K entries");
  if (std::any_of(delta.begin(), delta.end(), [](double d) { return !(d >= 0.0); })) {
    throw InvalidInput("censoring weights must be non-negative");
  }
  if (T0 < 1) throw InvalidInput("staleness limit T0 must be positive");
  if (N == 0) throw InvalidInput("client count must be positive");
  if (!(eta > 0.0)) throw InvalidInput("learning rate must be positive");
}

double censor_lhs(const Eigen::VectorXd& grad_new, const ClientCache& cache,
                  const CensorConfig& cfg) {
  const double n = static_cast<double>(cfg.N);
  return n * n * cfg.eta * cfg.eta * (grad_new - cache.stale_gradient).squaredNorm();
}

double censor_rhs(const DiffHistory& hist, const CensorConfig& cfg) {
  double rhs = 0.0;
  const std::size_t terms = std::min(hist.size(), cfg.delta.size());
  for (std::size_t k = 0; k < terms; ++k) rhs += cfg.delta[k] * hist[k];
  return rhs;
}

bool should_upload(const Eigen::VectorXd& grad_new, const ClientCache& cache,
                   const DiffHistory& hist, const CensorConfig& cfg) {
  if (cache.clock >= cfg.T0 - 1) return true;
  return censor_lhs(grad_new, cache, cfg) >= censor_rhs(hist, cfg);
}

ClientCache advance_clock(ClientCache cache, bool uploaded, bool received, int T0) {
  if (uploaded && received) {
    cache.clock = 0;
  } else {
    cache.clock = std::min(cache.clock + 1, T0);
  }
  return cache;
}

DiffHistory push_history(DiffHistory hist, const ModelVector& w_new, const ModelVector& w_old) {
  if (w_new.size() != w_old.size()) throw InvalidInput("model dimensions differ");
  hist.push((w_new - w_old).squaredNorm());
  return hist;
}

ClientCache refresh_cache(ClientCache cache, const ModelVector& w_broadcast,
                          const Eigen::VectorXd& grad_at_broadcast, bool uploaded) {
  if (uploaded) {
    cache.stale_model = w_broadcast;
    cache.stale_gradient = grad_at_broadcast;
  }
  return cache;
}

}  // namespace cefl
