#pragma once

// Communication-censoring client scheduler: a client uploads only when its
// gradient has drifted from the one it last uploaded by more than a
// weighted window of recent global model steps, or when its staleness clock
// forces a refresh.

#include <cstddef>
#include <deque>
#include <vector>

#include "cefl/fedmath.hpp"

namespace cefl {

struct ClientCache {
  ModelVector stale_model;         // broadcast model at the last upload
  Eigen::VectorXd stale_gradient;  // local gradient at stale_model
  int clock = 0;                   // rounds since the last received upload
};

/// The K most recent squared global step norms, newest first.
class DiffHistory {
 public:
  explicit DiffHistory(std::size_t capacity = 10) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return window_.size(); }
  bool empty() const { return window_.empty(); }

  /// Entry k (0-based) is |w^{t-k} - w^{t-k-1}|^2.
  double operator[](std::size_t k) const { return window_[k]; }

  void push(double squared_step);

 private:
  std::size_t capacity_;
  std::deque<double> window_;
};

struct CensorConfig {
  std::size_t K = 10;
  std::vector<double> delta;  // one weight per window slot
  int T0 = 50;
  std::size_t N = 1;
  double eta = 1.0;

  /// delta_k = xi / (K N^2) for every k.
  static CensorConfig with_intensity(std::size_t K, double xi, int T0, std::size_t N, double eta);

  void validate() const;
};

/// Left-hand side of the censoring test: N^2 eta^2 |g_new - g_stale|^2.
double censor_lhs(const Eigen::VectorXd& grad_new, const ClientCache& cache,
                  const CensorConfig& cfg);

/// Right-hand side: sum_k delta_k |w^{t+1-k} - w^{t-k}|^2 (missing entries are 0).
double censor_rhs(const DiffHistory& hist, const CensorConfig& cfg);

/// True when lhs >= rhs, or when the clock has reached T0 - 1.
bool should_upload(const Eigen::VectorXd& grad_new, const ClientCache& cache,
                   const DiffHistory& hist, const CensorConfig& cfg);

/// Clock returns to 0 only when the upload was sent and received; otherwise
/// it increments, saturating at T0.
ClientCache advance_clock(ClientCache cache, bool uploaded, bool received, int T0);

/// Appends |w_new - w_old|^2, evicting the oldest entry beyond capacity.
DiffHistory push_history(DiffHistory hist, const ModelVector& w_new, const ModelVector& w_old);

/// On upload the cache snapshots the broadcast model and its gradient;
/// otherwise it is returned unchanged.
ClientCache refresh_cache(ClientCache cache, const ModelVector& w_broadcast,
                          const Eigen::VectorXd& grad_at_broadcast, bool uploaded);

}  // namespace cefl
