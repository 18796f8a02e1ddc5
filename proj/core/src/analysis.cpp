#include "cefl/analysis.hpp"

#include <cmath>
#include <string>

#include "cefl/error.hpp"

namespace cefl {
namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> v) {
  MeanSe out;
  const double n = static_cast<double>(v.size());
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= n;
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

std::size_t common_length(std::span<const std::vector<double>> gaps) {
  if (gaps.empty()) throw InvalidInput("no gap series");
  const std::size_t len = gaps.front().size();
  for (const auto& g : gaps) {
    if (g.size() != len) throw InvalidInput("gap series differ in length");
  }
  return len;
}

void check_rhos(std::span<const std::vector<double>> gaps,
                std::span<const std::vector<double>> rhos, std::size_t len) {
  if (rhos.size() != gaps.size()) throw InvalidInput("one rho series per seed required");
  for (const auto& r : rhos) {
    if (r.size() + 1 < len) throw InvalidInput("rho series shorter than the gap series");
  }
}

}  // namespace

double theoretical_rho(const SmoothnessConstants& constants, std::span<const double> weights,
                       std::span<const double> outage, std::span<const std::size_t> admitted) {
  if (weights.size() != outage.size()) throw InvalidInput("weights and outage sizes differ");
  double sum = 0.0;
  for (std::size_t i : admitted) {
    if (i >= weights.size()) throw InvalidInput("admitted id out of range");
    if (!(outage[i] >= 0.0 && outage[i] <= 1.0)) {
      throw InvalidInput("outage probability outside [0, 1]");
    }
    sum += weights[i] * (1.0 - outage[i]);
  }
  return constants.mu / constants.L * sum;
}

std::size_t min_rounds_bound(double rho, double epsilon, double f_initial) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidInput("rho must lie in (0, 1)");
  if (!(epsilon > 0.0) || !(f_initial > 0.0)) {
    throw InvalidInput("epsilon and f_initial must be positive");
  }
  if (epsilon >= f_initial) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(epsilon / f_initial) / std::log1p(-rho)));
}

std::vector<double> gap_series(const SimulationResult& result) {
  if (!result.initial_gap) throw OracleFailure("optimal value unavailable");
  std::vector<double> out{*result.initial_gap};
  for (const auto& t : result.traces) out.push_back(*t.gap);
  return out;
}

std::vector<double> rho_series(const SimulationResult& result) {
  std::vector<double> out;
  out.reserve(result.traces.size());
  for (const auto& t : result.traces) out.push_back(t.rho);
  return out;
}

RateReport verify_rate(std::span<const std::vector<double>> gaps, double rho) {
  const std::size_t len = common_length(gaps);
  std::vector<std::vector<double>> rhos(gaps.size(),
                                        std::vector<double>(len > 0 ? len - 1 : 0, rho));
  return verify_rate(gaps, rhos);
}

RateReport verify_rate(std::span<const std::vector<double>> gaps,
                       std::span<const std::vector<double>> rhos) {
  const std::size_t len = common_length(gaps);
  check_rhos(gaps, rhos, len);
  RateReport rep;
  std::vector<double> col(gaps.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t s = 0; s < gaps.size(); ++s) col[s] = gaps[s][t];
    rep.mean_gap.push_back(mean_se(col).mean);
  }
  std::vector<double> contracted(gaps.size());
  for (std::size_t t = 0; t + 1 < len; ++t) {
    for (std::size_t s = 0; s < gaps.size(); ++s) {
      contracted[s] = (1.0 - rhos[s][t]) * gaps[s][t];
      col[s] = gaps[s][t + 1] - contracted[s];
    }
    const double bound = mean_se(contracted).mean + 3.0 * mean_se(col).se;
    rep.bound.push_back(bound);
    const bool ok = rep.mean_gap[t + 1] <= bound;
    rep.round_ok.push_back(ok);
    if (!ok) ++rep.violations;
  }
  return rep;
}

RateReport verify_envelope(std::span<const std::vector<double>> gaps,
                           std::span<const std::vector<double>> rhos) {
  const std::size_t len = common_length(gaps);
  check_rhos(gaps, rhos, len);
  RateReport rep;
  std::vector<double> factor(gaps.size(), 1.0);
  std::vector<double> col(gaps.size());
  std::vector<double> env(gaps.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t s = 0; s < gaps.size(); ++s) col[s] = gaps[s][t];
    rep.mean_gap.push_back(mean_se(col).mean);
  }
  for (std::size_t t = 1; t < len; ++t) {
    for (std::size_t s = 0; s < gaps.size(); ++s) {
      factor[s] *= 1.0 - rhos[s][t - 1];
      env[s] = factor[s] * gaps[s][0];
      col[s] = gaps[s][t] - env[s];
    }
    const double bound = mean_se(env).mean + 3.0 * mean_se(col).se;
    rep.bound.push_back(bound);
    const bool ok = rep.mean_gap[t] <= bound;
    rep.round_ok.push_back(ok);
    if (!ok) ++rep.violations;
  }
  return rep;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("pearson needs two equal series");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidInput("pearson undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

std::optional<std::size_t> first_reach(std::span<const RoundTrace> traces, double epsilon) {
  for (const auto& t : traces) {
    if (t.gap && *t.gap <= epsilon) return t.round;
  }
  return std::nullopt;
}

std::optional<std::size_t> uploads_at_reach(std::span<const RoundTrace> traces, double epsilon) {
  for (const auto& t : traces) {
    if (t.gap && *t.gap <= epsilon) return t.cumulative_uploads;
  }
  return std::nullopt;
}

}  // namespace cefl
