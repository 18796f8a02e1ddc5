#pragma once

// Runnable checks for the convergence-rate and communication-cost bounds.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cefl/engine.hpp"
#include "cefl/fedmath.hpp"

namespace cefl {

/// (mu / L) * sum over admitted i of weights[i] * (1 - outage[i]).
/// `weights` and `outage` are indexed by client id.
double theoretical_rho(const SmoothnessConstants& constants, std::span<const double> weights,
                       std::span<const double> outage, std::span<const std::size_t> admitted);

/// ceil(log(epsilon / f_initial) / log(1 - rho)); 0 when epsilon >= f_initial.
/// Throws InvalidInput unless 0 < rho < 1 and epsilon > 0.
std::size_t min_rounds_bound(double rho, double epsilon, double f_initial);

/// Gap series of one run: entry 0 is the gap before round 1, entry t the gap
/// after round t.
std::vector<double> gap_series(const SimulationResult& result);

/// Per-round contraction factors of one run, entry t-1 for round t.
std::vector<double> rho_series(const SimulationResult& result);

struct RateReport {
  std::vector<bool> round_ok;   // entry t-1 for the step from gap(t) to gap(t+1)
  std::vector<double> mean_gap;  // seed mean, entry 0 is before round 1
  std::vector<double> bound;     // right-hand side that was checked
  std::size_t violations = 0;
  bool passed() const { return violations == 0; }
};

/// Per round: mean gap(t+1) <= (1 - rho) mean gap(t) + 3 SE, where SE is the
/// standard error of the per-seed differences gap(t+1) - (1 - rho) gap(t).
/// `gaps[s]` is seed s's gap series; all series must have equal length.
RateReport verify_rate(std::span<const std::vector<double>> gaps, double rho);

/// Same, with one contraction factor per seed and round (rhos[s][t-1]).
RateReport verify_rate(std::span<const std::vector<double>> gaps,
                       std::span<const std::vector<double>> rhos);

/// Iterated bound: mean gap(t) <= mean over seeds of
/// prod_{s<=t}(1 - rho_s) gap(1), plus 3 SE of the per-seed differences.
RateReport verify_envelope(std::span<const std::vector<double>> gaps,
                           std::span<const std::vector<double>> rhos);

double pearson(std::span<const double> x, std::span<const double> y);

/// First round whose post-round gap is <= epsilon.
std::optional<std::size_t> first_reach(std::span<const RoundTrace> traces, double epsilon);

/// Cumulative uploads at first_reach, if reached.
std::optional<std::size_t> uploads_at_reach(std::span<const RoundTrace> traces, double epsilon);

}  // namespace cefl
