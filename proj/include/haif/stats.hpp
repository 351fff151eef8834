#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace haif {

/// Per-episode outcomes of one seeded run.
struct RunResult {
  std::uint64_t seed = 0;
  std::vector<int> success; // 0/1 per episode
  std::vector<int> steps;   // environment steps per episode
};

/// Success-rate curve: trailing moving average per run, then mean/std across
/// runs at every episode.
struct CurveStats {
  int window = 5;
  std::vector<double> ma_mean;
  std::vector<double> ma_std; // population std across runs
  std::vector<double> raw_success_rate;
};

/// Trailing moving average with the window clipped at the start of the
/// series: out[e] = mean(x[max(0, e-window+1) .. e]).
std::vector<double> moving_average(const std::vector<int>& series, int window);

CurveStats aggregate(const std::vector<RunResult>& results, int window);

void write_curve_csv(const std::string& path, const CurveStats& stats);

} // namespace haif
