#include "haif/stats.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace haif {

std::vector<double> moving_average(const std::vector<int>& series, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window < 1");
  std::vector<double> out(series.size());
  for (size_t e = 0; e < series.size(); ++e) {
    const size_t lo = e + 1 >= size_t(window) ? e + 1 - size_t(window) : 0;
    double sum = 0.0;
    for (size_t i = lo; i <= e; ++i) sum += series[i];
    out[e] = sum / double(e - lo + 1);
  }
  return out;
}

CurveStats aggregate(const std::vector<RunResult>& results, int window) {
  if (results.empty()) throw std::invalid_argument("aggregate: no runs");
  const size_t episodes = results[0].success.size();
  for (const auto& r : results)
    if (r.success.size() != episodes)
      throw std::invalid_argument("aggregate: runs of unequal length");

  CurveStats stats;
  stats.window = window;
  stats.ma_mean.assign(episodes, 0.0);
  stats.ma_std.assign(episodes, 0.0);
  stats.raw_success_rate.assign(episodes, 0.0);
  if (episodes == 0) return stats;

  std::vector<std::vector<double>> curves;
  curves.reserve(results.size());
  for (const auto& r : results) curves.push_back(moving_average(r.success, window));

  const double n = double(results.size());
  for (size_t e = 0; e < episodes; ++e) {
    double mean = 0.0, raw = 0.0;
    for (size_t r = 0; r < results.size(); ++r) {
      mean += curves[r][e];
      raw += results[r].success[e];
    }
    mean /= n;
    raw /= n;
    double var = 0.0;
    for (size_t r = 0; r < results.size(); ++r) {
      const double d = curves[r][e] - mean;
      var += d * d;
    }
    stats.ma_mean[e] = mean;
    stats.ma_std[e] = std::sqrt(var / n);
    stats.raw_success_rate[e] = raw;
  }
  return stats;
}

void write_curve_csv(const std::string& path, const CurveStats& stats) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curve_csv: cannot open " + path);
  out << "episode,ma_mean,ma_std,raw_success_rate\n";
  out.precision(17);
  for (size_t e = 0; e < stats.ma_mean.size(); ++e)
    out << (e + 1) << ',' << stats.ma_mean[e] << ',' << stats.ma_std[e] << ','
        << stats.raw_success_rate[e] << '\n';
}

} // namespace haif
