#include "haif/mountain_car.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace haif {

StepResult step(const CarState& state, CarAction action, const EnvConfig& cfg) {
  if (state.t >= cfg.max_steps)
    throw std::logic_error("step: episode already exhausted its step budget");
  if (state.position >= cfg.goal_position)
    return {state, true, true}; // already at the goal; nothing to simulate

  const double dir = action == CarAction::Right ? 1.0 : -1.0;
  CarState next = state;
  next.velocity = state.velocity + dir * cfg.force - cfg.gravity * std::cos(3.0 * state.position);
  next.velocity = std::clamp(next.velocity, -cfg.max_speed, cfg.max_speed);
  next.position = std::clamp(state.position + next.velocity, cfg.min_position, cfg.max_position);
  if (next.position <= cfg.min_position && next.velocity < 0.0) next.velocity = 0.0;
  next.t = state.t + 1;

  const bool success = next.position >= cfg.goal_position;
  const bool done = success || next.t >= cfg.max_steps;
  return {next, done, success};
}

CarState MountainCar::reset(Rng& rng) {
  std::uniform_real_distribution<double> start(cfg_.start_min, cfg_.start_max);
  state_ = CarState{start(rng), 0.0, 0};
  done_ = false;
  return state_;
}

StepResult MountainCar::step(CarAction action) {
  if (done_) throw std::logic_error("MountainCar::step: episode is finished");
  StepResult r = haif::step(state_, action, cfg_);
  state_ = r.state;
  done_ = r.done;
  return r;
}

ObsNormalizer normalizer_from_samples(const std::vector<double>& xs,
                                      const std::vector<double>& vs) {
  if (xs.empty() || xs.size() != vs.size())
    throw std::invalid_argument("normalizer_from_samples: empty or mismatched streams");
  auto stats = [](const std::vector<double>& s) {
    double mu = 0.0;
    for (double v : s) mu += v;
    mu /= double(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mu) * (v - mu);
    var /= double(s.size());
    return std::pair<double, double>{mu, std::max(std::sqrt(var), 1e-6)};
  };
  auto [mx, sx] = stats(xs);
  auto [mv, sv] = stats(vs);
  return ObsNormalizer{mx, sx, mv, sv};
}

ObsNormalizer fit_normalizer(Rng& rng, int n_episodes, const EnvConfig& cfg) {
  if (n_episodes < 1) throw std::invalid_argument("fit_normalizer: n_episodes < 1");
  std::vector<double> xs, vs;
  MountainCar env(cfg);
  std::uniform_int_distribution<int> coin(0, kNumActions - 1);
  for (int e = 0; e < n_episodes; ++e) {
    CarState s = env.reset(rng);
    xs.push_back(s.position);
    vs.push_back(s.velocity);
    while (!env.done()) {
      StepResult r = env.step(static_cast<CarAction>(coin(rng)));
      xs.push_back(r.state.position);
      vs.push_back(r.state.velocity);
    }
  }
  return normalizer_from_samples(xs, vs);
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  out << "episode,t,x,v,action,done\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.episode << ',' << r.t << ',' << r.x << ',' << r.v << ',' << r.action << ','
        << (r.done ? 1 : 0) << '\n';
}

} // namespace haif
