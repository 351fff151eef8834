#pragma once

#include <string>
#include <vector>

#include "haif/types.hpp"

namespace haif {

enum class CarAction : int { Left = 0, Right = 1 };
inline constexpr int kNumActions = 2;

/// Physics constants of the classic Mountain Car task. The action space here
/// has two members (accelerate left / accelerate right); there is no no-op.
struct EnvConfig {
  double force = 0.001;
  double gravity = 0.0025;
  double goal_position = 0.5;
  double min_position = -1.2;
  double max_position = 0.6;
  double max_speed = 0.07;
  double start_min = -0.6;
  double start_max = -0.4;
  int max_steps = 200;
};

struct CarState {
  double position = 0.0;
  double velocity = 0.0;
  int t = 0;
};

struct StepResult {
  CarState state;
  bool done = false;
  bool success = false;
};

/// One physics update. Velocity and position are clipped to their bounds and
/// the car sticks to the left wall. A state already at or past the goal is
/// terminal and is returned unchanged as a success.
StepResult step(const CarState& state, CarAction action, const EnvConfig& cfg = {});

/// Self-contained Mountain Car episode. Tracks the step counter and refuses
/// to step a finished episode.
class MountainCar {
public:
  explicit MountainCar(EnvConfig cfg = {}) : cfg_(cfg) {}

  /// Start a new episode: position uniform in the start range, velocity 0.
  CarState reset(Rng& rng);

  StepResult step(CarAction action);

  const CarState& state() const { return state_; }
  const EnvConfig& config() const { return cfg_; }
  bool done() const { return done_; }

private:
  EnvConfig cfg_;
  CarState state_;
  bool done_ = true; // must reset first
};

/// Per-dimension affine normalization of the (position, velocity) observation.
struct ObsNormalizer {
  double mu_x = 0.0;
  double sigma_x = 1.0;
  double mu_v = 0.0;
  double sigma_v = 1.0;

  Vector normalize(double x, double v) const {
    Vector o(2);
    o << (x - mu_x) / sigma_x, (v - mu_v) / sigma_v;
    return o;
  }
};

/// Population mean/std of each observation dimension over `n_episodes`
/// uniform-random-action episodes. Standard deviations are floored at 1e-6.
ObsNormalizer fit_normalizer(Rng& rng, int n_episodes, const EnvConfig& cfg = {});

/// Mean/std statistics used by fit_normalizer, exposed for synthetic streams.
ObsNormalizer normalizer_from_samples(const std::vector<double>& xs,
                                      const std::vector<double>& vs);

/// One row of a trajectory dump (debug interface).
struct TrajectoryRow {
  int episode = 0;
  int t = 0;
  double x = 0.0;
  double v = 0.0;
  int action = 0;
  bool done = false;
};

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows);

} // namespace haif
