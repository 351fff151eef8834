#include "haif/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "haif/rng.hpp"

namespace haif {

namespace {

struct Field {
  enum Kind { Int, Double } kind;
  size_t offset;
};

const std::map<std::string, Field>& field_table() {
  static const std::map<std::string, Field> table = {
      {"M_Q", {Field::Int, offsetof(ExperimentConfig, m_q)}},
      {"M_P", {Field::Int, offsetof(ExperimentConfig, m_p)}},
      {"lambda_Q", {Field::Double, offsetof(ExperimentConfig, lambda_q)}},
      {"lambda_P", {Field::Double, offsetof(ExperimentConfig, lambda_p)}},
      {"L_buf", {Field::Int, offsetof(ExperimentConfig, l_buf)}},
      {"coding_iters", {Field::Int, offsetof(ExperimentConfig, coding_iters)}},
      {"eta_c", {Field::Double, offsetof(ExperimentConfig, eta_c)}},
      {"eta_d", {Field::Double, offsetof(ExperimentConfig, eta_d)}},
      {"decay", {Field::Double, offsetof(ExperimentConfig, decay)}},
      {"alpha", {Field::Double, offsetof(ExperimentConfig, alpha)}},
      {"action_scale", {Field::Double, offsetof(ExperimentConfig, action_scale)}},
      {"beta", {Field::Double, offsetof(ExperimentConfig, beta)}},
      {"n_policies", {Field::Int, offsetof(ExperimentConfig, n_policies)}},
      {"horizon", {Field::Int, offsetof(ExperimentConfig, horizon)}},
      {"repeat", {Field::Int, offsetof(ExperimentConfig, repeat)}},
      {"episodes", {Field::Int, offsetof(ExperimentConfig, episodes)}},
      {"seeds", {Field::Int, offsetof(ExperimentConfig, seeds)}},
      {"ma_window", {Field::Int, offsetof(ExperimentConfig, ma_window)}},
      {"normalizer_episodes", {Field::Int, offsetof(ExperimentConfig, normalizer_episodes)}},
      {"goal_grid", {Field::Int, offsetof(ExperimentConfig, goal_grid)}},
      {"replay", {Field::Int, offsetof(ExperimentConfig, replay)}},
      {"replan", {Field::Int, offsetof(ExperimentConfig, replan)}},
      {"fixed_policies", {Field::Int, offsetof(ExperimentConfig, fixed_policies)}},
      {"carry_history", {Field::Int, offsetof(ExperimentConfig, carry_history)}},
      {"q_episodes", {Field::Int, offsetof(ExperimentConfig, q_episodes)}},
      {"q_pos_bins", {Field::Int, offsetof(ExperimentConfig, q_pos_bins)}},
      {"q_vel_bins", {Field::Int, offsetof(ExperimentConfig, q_vel_bins)}},
      {"q_lr_start", {Field::Double, offsetof(ExperimentConfig, q_lr_start)}},
      {"q_lr_end", {Field::Double, offsetof(ExperimentConfig, q_lr_end)}},
      {"q_gamma", {Field::Double, offsetof(ExperimentConfig, q_gamma)}},
      {"q_eps_start", {Field::Double, offsetof(ExperimentConfig, q_eps_start)}},
      {"q_eps_end", {Field::Double, offsetof(ExperimentConfig, q_eps_end)}},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

} // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : field_table()) v.push_back(k);
    return v;
  }();
  return names;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto it = field_table().find(key);
  if (it == field_table().end())
    throw std::invalid_argument("unknown config key '" + key + "'");
  char* base = reinterpret_cast<char*>(this);
  try {
    size_t consumed = 0;
    if (it->second.kind == Field::Int) {
      const long v = std::stol(value, &consumed);
      if (consumed != value.size()) throw std::invalid_argument(value);
      *reinterpret_cast<int*>(base + it->second.offset) = int(v);
    } else {
      const double v = std::stod(value, &consumed);
      if (consumed != value.size()) throw std::invalid_argument(value);
      *reinterpret_cast<double*>(base + it->second.offset) = v;
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse value '" + value + "'");
  }
}

void ExperimentConfig::set(const std::string& key, double value) {
  std::ostringstream os;
  os.precision(17);
  auto it = field_table().find(key);
  if (it != field_table().end() && it->second.kind == Field::Int)
    os << (long long)(value);
  else
    os << value;
  set(key, os.str());
}

std::string ExperimentConfig::get(const std::string& key) const {
  auto it = field_table().find(key);
  if (it == field_table().end())
    throw std::invalid_argument("unknown config key '" + key + "'");
  const char* base = reinterpret_cast<const char*>(this);
  std::ostringstream os;
  os.precision(17);
  if (it->second.kind == Field::Int)
    os << *reinterpret_cast<const int*>(base + it->second.offset);
  else
    os << *reinterpret_cast<const double*>(base + it->second.offset);
  return os.str();
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (v <= 0) throw std::invalid_argument(std::string("config: ") + name + " must be positive");
  };
  positive(m_q, "M_Q");
  positive(m_p, "M_P");
  positive(l_buf, "L_buf");
  positive(coding_iters, "coding_iters");
  positive(eta_d, "eta_d");
  positive(decay, "decay");
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(n_policies, "n_policies");
  positive(horizon, "horizon");
  positive(repeat, "repeat");
  positive(seeds, "seeds");
  positive(ma_window, "ma_window");
  positive(normalizer_episodes, "normalizer_episodes");
  positive(goal_grid, "goal_grid");
  if (lambda_q < 0 || lambda_p < 0) throw std::invalid_argument("config: lambda must be >= 0");
  if (episodes < 0) throw std::invalid_argument("config: episodes must be >= 0");
  if (episodes > 0 && episodes < ma_window)
    throw std::invalid_argument("config: episodes < ma_window");
  if (horizon % repeat != 0)
    throw std::invalid_argument("config: horizon not divisible by repeat");
}

AgentConfig ExperimentConfig::agent_config() const {
  AgentConfig a;
  a.m_q = m_q;
  a.m_p = m_p;
  a.lambda_q = lambda_q;
  a.lambda_p = lambda_p;
  a.l_buf = l_buf;
  a.coding_iters = coding_iters;
  a.eta_c = eta_c;
  a.eta_d = eta_d;
  a.alpha = alpha;
  a.action_scale = action_scale;
  return a;
}

PlannerConfig ExperimentConfig::planner_config() const {
  return PlannerConfig{n_policies, horizon, repeat, beta};
}

QLearningConfig ExperimentConfig::q_config() const {
  QLearningConfig q;
  q.pos_bins = q_pos_bins;
  q.vel_bins = q_vel_bins;
  q.lr_start = q_lr_start;
  q.lr_end = q_lr_end;
  q.gamma = q_gamma;
  q.eps_start = q_eps_start;
  q.eps_end = q_eps_end;
  q.episodes = q_episodes;
  q.seeds = seeds;
  return q;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
  cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const auto& key : ExperimentConfig::keys()) os << key << " = " << cfg.get(key) << "\n";
  return os.str();
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         RunArtifacts* artifacts) {
  cfg.validate();
  Rng rng = make_rng(seed);
  EnvConfig env_cfg;

  auto agent = std::make_unique<HebbianAifAgent>(cfg.agent_config(), rng);
  const ObsNormalizer norm = fit_normalizer(rng, cfg.normalizer_episodes, env_cfg);
  MountainCar env(env_cfg);

  EpisodeOptions opts;
  opts.planner = cfg.planner_config();
  opts.goal = mountain_car_goal(norm, env_cfg, cfg.goal_grid);
  opts.replan_until = cfg.replan == 1 ? cfg.horizon : cfg.replan;
  opts.carry_history = cfg.carry_history != 0;
  opts.eta_decay = cfg.decay;
  if (artifacts && artifacts->want_trajectory) {
    opts.record_trajectory = true;
    opts.trajectory = &artifacts->trajectory;
  }

  std::vector<Policy> pool;
  if (cfg.fixed_policies) {
    pool = sample_policies(rng, opts.planner);
    opts.policy_pool = &pool;
  }

  ReplayBuffer buffer;
  RunResult result;
  result.seed = seed;
  for (int e = 0; e < cfg.episodes; ++e) {
    opts.episode_index = e;
    EpisodeRecord record;
    opts.record = cfg.replay ? &record : nullptr;
    const EpisodeOutcome outcome = plan_and_act(*agent, env, norm, rng, opts);
    result.success.push_back(outcome.success ? 1 : 0);
    result.steps.push_back(outcome.steps);
    if (cfg.replay) {
      replay_train(*agent, buffer, norm, rng);
      buffer.episodes.push_back(std::move(record));
    }
  }

  if (artifacts) {
    artifacts->normalizer = norm;
    artifacts->agent = std::move(agent);
  }
  return result;
}

int worker_count() {
  if (const char* env = std::getenv("HAIF_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? int(hc) : 1;
}

void parallel_for(int jobs, int workers, const std::function<void(int)>& fn) {
  if (jobs <= 0) return;
  workers = std::max(1, std::min(workers, jobs));
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment_suite(const ExperimentConfig& cfg, std::uint64_t master_seed,
                                      std::function<void(int)> on_run_done,
                                      RunArtifacts* artifacts) {
  cfg.validate();
  ExperimentResult out;
  out.runs.resize(size_t(cfg.seeds));
  std::mutex mu;
  parallel_for(cfg.seeds, worker_count(), [&](int k) {
    out.runs[size_t(k)] = run_experiment(cfg, derive_seed(master_seed, 0xA1Full, uint64_t(k)),
                                         k == 0 ? artifacts : nullptr);
    if (on_run_done) {
      std::lock_guard<std::mutex> lock(mu);
      on_run_done(k);
    }
  });
  out.curve = aggregate(out.runs, cfg.ma_window);
  return out;
}

std::vector<SweepPoint> sweep(const SweepSpec& spec, std::uint64_t master_seed) {
  if (spec.values.empty()) throw std::invalid_argument("sweep: no values");
  // Validates the parameter name up front.
  {
    ExperimentConfig probe = spec.base;
    probe.set(spec.param, spec.values[0]);
  }
  std::vector<SweepPoint> points(spec.values.size());
  const int seeds = spec.base.seeds;
  const int jobs = int(spec.values.size()) * seeds;
  std::vector<std::vector<RunResult>> runs(spec.values.size(),
                                           std::vector<RunResult>(size_t(seeds)));
  parallel_for(jobs, worker_count(), [&](int j) {
    const int vi = j / seeds;
    const int k = j % seeds;
    ExperimentConfig cfg = spec.base;
    cfg.set(spec.param, spec.values[size_t(vi)]);
    const std::uint64_t value_master = derive_seed(master_seed, 0x55EEull, uint64_t(vi));
    runs[size_t(vi)][size_t(k)] =
        run_experiment(cfg, derive_seed(value_master, 0xA1Full, uint64_t(k)));
  });
  for (size_t vi = 0; vi < spec.values.size(); ++vi) {
    points[vi].value = spec.values[vi];
    points[vi].curve = aggregate(runs[vi], spec.base.ma_window);
  }
  return points;
}

double final_mean(const CurveStats& stats, int span) {
  if (stats.ma_mean.empty()) throw std::invalid_argument("final_mean: empty curve");
  const size_t n = stats.ma_mean.size();
  const size_t lo = n > size_t(span) ? n - size_t(span) : 0;
  double sum = 0.0;
  for (size_t e = lo; e < n; ++e) sum += stats.ma_mean[e];
  return sum / double(n - lo);
}

} // namespace haif
