#include "rpcl/envsim.hpp"

#include <atomic>
#include <cmath>

#include "rpcl/error.hpp"

namespace rpcl {

namespace {

// CartPole constants (published reference definition).
constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassCart + kMassPole;
constexpr double kPoleHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kPoleHalfLength;
constexpr double kForceMag = 10.0;
constexpr double kTau = 0.02;
constexpr double kThetaThreshold = 12.0 * 2.0 * M_PI / 360.0;  // ~0.2095 rad
constexpr double kXThreshold = 2.4;

// MountainCar constants.
constexpr double kMcForce = 0.001;
constexpr double kMcGravity = 0.0025;
constexpr double kMccPower = 0.0015;
constexpr double kMcMinPos = -1.2;
constexpr double kMcMaxPos = 0.6;
constexpr double kMcMaxSpeed = 0.07;
constexpr double kMcGoal = 0.5;

std::atomic<std::uint64_t> g_env_reward_reads{0};

void check_state(EnvId env, const State& s) {
  if (s.size() != state_dim(env)) {
    throw DimensionError("state dimension " + std::to_string(s.size()) +
                         " does not match environment " + env_name(env));
  }
}

void check_action(EnvId env, const Action& a) {
  if (has_discrete_actions(env)) {
    if (!a.is_discrete()) throw DimensionError("discrete action required for " + env_name(env));
    if (a.index() < 0 || a.index() >= action_count(env)) {
      throw DimensionError("action index " + std::to_string(a.index()) + " out of range for " +
                           env_name(env));
    }
  } else {
    if (a.is_discrete()) throw DimensionError("continuous action required for " + env_name(env));
  }
}

}  // namespace

int state_dim(EnvId env) { return env == EnvId::CartPole ? 4 : 2; }

int action_count(EnvId env) {
  switch (env) {
    case EnvId::CartPole: return 2;
    case EnvId::MountainCarDiscrete: return 3;
    case EnvId::MountainCarContinuous: return 0;
  }
  return 0;
}

bool has_discrete_actions(EnvId env) { return env != EnvId::MountainCarContinuous; }

int episode_cap(EnvId) { return 1000; }

std::string env_name(EnvId env) {
  switch (env) {
    case EnvId::CartPole: return "cartpole";
    case EnvId::MountainCarDiscrete: return "mountaincar_discrete";
    case EnvId::MountainCarContinuous: return "mountaincar_continuous";
  }
  return "?";
}

std::optional<EnvId> env_from_name(std::string_view name) {
  if (name == "cartpole") return EnvId::CartPole;
  if (name == "mountaincar_discrete") return EnvId::MountainCarDiscrete;
  if (name == "mountaincar_continuous") return EnvId::MountainCarContinuous;
  return std::nullopt;
}

double Transition::env_reward_for_eval() const {
  g_env_reward_reads.fetch_add(1, std::memory_order_relaxed);
  return hidden_env_reward_;
}

std::uint64_t env_reward_read_count() {
  return g_env_reward_reads.load(std::memory_order_relaxed);
}

void reset_env_reward_read_count() { g_env_reward_reads.store(0, std::memory_order_relaxed); }

State reset(EnvId env, Pcg32& rng) {
  State s(state_dim(env));
  if (env == EnvId::CartPole) {
    for (int i = 0; i < 4; ++i) s[i] = rng.uniform(-0.05, 0.05);
  } else {
    s[0] = rng.uniform(-0.6, -0.4);
    s[1] = 0.0;
  }
  return s;
}

Transition step(EnvId env, const State& state, const Action& action, int step_index) {
  check_state(env, state);
  check_action(env, action);

  Transition tr;
  if (env == EnvId::CartPole) {
    double x = state[0], x_dot = state[1], theta = state[2], theta_dot = state[3];
    double force = action.index() == 1 ? kForceMag : -kForceMag;
    double cos_t = std::cos(theta), sin_t = std::sin(theta);
    double temp = (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
    double theta_acc = (kGravity * sin_t - cos_t * temp) /
                       (kPoleHalfLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
    double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

    // Semi-implicit Euler: velocities first, positions with the new velocity.
    x_dot += kTau * x_acc;
    x += kTau * x_dot;
    theta_dot += kTau * theta_acc;
    theta += kTau * theta_dot;

    tr.next_state = State(4);
    tr.next_state << x, x_dot, theta, theta_dot;
    tr.terminated = std::abs(x) > kXThreshold || std::abs(theta) > kThetaThreshold;
    tr.hidden_env_reward_ = 1.0;  // alive bonus, paid on every step taken
  } else {
    double position = state[0], velocity = state[1];
    double drive;
    if (env == EnvId::MountainCarDiscrete) {
      drive = (action.index() - 1) * kMcForce;
    } else {
      double a = std::clamp(action.value(), -1.0, 1.0);
      drive = a * kMccPower;
    }
    velocity += drive - kMcGravity * std::cos(3.0 * position);
    velocity = std::clamp(velocity, -kMcMaxSpeed, kMcMaxSpeed);
    position += velocity;
    position = std::clamp(position, kMcMinPos, kMcMaxPos);
    if (position <= kMcMinPos && velocity < 0.0) velocity = 0.0;

    tr.next_state = State(2);
    tr.next_state << position, velocity;
    tr.terminated = position >= kMcGoal;
    if (env == EnvId::MountainCarDiscrete) {
      tr.hidden_env_reward_ = -1.0;
    } else {
      double a = std::clamp(action.value(), -1.0, 1.0);
      tr.hidden_env_reward_ = -0.1 * a * a + (tr.terminated ? 100.0 : 0.0);
    }
  }
  tr.truncated = !tr.terminated && (step_index + 1 >= episode_cap(env));
  return tr;
}

Trajectory rollout(EnvId env, const ActionSource& policy, Pcg32& rng, int max_steps,
                   const std::optional<State>& start) {
  Trajectory traj;
  traj.env = env;
  traj.actions.emplace();

  State s = start ? *start : reset(env, rng);
  check_state(env, s);
  traj.states.push_back(s);

  int cap = std::min(max_steps, episode_cap(env));
  for (int t = 0; t < cap; ++t) {
    Action a = policy(s, rng);
    Transition tr = step(env, s, a, t);
    traj.actions->push_back(a);
    traj.states.push_back(tr.next_state);
    s = tr.next_state;
    if (tr.terminated || tr.truncated) break;
  }
  return traj;
}

}  // namespace rpcl
