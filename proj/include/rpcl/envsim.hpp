#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rpcl/rng.hpp"

namespace rpcl {

enum class EnvId { CartPole, MountainCarDiscrete, MountainCarContinuous };

/// State vector; length is fixed per environment (CartPole: 4, MountainCar: 2).
using State = Eigen::VectorXd;

int state_dim(EnvId env);
int action_count(EnvId env);  // 0 for the continuous environment
bool has_discrete_actions(EnvId env);
int episode_cap(EnvId env);
std::string env_name(EnvId env);
std::optional<EnvId> env_from_name(std::string_view name);

/// Discrete action index or continuous scalar, depending on the environment.
class Action {
 public:
  static Action discrete(int index) { return Action(index); }
  static Action continuous(double value) { return Action(value); }

  bool is_discrete() const { return std::holds_alternative<int>(v_); }
  int index() const { return std::get<int>(v_); }
  double value() const { return std::get<double>(v_); }

  bool operator==(const Action& o) const { return v_ == o.v_; }

 private:
  explicit Action(int i) : v_(i) {}
  explicit Action(double d) : v_(d) {}
  std::variant<int, double> v_;
};

/// Result of one environment step. The true environment reward is kept out of
/// reach of training code: it can only be read through env_reward_for_eval(),
/// and every read bumps a global counter that the training tests check.
class Transition {
 public:
  State next_state;
  bool terminated = false;
  bool truncated = false;

  double env_reward_for_eval() const;

 private:
  double hidden_env_reward_ = 0.0;
  friend Transition step(EnvId, const State&, const Action&, int);
};

/// Number of hidden env-reward reads since startup (or the last reset).
std::uint64_t env_reward_read_count();
void reset_env_reward_read_count();

/// Draw an initial state. CartPole: all four components uniform in
/// [-0.05, 0.05]. MountainCar (both): position uniform in [-0.6, -0.4],
/// velocity 0.
State reset(EnvId env, Pcg32& rng);

/// One Euler integration step of the published dynamics. `step_index` is the
/// number of steps already taken in the episode; truncation fires when
/// step_index + 1 reaches the episode cap.
Transition step(EnvId env, const State& state, const Action& action, int step_index);

struct Trajectory {
  EnvId env{};
  std::vector<State> states;                        // length T + 1
  std::optional<std::vector<Action>> actions;       // length T when present
  int steps() const { return static_cast<int>(states.size()) - 1; }
};

using ActionSource = std::function<Action(const State&, Pcg32&)>;

/// Roll out a policy from a fresh reset state (or `start` when supplied),
/// stopping at termination, truncation, or max_steps. Records actions.
Trajectory rollout(EnvId env, const ActionSource& policy, Pcg32& rng, int max_steps,
                   const std::optional<State>& start = std::nullopt);

}  // namespace rpcl
