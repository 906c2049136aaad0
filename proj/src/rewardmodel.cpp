#include "rpcl/rewardmodel.hpp"

#include <algorithm>
#include <cmath>

#include "rpcl/error.hpp"

namespace rpcl {

RewardModel make_reward_model(int state_dim, const std::vector<int>& hidden, std::uint64_t seed) {
  std::vector<int> dims;
  dims.push_back(state_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return RewardModel{Network::seeded(dims, OutputActivation::Identity, seed)};
}

DiscountSet::DiscountSet(std::vector<double> gammas) : gammas_(std::move(gammas)) {
  if (gammas_.empty()) throw ConfigError("discount set must be nonempty");
  for (double g : gammas_) {
    if (!(g > 0.0 && g <= 1.0)) throw ConfigError("discount factors must lie in (0, 1]");
  }
  auto sorted = gammas_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("duplicate discount factors are not allowed");
  }
}

double immediate_reward(const RewardModel& model, const State& s) {
  return model.net.forward(s)[0];
}

namespace {

void check_traj(const Trajectory& traj, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (traj.steps() < 1) throw DimensionError("trajectory has no transitions");
}

}  // namespace

double discounted_return(const RewardModel& model, const Trajectory& traj, double gamma) {
  check_traj(traj, gamma);
  double sum = 0.0;
  double w = 1.0;
  for (int j = 1; j <= traj.steps(); ++j) {
    sum += w * immediate_reward(model, traj.states[j]);
    w *= gamma;
  }
  return sum;
}

double stereo_utility(const RewardModel& model, const Trajectory& traj, const DiscountSet& set) {
  double sum = 0.0;
  for (double g : set.gammas()) sum += discounted_return(model, traj, g);
  return sum / static_cast<double>(set.size());
}

double utility_margin(const RewardModel& model, const Trajectory& tau_plus,
                      const Trajectory& tau_star, const DiscountSet& set) {
  if (tau_plus.env != tau_star.env) throw DimensionError("utility_margin: environment mismatch");
  return stereo_utility(model, tau_plus, set) - stereo_utility(model, tau_star, set);
}

Gradient discounted_state_gradient(const RewardModel& model, const Trajectory& traj,
                                   double gamma) {
  check_traj(traj, gamma);
  Gradient acc = Eigen::VectorXd::Zero(model.net.param_count());
  Eigen::VectorXd upstream(1);
  double w = 1.0;
  for (int j = 1; j <= traj.steps(); ++j) {
    upstream[0] = w;
    acc += model.net.backward(traj.states[j], upstream);
    w *= gamma;
  }
  return acc;
}

Gradient phi_gradient(const RewardModel& model, std::span<const Trajectory> sampled,
                      const Trajectory& tau_plus, const Trajectory& tau_star, double gamma,
                      const DiscountSet& set, double rho, bool stereo_first_term) {
  if (sampled.empty()) throw DimensionError("phi_gradient: empty sample list");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");

  const double n = static_cast<double>(sampled.size());
  Gradient grad = Eigen::VectorXd::Zero(model.net.param_count());

  for (const Trajectory& traj : sampled) {
    if (stereo_first_term) {
      for (double g : set.gammas()) {
        grad -= discounted_state_gradient(model, traj, g) / static_cast<double>(set.size());
      }
    } else {
      grad -= discounted_state_gradient(model, traj, gamma);
    }
  }
  grad *= (1.0 - rho) / n;

  // Margin term: Gamma-mean of the per-gamma difference of the two
  // trajectories' discounted state-gradient sums.
  Gradient margin = Eigen::VectorXd::Zero(model.net.param_count());
  for (double g : set.gammas()) {
    margin += discounted_state_gradient(model, tau_plus, g);
    margin -= discounted_state_gradient(model, tau_star, g);
  }
  margin /= static_cast<double>(set.size());

  return grad + rho * margin;
}

double phi_loss(const RewardModel& model, std::span<const Trajectory> sampled,
                const Trajectory& tau_plus, const Trajectory& tau_star, double gamma,
                const DiscountSet& set, double rho, bool stereo_first_term) {
  if (sampled.empty()) throw DimensionError("phi_loss: empty sample list");
  double mean_return = 0.0;
  for (const Trajectory& traj : sampled) {
    mean_return += stereo_first_term ? stereo_utility(model, traj, set)
                                     : discounted_return(model, traj, gamma);
  }
  mean_return /= static_cast<double>(sampled.size());
  return -(1.0 - rho) * mean_return + rho * utility_margin(model, tau_plus, tau_star, set);
}

}  // namespace rpcl
