#pragma once

#include <span>
#include <vector>

#include "rpcl/envsim.hpp"
#include "rpcl/net.hpp"

namespace rpcl {

/// Learned state-to-reward map: an Identity-head network with one output.
struct RewardModel {
  Network net;
};

RewardModel make_reward_model(int state_dim, const std::vector<int>& hidden, std::uint64_t seed);

/// Validated set of discount factors (nonempty, each in (0,1], no duplicates).
class DiscountSet {
 public:
  explicit DiscountSet(std::vector<double> gammas);
  const std::vector<double>& gammas() const { return gammas_; }
  std::size_t size() const { return gammas_.size(); }

 private:
  std::vector<double> gammas_;
};

double immediate_reward(const RewardModel& model, const State& s);

/// Discounted cumulative reward over the post-action states:
/// sum over j = 1..T of gamma^(j-1) * g(s_j). s_0 never enters the sum.
double discounted_return(const RewardModel& model, const Trajectory& traj, double gamma);

/// Mean of discounted_return over the discount set.
double stereo_utility(const RewardModel& model, const Trajectory& traj, const DiscountSet& set);

/// D = U(tau_plus) - U(tau_star); positive when the learner's utility exceeds
/// the demonstrator's. Each trajectory is summed over its own length.
double utility_margin(const RewardModel& model, const Trajectory& tau_plus,
                      const Trajectory& tau_star, const DiscountSet& set);

/// sum over j = 1..T of gamma^(j-1) * dg(s_j)/dphi; the building block of the
/// phi-gradient's both terms.
Gradient discounted_state_gradient(const RewardModel& model, const Trajectory& traj, double gamma);

/// Gradient of the reward-learning loss
///   L = -((1-rho)/n) * sum_k G(tau_k, gamma) + rho * D
/// with respect to the reward parameters. When `stereo_first_term` is set the
/// first term uses the discount-set mean instead of the single gamma.
Gradient phi_gradient(const RewardModel& model, std::span<const Trajectory> sampled,
                      const Trajectory& tau_plus, const Trajectory& tau_star, double gamma,
                      const DiscountSet& set, double rho, bool stereo_first_term = false);

/// The scalar loss phi_gradient differentiates; forward-only, used by the
/// finite-difference suites.
double phi_loss(const RewardModel& model, std::span<const Trajectory> sampled,
                const Trajectory& tau_plus, const Trajectory& tau_star, double gamma,
                const DiscountSet& set, double rho, bool stereo_first_term = false);

}  // namespace rpcl
