#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace rpcl {

enum class OutputActivation { Identity, Softmax };

/// Flat parameter-space gradient, aligned with a Network's layout.
using Gradient = Eigen::VectorXd;

enum class UpdateDirection { Descent, Ascent };

/// Fully-connected network with ReLU hidden layers and an Identity or Softmax
/// head. Parameters live in one flat 64-bit vector, per layer a row-major
/// (out x in) weight matrix followed by the bias vector. Evaluation is const
/// and allocation-light; updates produce a new value.
class Network {
 public:
  Network() = default;

  /// All-zero parameters.
  Network(std::vector<int> layer_dims, OutputActivation out_act);

  /// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
  static Network seeded(std::vector<int> layer_dims, OutputActivation out_act,
                        std::uint64_t seed);

  const std::vector<int>& layer_dims() const { return dims_; }
  OutputActivation output_activation() const { return out_act_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  Eigen::Index param_count() const { return params_.size(); }
  const Eigen::VectorXd& params() const { return params_; }
  void set_params(Eigen::VectorXd p);

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  /// Jacobian^T * upstream, where the Jacobian is of the network output
  /// (softmax included) with respect to the flat parameters. The ReLU
  /// subgradient at 0 is taken as 0.
  Gradient backward(const Eigen::VectorXd& input, const Eigen::VectorXd& upstream) const;

 private:
  std::vector<int> dims_;
  OutputActivation out_act_ = OutputActivation::Identity;
  Eigen::VectorXd params_;

  int layer_count() const { return static_cast<int>(dims_.size()) - 1; }
  Eigen::Index layer_offset(int layer) const;
  friend class NetworkLayout;
};

/// params +/- lr * grad, elementwise. Throws NumericError on non-finite
/// gradient entries.
Network apply_gradient(Network net, const Gradient& grad, double lr, UpdateDirection dir);

/// Numerically stable softmax (max-subtracted).
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Scalar loss of a network output, with its gradient wrt the output vector.
struct ScalarLoss {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
};

/// Central finite-difference check of backward() against `loss` applied to
/// forward(input). Returns max over parameters of
/// |analytic - central| / max(1e-12, |central|). eps must lie in (0, 1e-2].
double finite_diff_check(const Network& net, const Eigen::VectorXd& input,
                         const ScalarLoss& loss, double eps);

/// Same relative-error reduction for an arbitrary scalar function of the
/// parameters; used by the gradient suites for multi-forward losses.
double gradient_check(const Network& net, const std::function<double(const Network&)>& f,
                      const Gradient& analytic, double eps);

/// Adam moment state (config-gated optimizer extension; plain SGD is the
/// default everywhere).
struct AdamState {
  Eigen::VectorXd m, v;
  long long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  explicit AdamState(Eigen::Index n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  /// Returns the step to *subtract* for descent (negate for ascent).
  Eigen::VectorXd step(const Gradient& grad, double lr);
};

/// Versioned JSON checkpoint: {version, layer_dims, output_activation,
/// params}. Deterministic field order; doubles round-trip exactly.
void save_network(const Network& net, std::ostream& os, const std::string& head = "");
void save_network(const Network& net, const std::filesystem::path& path,
                  const std::string& head = "");
Network load_network(std::istream& is, std::string* head_out = nullptr);
Network load_network(const std::filesystem::path& path, std::string* head_out = nullptr);

/// FNV-1a over the raw parameter bytes; cheap change detector for tests.
std::uint64_t param_hash(const Network& net);

}  // namespace rpcl
