#include "rpcl/net.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rpcl/error.hpp"
#include "rpcl/rng.hpp"

namespace rpcl {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WeightMap = Eigen::Map<const RowMajorMatrix>;
using BiasMap = Eigen::Map<const Eigen::VectorXd>;

Eigen::Index param_count_for(const std::vector<int>& dims) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    n += static_cast<Eigen::Index>(dims[l]) * dims[l + 1] + dims[l + 1];
  }
  return n;
}

void validate_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw ConfigError("network needs at least input and output dims");
  for (int d : dims) {
    if (d <= 0) throw ConfigError("network layer dims must be positive");
  }
}

}  // namespace

Network::Network(std::vector<int> layer_dims, OutputActivation out_act)
    : dims_(std::move(layer_dims)), out_act_(out_act) {
  validate_dims(dims_);
  params_ = Eigen::VectorXd::Zero(param_count_for(dims_));
}

Network Network::seeded(std::vector<int> layer_dims, OutputActivation out_act,
                        std::uint64_t seed) {
  Network net(std::move(layer_dims), out_act);
  Pcg32 rng(seed);
  Eigen::Index pos = 0;
  for (int l = 0; l + 1 < static_cast<int>(net.dims_.size()); ++l) {
    int fan_in = net.dims_[l];
    int fan_out = net.dims_[l + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < fan_in * fan_out; ++i) net.params_[pos++] = rng.uniform(-bound, bound);
    pos += fan_out;  // biases stay zero
  }
  return net;
}

void Network::set_params(Eigen::VectorXd p) {
  if (p.size() != params_.size()) throw DimensionError("parameter vector length mismatch");
  params_ = std::move(p);
}

Eigen::Index Network::layer_offset(int layer) const {
  Eigen::Index off = 0;
  for (int l = 0; l < layer; ++l) {
    off += static_cast<Eigen::Index>(dims_[l]) * dims_[l + 1] + dims_[l + 1];
  }
  return off;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd e = shifted.array().exp();
  return e / e.sum();
}

Eigen::VectorXd Network::forward(const Eigen::VectorXd& input) const {
  if (input.size() != input_dim()) {
    throw DimensionError("forward: input length " + std::to_string(input.size()) +
                         " != " + std::to_string(input_dim()));
  }
  Eigen::VectorXd a = input;
  for (int l = 0; l < layer_count(); ++l) {
    const int in = dims_[l], out = dims_[l + 1];
    const Eigen::Index off = layer_offset(l);
    WeightMap w(params_.data() + off, out, in);
    BiasMap b(params_.data() + off + static_cast<Eigen::Index>(in) * out, out);
    Eigen::VectorXd z = w * a + b;
    if (l + 1 < layer_count()) {
      a = z.cwiseMax(0.0);
    } else {
      a = out_act_ == OutputActivation::Softmax ? softmax(z) : z;
    }
  }
  return a;
}

Gradient Network::backward(const Eigen::VectorXd& input, const Eigen::VectorXd& upstream) const {
  if (input.size() != input_dim()) throw DimensionError("backward: input length mismatch");
  if (upstream.size() != output_dim()) throw DimensionError("backward: upstream length mismatch");

  const int nl = layer_count();
  std::vector<Eigen::VectorXd> acts(nl + 1);  // post-activation per layer
  std::vector<Eigen::VectorXd> pre(nl);       // pre-activation per layer
  acts[0] = input;
  for (int l = 0; l < nl; ++l) {
    const int in = dims_[l], out = dims_[l + 1];
    const Eigen::Index off = layer_offset(l);
    WeightMap w(params_.data() + off, out, in);
    BiasMap b(params_.data() + off + static_cast<Eigen::Index>(in) * out, out);
    pre[l] = w * acts[l] + b;
    if (l + 1 < nl) {
      acts[l + 1] = pre[l].cwiseMax(0.0);
    } else {
      acts[l + 1] =
          out_act_ == OutputActivation::Softmax ? softmax(pre[l]) : pre[l];
    }
  }

  Gradient grad = Eigen::VectorXd::Zero(params_.size());

  // Delta wrt the output layer's pre-activation.
  Eigen::VectorXd delta;
  if (out_act_ == OutputActivation::Softmax) {
    const Eigen::VectorXd& p = acts[nl];
    double mix = p.dot(upstream);
    delta = (p.array() * (upstream.array() - mix)).matrix();
  } else {
    delta = upstream;
  }

  for (int l = nl - 1; l >= 0; --l) {
    const int in = dims_[l], out = dims_[l + 1];
    const Eigen::Index off = layer_offset(l);
    Eigen::Map<RowMajorMatrix> gw(grad.data() + off, out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + off + static_cast<Eigen::Index>(in) * out, out);
    gw = delta * acts[l].transpose();
    gb = delta;
    if (l > 0) {
      WeightMap w(params_.data() + off, out, in);
      Eigen::VectorXd back = w.transpose() * delta;
      // ReLU subgradient: 0 at and below zero.
      delta = (back.array() * (pre[l - 1].array() > 0.0).cast<double>()).matrix();
    }
  }
  return grad;
}

Network apply_gradient(Network net, const Gradient& grad, double lr, UpdateDirection dir) {
  if (grad.size() != net.param_count()) throw DimensionError("gradient length mismatch");
  if (!grad.allFinite()) throw NumericError("non-finite gradient entries");
  double sign = dir == UpdateDirection::Descent ? -1.0 : 1.0;
  Eigen::VectorXd p = net.params() + sign * lr * grad;
  net.set_params(std::move(p));
  return net;
}

namespace {

double central_difference_max_rel_err(const Network& net,
                                      const std::function<double(const Network&)>& f,
                                      const Gradient& analytic, double eps) {
  Network probe = net;
  Eigen::VectorXd base = net.params();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    Eigen::VectorXd p = base;
    p[i] = base[i] + eps;
    probe.set_params(p);
    double up = f(probe);
    p[i] = base[i] - eps;
    probe.set_params(p);
    double down = f(probe);
    double central = (up - down) / (2.0 * eps);
    double err = std::abs(analytic[i] - central) / std::max(1e-12, std::abs(central));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace

double finite_diff_check(const Network& net, const Eigen::VectorXd& input,
                         const ScalarLoss& loss, double eps) {
  if (!(eps > 0.0 && eps <= 1e-2)) throw ConfigError("finite_diff_check: eps must be in (0, 1e-2]");
  Eigen::VectorXd out = net.forward(input);
  Gradient analytic = net.backward(input, loss.grad(out));
  auto f = [&](const Network& n) { return loss.value(n.forward(input)); };
  return central_difference_max_rel_err(net, f, analytic, eps);
}

double gradient_check(const Network& net, const std::function<double(const Network&)>& f,
                      const Gradient& analytic, double eps) {
  if (!(eps > 0.0 && eps <= 1e-2)) throw ConfigError("gradient_check: eps must be in (0, 1e-2]");
  if (analytic.size() != net.param_count()) throw DimensionError("analytic gradient length mismatch");
  return central_difference_max_rel_err(net, f, analytic, eps);
}

Eigen::VectorXd AdamState::step(const Gradient& grad, double lr) {
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v.array() + (1.0 - beta2) * grad.array().square();
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  return (lr * (m / bc1).array() / ((v / bc2).array().sqrt() + eps)).matrix();
}

namespace {

nlohmann::ordered_json network_to_json(const Network& net, const std::string& head) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["layer_dims"] = net.layer_dims();
  j["output_activation"] =
      net.output_activation() == OutputActivation::Softmax ? "softmax" : "identity";
  if (!head.empty()) j["head"] = head;
  std::vector<double> p(net.params().data(), net.params().data() + net.param_count());
  j["params"] = p;
  return j;
}

Network network_from_json(const nlohmann::json& j, std::string* head_out) {
  if (!j.contains("version") || j["version"].get<int>() != 1) {
    throw ParseError("unsupported checkpoint version", 1);
  }
  std::vector<int> dims = j.at("layer_dims").get<std::vector<int>>();
  std::string act = j.at("output_activation").get<std::string>();
  OutputActivation out_act;
  if (act == "identity") {
    out_act = OutputActivation::Identity;
  } else if (act == "softmax") {
    out_act = OutputActivation::Softmax;
  } else {
    throw ParseError("unknown output_activation '" + act + "'", 1);
  }
  std::vector<double> p = j.at("params").get<std::vector<double>>();
  Network net(dims, out_act);
  if (static_cast<Eigen::Index>(p.size()) != net.param_count()) {
    throw ParseError("params length does not match layer_dims", 1);
  }
  net.set_params(Eigen::Map<const Eigen::VectorXd>(p.data(), p.size()));
  if (head_out) *head_out = j.contains("head") ? j["head"].get<std::string>() : "";
  return net;
}

}  // namespace

void save_network(const Network& net, std::ostream& os, const std::string& head) {
  os << network_to_json(net, head).dump() << '\n';
}

void save_network(const Network& net, const std::filesystem::path& path, const std::string& head) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  save_network(net, os, head);
}

Network load_network(std::istream& is, std::string* head_out) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid checkpoint JSON: ") + e.what(), 1);
  }
  return network_from_json(j, head_out);
}

Network load_network(const std::filesystem::path& path, std::string* head_out) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return load_network(is, head_out);
}

std::uint64_t param_hash(const Network& net) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(net.params().data());
  std::size_t n = static_cast<std::size_t>(net.param_count()) * sizeof(double);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace rpcl
