#include "hybridode/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "hybridode/errors.hpp"
#include "hybridode/format.hpp"
#include "hybridode/rng.hpp"

namespace hybridode {

namespace {

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "->";
    s += std::to_string(dims[i]);
  }
  return s;
}

// W [h; 1] with the bias added last.
Vector affine(const Matrix& w, std::span<const double> h) {
  const std::size_t d = h.size();
  Vector z(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto r = w.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += r[j] * h[j];
    z[i] = s + r[d];
  }
  return z;
}

void check_input(const FeedForwardNet& net, std::span<const double> input) {
  if (input.size() != net.input_dim()) {
    throw DimensionError("network " + dims_string(net.layer_dims) + " given input of length " +
                         std::to_string(input.size()));
  }
}

}  // namespace

std::size_t FeedForwardNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.rows() * w.cols();
  return n;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

FeedForwardNet make_net(std::vector<std::size_t> layer_dims) {
  if (layer_dims.size() < 2) throw ConfigError("network needs an input and an output layer");
  if (std::find(layer_dims.begin(), layer_dims.end(), std::size_t{0}) != layer_dims.end()) {
    throw ConfigError("network layer widths must be positive: " + dims_string(layer_dims));
  }
  FeedForwardNet net{.layer_dims = std::move(layer_dims), .weights = {}};
  for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
    net.weights.emplace_back(net.layer_dims[l + 1], net.layer_dims[l] + 1);
  }
  return net;
}

void check_net(const FeedForwardNet& net) {
  if (net.layer_dims.size() < 2 || net.weights.size() != net.layer_dims.size() - 1) {
    throw DimensionError("network " + dims_string(net.layer_dims) + " has " + std::to_string(net.weights.size()) +
                         " weight layers");
  }
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const auto& w = net.weights[l];
    if (w.rows() != net.layer_dims[l + 1] || w.cols() != net.layer_dims[l] + 1) {
      throw DimensionError("network " + dims_string(net.layer_dims) + ": layer " + std::to_string(l) + " is " +
                           shape_string(w));
    }
  }
}

FeedForwardNet init_weights(std::vector<std::size_t> layer_dims, std::uint64_t seed) {
  FeedForwardNet net = make_net(std::move(layer_dims));
  NormalRng rng(seed);
  for (auto& w : net.weights) {
    const std::size_t bias = w.cols() - 1;
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < bias; ++j) w(i, j) = rng();
  }
  return net;
}

Vector forward(const FeedForwardNet& net, std::span<const double> input) {
  check_input(net, input);
  Vector h(input.begin(), input.end());
  const std::size_t last = net.depth() - 1;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    Vector z = affine(net.weights[l], h);
    if (l != last)
      for (double& v : z) v = sigmoid(v);
    h = std::move(z);
  }
  return h;
}

ForwardCache forward_cached(const FeedForwardNet& net, std::span<const double> input) {
  check_input(net, input);
  ForwardCache cache{.input = Vector(input.begin(), input.end()), .pre = {}, .post = {}};
  const std::size_t last = net.depth() - 1;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const Vector& h = l == 0 ? cache.input : cache.post.back();
    Vector z = affine(net.weights[l], h);
    Vector a = z;
    if (l != last)
      for (double& v : a) v = sigmoid(v);
    cache.pre.push_back(std::move(z));
    cache.post.push_back(std::move(a));
  }
  return cache;
}

LossAndGradient backprop(const FeedForwardNet& net, std::span<const double> input,
                         std::span<const double> target) {
  if (target.size() != net.output_dim()) {
    throw DimensionError("network " + dims_string(net.layer_dims) + " given target of length " +
                         std::to_string(target.size()));
  }
  const ForwardCache cache = forward_cached(net, input);
  const Vector& out = cache.post.back();

  double loss = 0.0;
  Vector delta(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = out[i] - target[i];
    loss += r * r;
    delta[i] = 2.0 * r;  // identity output: dz = da
  }

  Gradient grad;
  grad.layers.resize(net.depth(), Matrix(1, 1));
  for (std::size_t l = net.depth(); l-- > 0;) {
    const Matrix& w = net.weights[l];
    const Vector& h = l == 0 ? cache.input : cache.post[l - 1];
    Matrix g(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < h.size(); ++j) g(i, j) = delta[i] * h[j];
      g(i, h.size()) = delta[i];
    }
    grad.layers[l] = std::move(g);
    if (l == 0) break;

    // Back through W (bias column excluded) and the sigmoid of layer l-1.
    Vector prev(h.size(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < h.size(); ++j) prev[j] += w(i, j) * delta[i];
    for (std::size_t j = 0; j < prev.size(); ++j) prev[j] *= h[j] * (1.0 - h[j]);
    delta = std::move(prev);
  }
  return {loss, std::move(grad)};
}

FeedForwardNet permute_hidden(const FeedForwardNet& net, std::size_t layer, std::span<const std::size_t> perm) {
  check_net(net);
  if (layer + 1 >= net.depth()) {
    throw ConfigError("permute_hidden: layer " + std::to_string(layer) + " does not feed a hidden layer of " +
                      dims_string(net.layer_dims));
  }
  const std::size_t width = net.layer_dims[layer + 1];
  std::vector<bool> seen(width, false);
  if (perm.size() != width) throw ConfigError("permute_hidden: permutation length differs from layer width");
  for (std::size_t p : perm) {
    if (p >= width || seen[p]) throw ConfigError("permute_hidden: not a permutation");
    seen[p] = true;
  }

  FeedForwardNet out = net;
  const Matrix& w_in = net.weights[layer];
  const Matrix& w_out = net.weights[layer + 1];
  for (std::size_t i = 0; i < width; ++i) {
    std::copy(w_in.row(perm[i]).begin(), w_in.row(perm[i]).end(), out.weights[layer].row(i).begin());
    for (std::size_t r = 0; r < w_out.rows(); ++r) out.weights[layer + 1](r, i) = w_out(r, perm[i]);
  }
  return out;
}

void save_net(std::ostream& os, const FeedForwardNet& net) {
  check_net(net);
  os << "layer_dims";
  for (std::size_t d : net.layer_dims) os << ' ' << d;
  os << '\n';
  for (const auto& w : net.weights) {
    os << '\n';
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < w.cols(); ++j) os << (j ? " " : "") << format_real(w(i, j));
      os << '\n';
    }
  }
}

FeedForwardNet load_net(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("model: empty input");
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "layer_dims") throw ConfigError("model: expected 'layer_dims' header, got '" + tag + "'");
  std::vector<std::size_t> dims;
  for (std::size_t d; header >> d;) dims.push_back(d);
  if (!header.eof()) throw ConfigError("model: malformed layer_dims line");
  FeedForwardNet net = make_net(dims);

  for (auto& w : net.weights) {
    if (!std::getline(is, line) || !line.empty()) throw ConfigError("model: expected blank line between layers");
    for (std::size_t i = 0; i < w.rows(); ++i) {
      if (!std::getline(is, line)) throw ConfigError("model: truncated weight block");
      std::istringstream row(line);
      std::size_t j = 0;
      for (std::string tok; row >> tok; ++j) {
        if (j >= w.cols()) throw ConfigError("model: too many entries in a weight row");
        w(i, j) = parse_real(tok);
      }
      if (j != w.cols()) throw ConfigError("model: too few entries in a weight row");
    }
  }
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw ConfigError("model: trailing content");
  }
  return net;
}

std::string to_text(const FeedForwardNet& net) {
  std::ostringstream os;
  save_net(os, net);
  return os.str();
}

FeedForwardNet from_text(const std::string& text) {
  std::istringstream is(text);
  return load_net(is);
}

}  // namespace hybridode
