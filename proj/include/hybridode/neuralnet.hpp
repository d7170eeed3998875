#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hybridode/linalg.hpp"

namespace hybridode {

/// Fully connected network. Hidden layers apply the logistic sigmoid
/// elementwise, the output layer is linear.
///
/// weights[l] maps layer l to layer l+1 and has shape
/// layer_dims[l+1] x (layer_dims[l] + 1): the last column multiplies a
/// constant 1 appended to the layer's input, i.e. it holds the biases.
struct FeedForwardNet {
  std::vector<std::size_t> layer_dims;
  std::vector<Matrix> weights;

  std::size_t depth() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
  std::size_t parameter_count() const;

  friend bool operator==(const FeedForwardNet&, const FeedForwardNet&) = default;
};

/// Per-layer derivatives, shaped like FeedForwardNet::weights.
struct Gradient {
  std::vector<Matrix> layers;
};

/// Activations kept by forward_cached; one entry per weight layer.
struct ForwardCache {
  Vector input;
  std::vector<Vector> pre;   // W_l [h_l; 1]
  std::vector<Vector> post;  // activation of pre
};

struct LossAndGradient {
  double loss;
  Gradient grad;
};

inline constexpr std::size_t kDefaultHiddenWidth = 10;

double sigmoid(double x);

/// All-zero network; throws ConfigError for fewer than two layers or a zero width.
FeedForwardNet make_net(std::vector<std::size_t> layer_dims);
void check_net(const FeedForwardNet& net);

/// Bias columns zero, every other weight i.i.d. N(0, 1) from `seed`.
FeedForwardNet init_weights(std::vector<std::size_t> layer_dims, std::uint64_t seed);

Vector forward(const FeedForwardNet& net, std::span<const double> input);
ForwardCache forward_cached(const FeedForwardNet& net, std::span<const double> input);

/// loss = ||forward(input) - target||^2 (sum of squares, not averaged) and its
/// exact gradient with respect to every weight.
LossAndGradient backprop(const FeedForwardNet& net, std::span<const double> input,
                         std::span<const double> target);

/// Reorders the neurons produced by weights[layer] (a hidden layer):
/// neuron i of the result is neuron perm[i] of `net`. Rows of weights[layer]
/// and the matching input columns of weights[layer + 1] move together, so the
/// network computes the same function.
FeedForwardNet permute_hidden(const FeedForwardNet& net, std::size_t layer, std::span<const std::size_t> perm);

/// Text model format:
///
///   layer_dims d0 d1 ... dL
///   <blank line>
///   rows of weights[0], entries space separated
///   <blank line>
///   rows of weights[1]
///   ...
///
/// Numbers carry 17 significant digits, so a save/load round trip is exact.
void save_net(std::ostream& os, const FeedForwardNet& net);
FeedForwardNet load_net(std::istream& is);
std::string to_text(const FeedForwardNet& net);
FeedForwardNet from_text(const std::string& text);

}  // namespace hybridode
