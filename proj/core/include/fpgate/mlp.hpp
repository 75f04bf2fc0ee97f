#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fpgate {

/// Fully-connected perceptron, logistic activation on every layer.
/// weights[l] is row-major (layer_sizes[l+1] x layer_sizes[l]).
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  bool operator==(const Mlp&) const = default;
};

// Seeded uniform(-0.5, 0.5) initialization; the fixed schedule the trainer
// and the default selector net share.
Mlp mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Affine + logistic per layer; outputs in (0,1). Throws ShapeMismatch.
std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& x);

// Plain per-sample stochastic gradient backprop with squared-error loss.
// Deterministic given seed (init and per-epoch shuffle come from one
// stream). Returns the epoch snapshot with the lowest training loss, so
// the result never scores worse than the initial net.
Mlp train_mlp(const std::vector<std::vector<double>>& samples,
              const std::vector<double>& labels, int epochs, double rate,
              std::uint64_t seed, const std::vector<int>& hidden_sizes = {8});

// Total squared-error loss over a training set.
double mlp_loss(const Mlp& net, const std::vector<std::vector<double>>& samples,
                const std::vector<double>& labels);

// Versioned text format "MLP1": layer sizes line, then row-major weights
// and biases per layer at 17 significant digits (bit-exact round-trip).
std::string mlp_serialize(const Mlp& net);
Mlp mlp_parse(const std::string& text);

// The selector net the pipeline ships with: deterministic seeded init for
// input size 1 + (3*levels + 1).
Mlp default_selector_net(int levels = 3);

}  // namespace fpgate
