#include "fpgate/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "fpgate/errors.hpp"
#include "fpgate/rng.hpp"

namespace fpgate {

namespace {

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void check_shapes(const Mlp& net) {
  if (net.layer_sizes.size() < 2)
    throw ShapeMismatch("mlp needs at least input and output layers");
  if (net.weights.size() != net.layer_sizes.size() - 1 ||
      net.biases.size() != net.weights.size())
    throw ShapeMismatch("mlp layer count mismatch");
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    std::size_t rows = static_cast<std::size_t>(net.layer_sizes[l + 1]);
    std::size_t cols = static_cast<std::size_t>(net.layer_sizes[l]);
    if (net.weights[l].size() != rows * cols || net.biases[l].size() != rows)
      throw ShapeMismatch("mlp weight tensor shape mismatch at layer " +
                          std::to_string(l));
  }
}

// Forward pass keeping every layer's activations (for backprop).
std::vector<std::vector<double>> forward_all(const Mlp& net,
                                             const std::vector<double>& x) {
  std::vector<std::vector<double>> acts;
  acts.reserve(net.layer_sizes.size());
  acts.push_back(x);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    int rows = net.layer_sizes[l + 1];
    int cols = net.layer_sizes[l];
    std::vector<double> out(static_cast<std::size_t>(rows));
    const auto& in = acts.back();
    for (int r = 0; r < rows; ++r) {
      double acc = net.biases[l][r];
      const double* wrow = net.weights[l].data() + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) acc += wrow[c] * in[c];
      out[static_cast<std::size_t>(r)] = logistic(acc);
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

}  // namespace

Mlp mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw ShapeMismatch("mlp needs at least input and output layers");
  Mlp net;
  net.layer_sizes = layer_sizes;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    std::size_t rows = static_cast<std::size_t>(layer_sizes[l + 1]);
    std::size_t cols = static_cast<std::size_t>(layer_sizes[l]);
    std::vector<double> w(rows * cols);
    std::vector<double> b(rows);
    for (auto& v : w) v = rng.uniform(-0.5, 0.5);
    for (auto& v : b) v = rng.uniform(-0.5, 0.5);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& x) {
  check_shapes(net);
  if (static_cast<int>(x.size()) != net.input_size())
    throw ShapeMismatch("input size " + std::to_string(x.size()) +
                        " != layer size " + std::to_string(net.input_size()));
  return forward_all(net, x).back();
}

double mlp_loss(const Mlp& net, const std::vector<std::vector<double>>& samples,
                const std::vector<double>& labels) {
  double loss = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto out = mlp_forward(net, samples[i]);
    double d = out[0] - labels[i];
    loss += d * d;
  }
  return loss;
}

Mlp train_mlp(const std::vector<std::vector<double>>& samples,
              const std::vector<double>& labels, int epochs, double rate,
              std::uint64_t seed, const std::vector<int>& hidden_sizes) {
  if (samples.empty() || samples.size() != labels.size())
    throw ShapeMismatch("sample/label count mismatch");
  if (epochs < 1) throw ShapeMismatch("epochs must be >= 1");
  std::size_t in_dim = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != in_dim) throw ShapeMismatch("inconsistent sample widths");

  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(in_dim));
  sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(1);

  Rng rng(seed);
  Mlp net;
  {
    // Same init schedule as mlp_init, drawn from the shared stream.
    net.layer_sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      std::size_t rows = static_cast<std::size_t>(sizes[l + 1]);
      std::size_t cols = static_cast<std::size_t>(sizes[l]);
      std::vector<double> w(rows * cols);
      std::vector<double> b(rows);
      for (auto& v : w) v = rng.uniform(-0.5, 0.5);
      for (auto& v : b) v = rng.uniform(-0.5, 0.5);
      net.weights.push_back(std::move(w));
      net.biases.push_back(std::move(b));
    }
  }

  Mlp best = net;
  double best_loss = mlp_loss(net, samples, labels);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);

  std::size_t nl = net.weights.size();
  for (int epoch = 0; epoch < epochs; ++epoch) {
    // Fisher-Yates with the shared stream.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng.below(i));
      std::swap(order[i - 1], order[j]);
    }

    for (std::size_t s : order) {
      auto acts = forward_all(net, samples[s]);
      // Output delta for squared error through the logistic.
      std::vector<double> delta(1);
      double y = acts.back()[0];
      delta[0] = (y - labels[s]) * y * (1.0 - y);

      for (std::size_t l = nl; l-- > 0;) {
        int rows = net.layer_sizes[l + 1];
        int cols = net.layer_sizes[l];
        std::vector<double> prev_delta;
        if (l > 0) {
          prev_delta.assign(static_cast<std::size_t>(cols), 0.0);
          for (int r = 0; r < rows; ++r) {
            const double* wrow =
                net.weights[l].data() + static_cast<std::size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) prev_delta[c] += wrow[c] * delta[r];
          }
          for (int c = 0; c < cols; ++c) {
            double a = acts[l][static_cast<std::size_t>(c)];
            prev_delta[c] *= a * (1.0 - a);
          }
        }
        for (int r = 0; r < rows; ++r) {
          double* wrow = net.weights[l].data() + static_cast<std::size_t>(r) * cols;
          double g = rate * delta[static_cast<std::size_t>(r)];
          for (int c = 0; c < cols; ++c) wrow[c] -= g * acts[l][static_cast<std::size_t>(c)];
          net.biases[l][static_cast<std::size_t>(r)] -= g;
        }
        if (l > 0) delta = std::move(prev_delta);
      }
    }

    double loss = mlp_loss(net, samples, labels);
    if (loss < best_loss) {
      best_loss = loss;
      best = net;
    }
  }
  return best;
}

std::string mlp_serialize(const Mlp& net) {
  check_shapes(net);
  std::string out = "MLP1\nlayers=";
  for (std::size_t i = 0; i < net.layer_sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(net.layer_sizes[i]);
  }
  out += '\n';
  char buf[64];
  auto emit = [&](const std::vector<double>& v, const char* tag) {
    out += tag;
    out += '=';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
      out += buf;
    }
    out += '\n';
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    emit(net.weights[l], "w");
    emit(net.biases[l], "b");
  }
  out += "end\n";
  return out;
}

namespace {

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace

Mlp mlp_parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "MLP1")
    throw ShapeMismatch("not an MLP1 stream");
  if (!std::getline(in, line) || line.rfind("layers=", 0) != 0)
    throw ShapeMismatch("missing layers line");

  Mlp net;
  for (double v : parse_csv_doubles(line.substr(7)))
    net.layer_sizes.push_back(static_cast<int>(v));
  if (net.layer_sizes.size() < 2) throw ShapeMismatch("bad layer sizes");

  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    if (!std::getline(in, line) || line.rfind("w=", 0) != 0)
      throw ShapeMismatch("missing weight line for layer " + std::to_string(l));
    net.weights.push_back(parse_csv_doubles(line.substr(2)));
    if (!std::getline(in, line) || line.rfind("b=", 0) != 0)
      throw ShapeMismatch("missing bias line for layer " + std::to_string(l));
    net.biases.push_back(parse_csv_doubles(line.substr(2)));
  }
  if (!std::getline(in, line) || line != "end")
    throw ShapeMismatch("missing end marker");
  check_shapes(net);
  return net;
}

Mlp default_selector_net(int levels) {
  int subbands = 3 * levels + 1;
  Mlp net;
  net.layer_sizes = {1 + subbands, 8, 1};
  net.weights.assign(2, {});
  net.biases.assign(2, {});
  net.weights[0].assign(static_cast<std::size_t>(8 * (1 + subbands)), 0.0);
  net.biases[0].assign(8, 0.0);
  net.weights[1].assign(8, 0.0);
  net.biases[1].assign(1, 0.0);

  // Hidden unit 0 ranks subbands: finest detail first, the smooth LL
  // band last. The statistic value itself carries no weight, so both
  // templates of a pair always keep the same subbands and the cosine
  // compares like against like.
  for (int s = 0; s < subbands; ++s) {
    double pref;
    if (s == subbands - 1) {
      pref = -2.0;  // LL
    } else {
      pref = 2.0 - 0.2 * s;
    }
    net.weights[0][static_cast<std::size_t>(1 + s)] = pref;
  }
  net.weights[1][0] = 4.0;
  return net;
}

}  // namespace fpgate
