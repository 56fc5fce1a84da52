// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_GRU_MODEL_HPP
#define NUVA_GRU_MODEL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nuva/frontend.hpp"
#include "nuva/posteriorgram.hpp"

namespace nuva {

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
};

// One direction of one layer. Update gate z, reset gate r, candidate h:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   g = tanh(Wh x + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * g
struct GruDirectionWeights {
  Mat w_z, w_r, w_h; // units x input_dim
  Mat u_z, u_r, u_h; // units x units
  std::vector<double> b_z, b_r, b_h;
};

struct GruModel {
  int n_layers = 0;
  int units = 0;
  int input_dim = 0;
  int n_classes = 0;
  // layers[l][0] runs forward in time, layers[l][1] backward. Layer 0 sees
  // input_dim features, deeper layers the 2*units concatenation.
  std::vector<std::array<GruDirectionWeights, 2>> layers;
  Mat w_out;                  // n_classes x 2*units
  std::vector<double> b_out;  // n_classes
  std::string source_id;

  size_t parameter_count() const;
};

std::vector<double> gru_cell(std::span<const double> x,
                             std::span<const double> h_prev,
                             const GruDirectionWeights& w);

// Runs the bidirectional stack over the whole sequence and applies the output
// affine map plus a max-subtracted softmax per frame.
PosteriorgramSequence infer_posteriorgrams(const FeatureSequence& feats,
                                           const GruModel& model);

// Weight container, little endian float32:
//   byte[8] magic "NUVAGRU1", u32 n_layers, u32 units, u32 input_dim,
//   u32 n_classes, u32 n_tensors, then per tensor u32 rows, u32 cols,
//   then every tensor's values in row major order.
// Tensor order: per layer, forward then backward direction, each as
// Wz Wr Wh Uz Ur Uh bz br bh; finally the output weight and bias.
GruModel load_model(const std::string& path);
void save_model(const std::string& path, const GruModel& model);

// Deterministic small random model for tests and demos.
GruModel make_test_model(int n_layers, int units, int input_dim, int n_classes,
                         uint64_t seed);

GruModel make_zero_model(int n_layers, int units, int input_dim, int n_classes);

} // namespace nuva

#endif
