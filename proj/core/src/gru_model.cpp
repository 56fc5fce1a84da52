// SPDX-License-Identifier: Apache-2.0
#include "nuva/gru_model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "nuva/errors.hpp"
#include "nuva/util.hpp"

namespace nuva {

namespace {

constexpr char kMagic[8] = {'N', 'U', 'V', 'A', 'G', 'R', 'U', '1'};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = M x + b (b optional), y sized to M.rows.
void affine(const Mat& m, std::span<const double> x, const std::vector<double>* b,
            std::vector<double>& y) {
  y.assign(m.rows, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    const double* row = m.v.data() + static_cast<size_t>(r) * m.cols;
    double acc = b ? (*b)[r] : 0.0;
    for (int c = 0; c < m.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void accumulate(const Mat& m, std::span<const double> x, std::vector<double>& y) {
  for (int r = 0; r < m.rows; ++r) {
    const double* row = m.v.data() + static_cast<size_t>(r) * m.cols;
    double acc = y[r];
    for (int c = 0; c < m.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

struct TensorWriter {
  std::ofstream out;
  std::vector<std::pair<uint32_t, uint32_t>> shapes;
  std::vector<const std::vector<double>*> payloads;

  void add(const Mat& m) {
    shapes.emplace_back(m.rows, m.cols);
    payloads.push_back(&m.v);
  }
  void add(const std::vector<double>& v) {
    shapes.emplace_back(static_cast<uint32_t>(v.size()), 1);
    payloads.push_back(&v);
  }
};

void put_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw ShapeMismatch("truncated model header: " + path);
  }
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void read_tensor(std::ifstream& in, const std::string& path, uint32_t rows,
                 uint32_t cols, std::vector<double>& dst) {
  std::vector<float> buf(static_cast<size_t>(rows) * cols);
  if (!in.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
    throw ShapeMismatch("truncated model tensor: " + path);
  }
  dst.resize(buf.size());
  for (size_t i = 0; i < buf.size(); ++i) {
    if (!std::isfinite(buf[i])) throw NonFiniteWeight("non-finite weight in " + path);
    dst[i] = buf[i];
  }
}

GruModel empty_model(int n_layers, int units, int input_dim, int n_classes) {
  if (n_layers < 1 || units < 1 || input_dim < 1 || n_classes < 1) {
    throw ShapeMismatch("model dimensions must be positive");
  }
  GruModel m;
  m.n_layers = n_layers;
  m.units = units;
  m.input_dim = input_dim;
  m.n_classes = n_classes;
  m.layers.resize(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    int in_dim = l == 0 ? input_dim : 2 * units;
    for (int d = 0; d < 2; ++d) {
      auto& w = m.layers[l][d];
      w.w_z = Mat(units, in_dim);
      w.w_r = Mat(units, in_dim);
      w.w_h = Mat(units, in_dim);
      w.u_z = Mat(units, units);
      w.u_r = Mat(units, units);
      w.u_h = Mat(units, units);
      w.b_z.assign(units, 0.0);
      w.b_r.assign(units, 0.0);
      w.b_h.assign(units, 0.0);
    }
  }
  m.w_out = Mat(n_classes, 2 * units);
  m.b_out.assign(n_classes, 0.0);
  return m;
}

} // namespace

size_t GruModel::parameter_count() const {
  size_t n = 0;
  for (const auto& layer : layers) {
    for (const auto& w : layer) {
      n += w.w_z.v.size() + w.w_r.v.size() + w.w_h.v.size();
      n += w.u_z.v.size() + w.u_r.v.size() + w.u_h.v.size();
      n += w.b_z.size() + w.b_r.size() + w.b_h.size();
    }
  }
  n += w_out.v.size() + b_out.size();
  return n;
}

std::vector<double> gru_cell(std::span<const double> x,
                             std::span<const double> h_prev,
                             const GruDirectionWeights& w) {
  const int units = w.u_z.rows;
  if (static_cast<int>(x.size()) != w.w_z.cols ||
      static_cast<int>(h_prev.size()) != units) {
    throw ModelDimensionError("gru_cell input dimensions do not match weights");
  }
  std::vector<double> z, r, g;
  affine(w.w_z, x, &w.b_z, z);
  accumulate(w.u_z, h_prev, z);
  affine(w.w_r, x, &w.b_r, r);
  accumulate(w.u_r, h_prev, r);
  for (int i = 0; i < units; ++i) {
    z[i] = sigmoid(z[i]);
    r[i] = sigmoid(r[i]);
  }
  std::vector<double> rh(units);
  for (int i = 0; i < units; ++i) rh[i] = r[i] * h_prev[i];
  affine(w.w_h, x, &w.b_h, g);
  accumulate(w.u_h, rh, g);
  std::vector<double> h(units);
  for (int i = 0; i < units; ++i) {
    double cand = std::tanh(g[i]);
    h[i] = (1.0 - z[i]) * h_prev[i] + z[i] * cand;
  }
  return h;
}

PosteriorgramSequence infer_posteriorgrams(const FeatureSequence& feats,
                                           const GruModel& model) {
  if (feats.dim != model.input_dim) {
    throw ModelDimensionError("feature dim " + std::to_string(feats.dim) +
                              " does not match model input dim " +
                              std::to_string(model.input_dim));
  }
  if (model.n_classes != kNumPhoneClasses) {
    throw ModelDimensionError("model emits " + std::to_string(model.n_classes) +
                              " classes, expected " + std::to_string(kNumPhoneClasses));
  }
  const size_t t_count = feats.frames();
  const int units = model.units;

  std::vector<double> layer_in(feats.values);
  int in_dim = feats.dim;
  std::vector<double> layer_out;
  for (int l = 0; l < model.n_layers; ++l) {
    layer_out.assign(t_count * 2 * units, 0.0);
    const auto& fwd = model.layers[l][0];
    const auto& bwd = model.layers[l][1];
    std::vector<double> h(units, 0.0);
    for (size_t t = 0; t < t_count; ++t) {
      std::span<const double> x(layer_in.data() + t * in_dim, in_dim);
      h = gru_cell(x, h, fwd);
      std::copy(h.begin(), h.end(), layer_out.begin() + t * 2 * units);
    }
    h.assign(units, 0.0);
    for (size_t t = t_count; t-- > 0;) {
      std::span<const double> x(layer_in.data() + t * in_dim, in_dim);
      h = gru_cell(x, h, bwd);
      std::copy(h.begin(), h.end(), layer_out.begin() + t * 2 * units + units);
    }
    layer_in.swap(layer_out);
    in_dim = 2 * units;
  }

  PosteriorgramSequence seq;
  seq.resize_frames(t_count);
  seq.source_id = model.source_id;
  std::vector<double> logits;
  for (size_t t = 0; t < t_count; ++t) {
    std::span<const double> x(layer_in.data() + t * in_dim, in_dim);
    affine(model.w_out, x, &model.b_out, logits);
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    auto row = seq.row(t);
    for (int k = 0; k < model.n_classes; ++k) {
      row[k] = std::exp(logits[k] - mx);
      sum += row[k];
    }
    for (int k = 0; k < model.n_classes; ++k) row[k] /= sum;
  }
  return seq;
}

GruModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open model file: " + path);
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw BadMagic("bad model magic: " + path);
  }
  uint32_t n_layers = get_u32(in, path);
  uint32_t units = get_u32(in, path);
  uint32_t input_dim = get_u32(in, path);
  uint32_t n_classes = get_u32(in, path);
  if (n_layers < 1 || n_layers > 64 || units < 1 || units > 4096 ||
      input_dim < 1 || input_dim > 4096 || n_classes < 1 || n_classes > 4096) {
    throw ShapeMismatch("implausible model dimensions: " + path);
  }
  uint32_t n_tensors = get_u32(in, path);
  const uint32_t expected_tensors = n_layers * 2 * 9 + 2;
  if (n_tensors != expected_tensors) {
    throw ShapeMismatch("expected " + std::to_string(expected_tensors) +
                        " tensors, header lists " + std::to_string(n_tensors) +
                        ": " + path);
  }
  std::vector<std::pair<uint32_t, uint32_t>> shapes(n_tensors);
  for (auto& s : shapes) {
    s.first = get_u32(in, path);
    s.second = get_u32(in, path);
  }

  GruModel m = empty_model(static_cast<int>(n_layers), static_cast<int>(units),
                           static_cast<int>(input_dim), static_cast<int>(n_classes));
  size_t idx = 0;
  auto expect = [&](uint32_t rows, uint32_t cols, std::vector<double>& dst) {
    if (shapes[idx].first != rows || shapes[idx].second != cols) {
      throw ShapeMismatch("tensor " + std::to_string(idx) + " has shape " +
                          std::to_string(shapes[idx].first) + "x" +
                          std::to_string(shapes[idx].second) + ", expected " +
                          std::to_string(rows) + "x" + std::to_string(cols) +
                          ": " + path);
    }
    read_tensor(in, path, rows, cols, dst);
    ++idx;
  };
  for (uint32_t l = 0; l < n_layers; ++l) {
    uint32_t in_dim = l == 0 ? input_dim : 2 * units;
    for (int d = 0; d < 2; ++d) {
      auto& w = m.layers[l][d];
      expect(units, in_dim, w.w_z.v);
      expect(units, in_dim, w.w_r.v);
      expect(units, in_dim, w.w_h.v);
      expect(units, units, w.u_z.v);
      expect(units, units, w.u_r.v);
      expect(units, units, w.u_h.v);
      expect(units, 1, w.b_z);
      expect(units, 1, w.b_r);
      expect(units, 1, w.b_h);
    }
  }
  expect(n_classes, 2 * units, m.w_out.v);
  expect(n_classes, 1, m.b_out);

  std::ifstream again(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(again)),
                          std::istreambuf_iterator<char>());
  m.source_id = "gru:" + hex16(fnv1a64(bytes.data(), bytes.size()));
  return m;
}

void save_model(const std::string& path, const GruModel& m) {
  TensorWriter w;
  w.out.open(path, std::ios::binary);
  if (!w.out) throw FileError("cannot write model file: " + path);
  for (const auto& layer : m.layers) {
    for (const auto& dir : layer) {
      w.add(dir.w_z);
      w.add(dir.w_r);
      w.add(dir.w_h);
      w.add(dir.u_z);
      w.add(dir.u_r);
      w.add(dir.u_h);
      w.add(dir.b_z);
      w.add(dir.b_r);
      w.add(dir.b_h);
    }
  }
  w.add(m.w_out);
  w.add(m.b_out);

  w.out.write(kMagic, sizeof(kMagic));
  put_u32(w.out, static_cast<uint32_t>(m.n_layers));
  put_u32(w.out, static_cast<uint32_t>(m.units));
  put_u32(w.out, static_cast<uint32_t>(m.input_dim));
  put_u32(w.out, static_cast<uint32_t>(m.n_classes));
  put_u32(w.out, static_cast<uint32_t>(w.shapes.size()));
  for (const auto& s : w.shapes) {
    put_u32(w.out, s.first);
    put_u32(w.out, s.second);
  }
  for (const auto* payload : w.payloads) {
    std::vector<float> buf(payload->size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>((*payload)[i]);
    w.out.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
}

GruModel make_test_model(int n_layers, int units, int input_dim, int n_classes,
                         uint64_t seed) {
  GruModel m = make_zero_model(n_layers, units, input_dim, n_classes);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::vector<double>& v, double scale) {
    for (double& x : v) x = (uniform01(rng) * 2.0 - 1.0) * scale;
  };
  for (auto& layer : m.layers) {
    for (auto& dir : layer) {
      double ws = 1.0 / std::sqrt(static_cast<double>(dir.w_z.cols));
      double us = 1.0 / std::sqrt(static_cast<double>(units));
      fill(dir.w_z.v, ws);
      fill(dir.w_r.v, ws);
      fill(dir.w_h.v, ws);
      fill(dir.u_z.v, us);
      fill(dir.u_r.v, us);
      fill(dir.u_h.v, us);
      fill(dir.b_z, 0.1);
      fill(dir.b_r, 0.1);
      fill(dir.b_h, 0.1);
    }
  }
  fill(m.w_out.v, 1.0 / std::sqrt(2.0 * units));
  fill(m.b_out, 0.1);
  m.source_id = "test-model:seed=" + std::to_string(seed);
  return m;
}

GruModel make_zero_model(int n_layers, int units, int input_dim, int n_classes) {
  GruModel m = empty_model(n_layers, units, input_dim, n_classes);
  m.source_id = "zero-model";
  return m;
}

} // namespace nuva
