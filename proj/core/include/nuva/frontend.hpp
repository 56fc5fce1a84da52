// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_FRONTEND_HPP
#define NUVA_FRONTEND_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "nuva/audio.hpp"

namespace nuva {

inline constexpr int kNumStaticFeatures = 13; // 12 MFCC + log energy
inline constexpr int kNumFeatures = 26;       // statics + first order deltas

struct FrontendConfig {
  double frame_len_ms = 30.0;
  double hop_ms = 10.0;
  double fft_len_ms = 64.0; // frames are zero padded up to this length
  double preemphasis = 0.95;
  int n_mfcc = 12;          // DCT-II coefficients 1..12, c0 dropped
  int lifter = 23;
  int n_mel_filters = 26;
  double mel_low_hz = 0.0;
  double mel_high_hz = 8000.0;
  int delta_window = 2;
  double log_floor = 1e-10;

  int frame_samples(int rate_hz) const;
  int hop_samples(int rate_hz) const;
  int fft_size(int rate_hz) const; // must come out a power of two
};

struct FeatureSequence {
  int dim = kNumFeatures;
  std::vector<double> values; // row major, frames() * dim
  std::vector<double> frame_times_s;

  size_t frames() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(size_t t) const {
    return std::span<const double>(values.data() + t * dim, dim);
  }
};

// y[0] = x[0], y[n] = x[n] - alpha * x[n-1].
std::vector<double> preemphasize(std::span<const double> x, double alpha);

// Contiguous frames of frame_samples every hop_samples starting at sample 0;
// yields floor((N - frame)/hop) + 1 frames for N >= frame, else none.
std::vector<std::span<const double>> frame_signal(std::span<const double> x,
                                                  int frame_samples, int hop_samples);

std::vector<double> hamming_window(int n);

// Magnitude squared spectrum of the zero padded frame, bins 0..fft_size/2.
std::vector<double> power_spectrum(std::span<const double> frame, int fft_size);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
  int n_filters = 0;
  int n_bins = 0;
  std::vector<double> center_hz;  // n_filters
  std::vector<double> weights;    // n_filters * n_bins, row major
};

MelFilterbank build_mel_filterbank(const FrontendConfig& cfg, int rate_hz);
std::vector<double> mel_energies(std::span<const double> power, const MelFilterbank& fb);

// One pre-emphasized frame -> [c1..c12, log_energy]. Windowing, the floored
// log energy, the FFT, the filterbank, the DCT-II and sinusoidal liftering
// all happen here.
std::array<double, kNumStaticFeatures> mfcc_frame(std::span<const double> frame,
                                                  const FrontendConfig& cfg,
                                                  const MelFilterbank& fb, int rate_hz);

// T x 13 statics -> T x 26 with first order regression deltas appended.
// Edges replicate the first/last frame.
std::vector<double> append_deltas(const std::vector<double>& statics, int dim,
                                  int delta_window);

// Full pipeline: int16 -> [-1, 1) scaling, pre-emphasis, framing, MFCC,
// deltas. Throws EmptyOutput when the clip is shorter than one frame and
// UnsupportedRate when the clip is not at 16 kHz.
FeatureSequence extract_features(const AudioClip& clip, const FrontendConfig& cfg = {});

// Binary dump, little endian: byte[7] magic "NUVAFT1", u32 frames, u32 dim,
// then frames*dim float32 values in row major order.
void save_features(const std::string& path, const FeatureSequence& feats);
FeatureSequence load_features(const std::string& path);

} // namespace nuva

#endif
