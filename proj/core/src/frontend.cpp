// SPDX-License-Identifier: Apache-2.0
#include "nuva/frontend.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "nuva/errors.hpp"

namespace nuva {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT.
void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const size_t n = re.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        size_t a = i + k, b = i + k + len / 2;
        double tr = re[b] * cr - im[b] * ci;
        double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

constexpr char kMagic[7] = {'N', 'U', 'V', 'A', 'F', 'T', '1'};

} // namespace

int FrontendConfig::frame_samples(int rate_hz) const {
  return static_cast<int>(std::lround(frame_len_ms * rate_hz / 1000.0));
}

int FrontendConfig::hop_samples(int rate_hz) const {
  return static_cast<int>(std::lround(hop_ms * rate_hz / 1000.0));
}

int FrontendConfig::fft_size(int rate_hz) const {
  int n = static_cast<int>(std::lround(fft_len_ms * rate_hz / 1000.0));
  if (!is_pow2(n)) throw Error("fft length must map to a power of two samples");
  return n;
}

std::vector<double> preemphasize(std::span<const double> x, double alpha) {
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (size_t n = 1; n < x.size(); ++n) y[n] = x[n] - alpha * x[n - 1];
  return y;
}

std::vector<std::span<const double>> frame_signal(std::span<const double> x,
                                                  int frame_samples, int hop_samples) {
  std::vector<std::span<const double>> frames;
  if (frame_samples <= 0 || hop_samples <= 0) throw Error("bad framing parameters");
  if (x.size() < static_cast<size_t>(frame_samples)) return frames;
  size_t n_frames = (x.size() - frame_samples) / hop_samples + 1;
  frames.reserve(n_frames);
  for (size_t t = 0; t < n_frames; ++t) {
    frames.push_back(x.subspan(t * hop_samples, frame_samples));
  }
  return frames;
}

std::vector<double> hamming_window(int n) {
  std::vector<double> w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (n - 1));
  }
  return w;
}

std::vector<double> power_spectrum(std::span<const double> frame, int fft_size) {
  if (!is_pow2(fft_size)) throw Error("fft size must be a power of two");
  if (frame.size() > static_cast<size_t>(fft_size)) {
    throw Error("frame longer than fft size");
  }
  std::vector<double> re(fft_size, 0.0), im(fft_size, 0.0);
  std::copy(frame.begin(), frame.end(), re.begin());
  fft_radix2(re, im);
  std::vector<double> power(fft_size / 2 + 1);
  for (int b = 0; b <= fft_size / 2; ++b) {
    power[b] = re[b] * re[b] + im[b] * im[b];
  }
  return power;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank build_mel_filterbank(const FrontendConfig& cfg, int rate_hz) {
  const int fft = cfg.fft_size(rate_hz);
  const int n_bins = fft / 2 + 1;
  const int f = cfg.n_mel_filters;
  MelFilterbank fb;
  fb.n_filters = f;
  fb.n_bins = n_bins;
  fb.weights.assign(static_cast<size_t>(f) * n_bins, 0.0);

  const double mel_lo = hz_to_mel(cfg.mel_low_hz);
  const double mel_hi = hz_to_mel(cfg.mel_high_hz);
  std::vector<double> edges_hz(f + 2);
  for (int j = 0; j < f + 2; ++j) {
    edges_hz[j] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * j / (f + 1));
  }
  fb.center_hz.assign(edges_hz.begin() + 1, edges_hz.end() - 1);

  const double bin_hz = static_cast<double>(rate_hz) / fft;
  for (int m = 0; m < f; ++m) {
    double lo = edges_hz[m], c = edges_hz[m + 1], hi = edges_hz[m + 2];
    for (int b = 0; b < n_bins; ++b) {
      double hz = b * bin_hz;
      double w = 0.0;
      if (hz > lo && hz < c) {
        w = (hz - lo) / (c - lo);
      } else if (hz == c) {
        w = 1.0;
      } else if (hz > c && hz < hi) {
        w = (hi - hz) / (hi - c);
      }
      fb.weights[static_cast<size_t>(m) * n_bins + b] = w;
    }
  }
  return fb;
}

std::vector<double> mel_energies(std::span<const double> power, const MelFilterbank& fb) {
  if (power.size() != static_cast<size_t>(fb.n_bins)) {
    throw Error("power spectrum size does not match filterbank");
  }
  std::vector<double> e(fb.n_filters, 0.0);
  for (int m = 0; m < fb.n_filters; ++m) {
    const double* w = fb.weights.data() + static_cast<size_t>(m) * fb.n_bins;
    double sum = 0.0;
    for (int b = 0; b < fb.n_bins; ++b) sum += w[b] * power[b];
    e[m] = sum;
  }
  return e;
}

std::array<double, kNumStaticFeatures> mfcc_frame(std::span<const double> frame,
                                                  const FrontendConfig& cfg,
                                                  const MelFilterbank& fb, int rate_hz) {
  const int n = static_cast<int>(frame.size());
  if (n != cfg.frame_samples(rate_hz)) {
    throw Error("frame length does not match configuration");
  }
  static thread_local std::vector<double> window;
  if (static_cast<int>(window.size()) != n) window = hamming_window(n);

  std::vector<double> windowed(n);
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    windowed[i] = frame[i] * window[i];
    energy += windowed[i] * windowed[i];
  }
  double log_energy = std::log(std::max(energy, cfg.log_floor));

  std::vector<double> power = power_spectrum(windowed, cfg.fft_size(rate_hz));
  std::vector<double> mel = mel_energies(power, fb);

  const int f = cfg.n_mel_filters;
  std::vector<double> log_mel(f);
  for (int m = 0; m < f; ++m) log_mel[m] = std::log(std::max(mel[m], cfg.log_floor));

  std::array<double, kNumStaticFeatures> out{};
  const double scale = std::sqrt(2.0 / f);
  const int lifter = cfg.lifter;
  for (int k = 1; k <= cfg.n_mfcc; ++k) {
    double c = 0.0;
    for (int m = 0; m < f; ++m) {
      c += log_mel[m] * std::cos(kPi * k * (m + 0.5) / f);
    }
    c *= scale;
    c *= 1.0 + 0.5 * lifter * std::sin(kPi * k / lifter);
    out[k - 1] = c;
  }
  out[cfg.n_mfcc] = log_energy;
  return out;
}

std::vector<double> append_deltas(const std::vector<double>& statics, int dim,
                                  int delta_window) {
  if (dim <= 0 || statics.size() % dim != 0) throw Error("bad static feature shape");
  const size_t t_count = statics.size() / dim;
  const int w = delta_window;
  double denom = 0.0;
  for (int d = 1; d <= w; ++d) denom += 2.0 * d * d;

  std::vector<double> out(t_count * dim * 2);
  auto at = [&](size_t t, int k) {
    size_t tc = t >= t_count ? t_count - 1 : t; // clamped high side
    return statics[tc * dim + k];
  };
  for (size_t t = 0; t < t_count; ++t) {
    for (int k = 0; k < dim; ++k) {
      out[t * dim * 2 + k] = statics[t * dim + k];
      double num = 0.0;
      for (int d = 1; d <= w; ++d) {
        size_t fwd = t + d;
        size_t bwd = t >= static_cast<size_t>(d) ? t - d : 0;
        num += d * (at(fwd, k) - at(bwd, k));
      }
      out[t * dim * 2 + dim + k] = num / denom;
    }
  }
  return out;
}

FeatureSequence extract_features(const AudioClip& clip, const FrontendConfig& cfg) {
  if (clip.sample_rate_hz != kExpectedSampleRate) {
    throw UnsupportedRate("feature extraction expects 16000 Hz input");
  }
  const int rate = clip.sample_rate_hz;
  std::vector<double> x(clip.samples.size());
  for (size_t i = 0; i < x.size(); ++i) x[i] = clip.samples[i] / 32768.0;
  std::vector<double> emphasized = preemphasize(x, cfg.preemphasis);

  auto frames = frame_signal(emphasized, cfg.frame_samples(rate), cfg.hop_samples(rate));
  if (frames.empty()) throw EmptyOutput("clip shorter than one analysis frame");

  MelFilterbank fb = build_mel_filterbank(cfg, rate);
  std::vector<double> statics(frames.size() * kNumStaticFeatures);
  for (size_t t = 0; t < frames.size(); ++t) {
    auto coeffs = mfcc_frame(frames[t], cfg, fb, rate);
    std::copy(coeffs.begin(), coeffs.end(), statics.begin() + t * kNumStaticFeatures);
  }

  FeatureSequence feats;
  feats.dim = kNumFeatures;
  feats.values = append_deltas(statics, kNumStaticFeatures, cfg.delta_window);
  feats.frame_times_s.resize(frames.size());
  const double hop_s = cfg.hop_samples(rate) / static_cast<double>(rate);
  for (size_t t = 0; t < frames.size(); ++t) feats.frame_times_s[t] = t * hop_s;
  return feats;
}

void save_features(const std::string& path, const FeatureSequence& feats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write feature dump: " + path);
  out.write(kMagic, sizeof(kMagic));
  uint32_t frames = static_cast<uint32_t>(feats.frames());
  uint32_t dim = static_cast<uint32_t>(feats.dim);
  unsigned char hdr[8] = {
      static_cast<unsigned char>(frames & 0xff),
      static_cast<unsigned char>((frames >> 8) & 0xff),
      static_cast<unsigned char>((frames >> 16) & 0xff),
      static_cast<unsigned char>((frames >> 24) & 0xff),
      static_cast<unsigned char>(dim & 0xff),
      static_cast<unsigned char>((dim >> 8) & 0xff),
      static_cast<unsigned char>((dim >> 16) & 0xff),
      static_cast<unsigned char>((dim >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(hdr), 8);
  std::vector<float> buf(feats.values.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(feats.values[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

FeatureSequence load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open feature dump: " + path);
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw BadMagic("bad feature dump magic: " + path);
  }
  unsigned char hdr[8];
  if (!in.read(reinterpret_cast<char*>(hdr), 8)) {
    throw ShapeMismatch("truncated header: " + path);
  }
  uint32_t frames = static_cast<uint32_t>(hdr[0]) | static_cast<uint32_t>(hdr[1]) << 8 |
                    static_cast<uint32_t>(hdr[2]) << 16 | static_cast<uint32_t>(hdr[3]) << 24;
  uint32_t dim = static_cast<uint32_t>(hdr[4]) | static_cast<uint32_t>(hdr[5]) << 8 |
                 static_cast<uint32_t>(hdr[6]) << 16 | static_cast<uint32_t>(hdr[7]) << 24;
  std::vector<float> buf(static_cast<size_t>(frames) * dim);
  if (!in.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
    throw ShapeMismatch("truncated feature dump: " + path);
  }
  FeatureSequence feats;
  feats.dim = static_cast<int>(dim);
  feats.values.assign(buf.begin(), buf.end());
  feats.frame_times_s.resize(frames);
  for (uint32_t t = 0; t < frames; ++t) feats.frame_times_s[t] = t * 0.010;
  return feats;
}

} // namespace nuva
