// SPDX-License-Identifier: Apache-2.0
#include "nuva/posteriorgram.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "nuva/errors.hpp"
#include "nuva/util.hpp"

namespace nuva {

namespace {

constexpr char kMagic[7] = {'N', 'U', 'V', 'A', 'P', 'G', '1'};

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
    throw ShapeMismatch("truncated header: " + path);
  }
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

} // namespace

bool PosteriorgramSequence::is_row_stochastic(double tol) const {
  for (size_t t = 0; t < frames(); ++t) {
    double sum = 0.0;
    for (double p : row(t)) {
      if (p < 0.0 || p > 1.0) return false;
      sum += p;
    }
    if (sum < 1.0 - tol || sum > 1.0 + tol) return false;
  }
  return true;
}

void save_posteriorgrams(const std::string& path, const PosteriorgramSequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write posteriorgram cache: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<uint32_t>(seq.frames()));
  put_u32(out, kNumPhoneClasses);
  std::vector<float> buf(seq.values.size());
  for (size_t i = 0; i < seq.values.size(); ++i) buf[i] = static_cast<float>(seq.values[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

PosteriorgramSequence load_posteriorgrams(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open posteriorgram cache: " + path);
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw BadMagic("bad posteriorgram cache magic: " + path);
  }
  uint32_t frames = get_u32(in, path);
  uint32_t classes = get_u32(in, path);
  if (classes != kNumPhoneClasses) {
    throw ShapeMismatch("expected " + std::to_string(kNumPhoneClasses) +
                        " classes, got " + std::to_string(classes) + ": " + path);
  }
  std::vector<float> buf(static_cast<size_t>(frames) * classes);
  if (!in.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
    throw ShapeMismatch("truncated posteriorgram cache: " + path);
  }
  PosteriorgramSequence seq;
  seq.values.assign(buf.begin(), buf.end());
  seq.source_id = "cache:" + std::filesystem::path(path).stem().string();
  return seq;
}

std::string posteriorgram_cache_key(const void* audio_bytes, size_t len,
                                    const std::string& source_id) {
  uint64_t h = fnv1a64(audio_bytes, len);
  h = fnv1a64(source_id.data(), source_id.size(), h);
  return hex16(h);
}

} // namespace nuva
