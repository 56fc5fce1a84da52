// SPDX-License-Identifier: Apache-2.0
#include "nuva/audio.hpp"

#include <cstring>
#include <fstream>

#include "nuva/errors.hpp"

namespace nuva {

namespace {

constexpr uint16_t kFormatPcm = 1;

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void put_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

} // namespace

AudioClip load_wav(const std::string& path, bool allow_any_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedWav("cannot open wav file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw MalformedWav("not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    uint32_t chunk_len = read_u32(hdr + 4);
    pos += 8;
    if (pos + chunk_len > bytes.size()) {
      throw MalformedWav("truncated chunk in wav file: " + path);
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw MalformedWav("fmt chunk too short: " + path);
      const unsigned char* f = bytes.data() + pos;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_len = chunk_len;
    }
    pos += chunk_len + (chunk_len & 1);
  }

  if (!have_fmt || data == nullptr) {
    throw MalformedWav("missing fmt or data chunk: " + path);
  }
  if (format != kFormatPcm || bits != 16) {
    throw UnsupportedEncoding("only uncompressed PCM16 is supported: " + path);
  }
  if (channels != 1) {
    throw UnsupportedEncoding("only mono input is supported: " + path);
  }
  if (rate != kExpectedSampleRate && !allow_any_rate) {
    throw UnsupportedRate("sample rate " + std::to_string(rate) +
                          " Hz, expected 16000 Hz: " + path);
  }
  if (data_len < 2) throw MalformedWav("empty data chunk: " + path);

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  clip.samples.resize(data_len / 2);
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    uint16_t u = read_u16(data + 2 * i);
    clip.samples[i] = static_cast<int16_t>(u);
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  uint32_t data_len = static_cast<uint32_t>(clip.samples.size() * 2);
  uint32_t rate = static_cast<uint32_t>(clip.sample_rate_hz);
  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_len);
  for (int16_t s : clip.samples) {
    put_u16(out, static_cast<uint16_t>(s));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot write wav file: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

} // namespace nuva
