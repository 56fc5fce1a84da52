// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_AUDIO_HPP
#define NUVA_AUDIO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace nuva {

inline constexpr int kExpectedSampleRate = 16000;

struct AudioClip {
  std::vector<int16_t> samples;
  int sample_rate_hz = kExpectedSampleRate;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Reads a RIFF/WAVE file holding uncompressed mono PCM16. Unknown chunks are
// skipped. Throws MalformedWav on structural problems, UnsupportedEncoding on
// non-PCM16 or multi-channel content, UnsupportedRate when the sample rate is
// not 16000 Hz (allow_any_rate bypasses only the rate check).
AudioClip load_wav(const std::string& path, bool allow_any_rate = false);

// Writes the canonical 44 byte header layout. load_wav(write_wav(clip))
// reproduces the clip exactly, and write_wav(load_wav(f)) is byte identical
// for files already in canonical form.
void write_wav(const std::string& path, const AudioClip& clip);

} // namespace nuva

#endif
