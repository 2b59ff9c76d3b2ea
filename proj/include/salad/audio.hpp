#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace salad {

inline constexpr int kSampleRate = 22050;

/// 16-bit mono PCM. `transcript` is the metadata channel carried in the
/// WAV `trsc` chunk; fixture recordings use it to carry what was said.
struct AudioClip {
  std::vector<std::int16_t> samples;
  int sample_rate = kSampleRate;
  std::optional<std::string> transcript;

  double duration_seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
  bool operator==(const AudioClip&) const = default;
};

/// RIFF/WAVE, PCM16 mono: `fmt `, optional `trsc`, then `data`.
std::string encode_wav(const AudioClip& clip);

/// Accepts any chunk order and skips unknown chunks. Only PCM16 mono is
/// accepted; throws InvalidAudio otherwise.
AudioClip decode_wav(std::string_view bytes);

struct Tone {
  double frequency_hz;  // 0 renders silence
  std::size_t samples;
};

inline constexpr double kToneAmplitude = 0.5;

/// Concatenates sine tones, each starting at phase zero.
std::vector<std::int16_t> render_tones(std::span<const Tone> tones, int sample_rate);

/// Sample index nearest to `seconds` (round half up).
std::size_t seconds_to_samples(double seconds, int sample_rate);

double midi_to_hz(int midi_pitch);

}  // namespace salad
