#include "salad/audio.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "salad/error.hpp"

namespace salad {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

void put_chunk(std::string& out, const char (&id)[5], std::string_view payload) {
  out.append(id, 4);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.append(payload);
  if (payload.size() % 2 != 0) out.push_back('\0');
}

}  // namespace

std::string encode_wav(const AudioClip& clip) {
  std::string fmt;
  put_u16(fmt, 1);  // PCM
  put_u16(fmt, 1);  // mono
  put_u32(fmt, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(fmt, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(fmt, 2);
  put_u16(fmt, 16);

  std::string data;
  data.reserve(clip.samples.size() * 2);
  for (std::int16_t s : clip.samples) put_u16(data, static_cast<std::uint16_t>(s));

  std::string body = "WAVE";
  put_chunk(body, "fmt ", fmt);
  if (clip.transcript) put_chunk(body, "trsc", *clip.transcript);
  put_chunk(body, "data", data);

  std::string out = "RIFF";
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out += body;
  return out;
}

AudioClip decode_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    throw InvalidAudio("not a RIFF/WAVE file");
  }
  const std::size_t riff_end = std::min<std::size_t>(bytes.size(), std::size_t{8} + get_u32(bytes, 4));
  AudioClip clip;
  bool have_fmt = false;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= riff_end) {
    const std::string_view id = bytes.substr(pos, 4);
    const std::size_t size = get_u32(bytes, pos + 4);
    const std::size_t start = pos + 8;
    if (start + size > riff_end) throw InvalidAudio("chunk '" + std::string(id) + "' overruns file");
    const std::string_view payload = bytes.substr(start, size);
    if (id == "fmt ") {
      if (size < 16) throw InvalidAudio("short fmt chunk");
      if (get_u16(payload, 0) != 1) throw InvalidAudio("only PCM is supported");
      if (get_u16(payload, 2) != 1) throw InvalidAudio("only mono is supported");
      if (get_u16(payload, 14) != 16) throw InvalidAudio("only 16-bit samples are supported");
      clip.sample_rate = static_cast<int>(get_u32(payload, 4));
      if (clip.sample_rate <= 0) throw InvalidAudio("invalid sample rate");
      have_fmt = true;
    } else if (id == "data") {
      if (size % 2 != 0) throw InvalidAudio("odd-sized PCM16 data chunk");
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        clip.samples[i] = static_cast<std::int16_t>(get_u16(payload, 2 * i));
      }
      have_data = true;
    } else if (id == "trsc") {
      clip.transcript = std::string(payload);
    }
    pos = start + size + (size % 2);
  }
  if (!have_fmt || !have_data) throw InvalidAudio("missing fmt or data chunk");
  return clip;
}

std::vector<std::int16_t> render_tones(std::span<const Tone> tones, int sample_rate) {
  std::size_t total = 0;
  for (const Tone& t : tones) total += t.samples;
  std::vector<std::int16_t> out;
  out.reserve(total);
  const double peak = kToneAmplitude * 32767.0;
  for (const Tone& t : tones) {
    const double step = 2.0 * std::numbers::pi * t.frequency_hz / sample_rate;
    for (std::size_t n = 0; n < t.samples; ++n) {
      out.push_back(static_cast<std::int16_t>(std::lround(peak * std::sin(step * static_cast<double>(n)))));
    }
  }
  return out;
}

std::size_t seconds_to_samples(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::floor(seconds * sample_rate + 0.5));
}

double midi_to_hz(int midi_pitch) { return 440.0 * std::exp2((midi_pitch - 69) / 12.0); }

}  // namespace salad
