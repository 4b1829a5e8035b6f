#include "nujam/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "nujam/signals.hpp"

namespace nujam::wav {

namespace {

constexpr std::uint16_t kFormatIeeeFloat = 3;

bool allowed_rate(double rate_hz) {
  const long long r = std::llround(rate_hz);
  return (r == 16000 || r == 48000 || r == 96000) && std::abs(rate_hz - r) < 1e-6;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ostream& os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

std::string sidecar_path(const std::string& wav_path) {
  const auto dot = wav_path.rfind('.');
  const auto slash = wav_path.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return wav_path.substr(0, dot) + ".cal";
  return wav_path + ".cal";
}

void write_wav(const std::string& path, const SampleBuffer& buffer) {
  validate_buffer(buffer, "write_wav");
  if (!allowed_rate(buffer.sample_rate_hz))
    throw std::invalid_argument("write_wav: sample rate must be 16000, 48000 or 96000 Hz");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_wav: cannot open '" + path + "'");

  const auto n = static_cast<std::uint32_t>(buffer.samples.size());
  const std::uint32_t data_bytes = n * 4;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::llround(buffer.sample_rate_hz));

  os.write("RIFF", 4);
  put_u32(os, 4 + (8 + 16) + (8 + 4) + (8 + data_bytes));
  os.write("WAVE", 4);

  os.write("fmt ", 4);
  put_u32(os, 16);
  put_u16(os, kFormatIeeeFloat);
  put_u16(os, 1);  // mono
  put_u32(os, rate);
  put_u32(os, rate * 4);
  put_u16(os, 4);
  put_u16(os, 32);

  os.write("fact", 4);  // required for non-PCM formats
  put_u32(os, 4);
  put_u32(os, n);

  os.write("data", 4);
  put_u32(os, data_bytes);
  for (double v : buffer.samples) {
    const float f = static_cast<float>(v);
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(&f), 4);
  }
  if (!os) throw std::runtime_error("write_wav: short write to '" + path + "'");
  os.close();

  if (buffer.unit == Unit::pascal) {
    std::ofstream cal(sidecar_path(path));
    if (!cal) throw std::runtime_error("write_wav: cannot open sidecar for '" + path + "'");
    cal << "unit=pascal\n";
    const double spl = buffer.empty() || rms(buffer) <= 0.0
                           ? -std::numeric_limits<double>::infinity()
                           : signals::measure_spl(buffer);
    char line[64];
    if (std::isinf(spl)) {
      std::snprintf(line, sizeof(line), "rms_db_spl=-inf\n");
    } else {
      std::snprintf(line, sizeof(line), "rms_db_spl=%.10g\n", spl);
    }
    cal << line;
  }
}

SampleBuffer read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_wav: cannot open '" + path + "'");
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("read_wav: '" + path + "' is not a RIFF/WAVE file");

  std::uint32_t rate = 0;
  std::uint16_t fmt_tag = 0, channels = 0, bits = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* id = reinterpret_cast<const char*>(raw.data() + pos);
    const std::uint32_t sz = get_u32(raw.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + sz > raw.size()) throw std::runtime_error("read_wav: truncated chunk in '" + path + "'");
    if (std::memcmp(id, "fmt ", 4) == 0 && sz >= 16) {
      fmt_tag = get_u16(raw.data() + body);
      channels = get_u16(raw.data() + body + 2);
      rate = get_u32(raw.data() + body + 4);
      bits = get_u16(raw.data() + body + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = raw.data() + body;
      data_bytes = sz;
    }
    pos = body + sz + (sz & 1);  // chunks are word-aligned
  }

  if (fmt_tag != kFormatIeeeFloat || bits != 32)
    throw std::runtime_error("read_wav: '" + path + "' must be 32-bit IEEE float");
  if (channels != 1) throw std::runtime_error("read_wav: '" + path + "' must be mono");
  if (!allowed_rate(static_cast<double>(rate)))
    throw std::runtime_error("read_wav: '" + path + "' sample rate must be 16000, 48000 or 96000 Hz");
  if (data == nullptr) throw std::runtime_error("read_wav: '" + path + "' has no data chunk");

  SampleBuffer out;
  out.sample_rate_hz = static_cast<double>(rate);
  out.unit = Unit::digital_full_scale;
  const std::size_t n = data_bytes / 4;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    float f;
    std::memcpy(&f, data + i * 4, 4);
    out.samples[i] = static_cast<double>(f);
  }

  std::ifstream cal(sidecar_path(path));
  if (cal) {
    std::string line;
    double target_spl = std::numeric_limits<double>::quiet_NaN();
    bool is_pascal = false;
    while (std::getline(cal, line)) {
      if (line == "unit=pascal") is_pascal = true;
      else if (line.rfind("rms_db_spl=", 0) == 0) {
        const std::string v = line.substr(11);
        if (v != "-inf") target_spl = std::stod(v);
      }
    }
    if (is_pascal) {
      out.unit = Unit::pascal;
      // float32 quantization nudges the RMS; restore the recorded level.
      const double r = rms(out);
      if (std::isfinite(target_spl) && r > 0.0) {
        const double want = signals::kPressureRefPa * std::pow(10.0, target_spl / 20.0);
        const double g = want / r;
        for (double& v : out.samples) v *= g;
      }
    }
  }
  return out;
}

}  // namespace nujam::wav
