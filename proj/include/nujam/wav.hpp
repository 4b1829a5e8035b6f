#pragma once

#include <string>

#include "nujam/sample_buffer.hpp"

// WAV exchange format: mono, 32-bit IEEE float, little-endian, sample rate
// restricted to 16, 48 or 96 kHz. Pascal-unit buffers carry a sidecar text
// file `<stem>.cal` with `unit=pascal` and `rms_db_spl=<value>`; reading a
// WAV restores the unit and calibration from the sidecar when present.
namespace nujam::wav {

void write_wav(const std::string& path, const SampleBuffer& buffer);
SampleBuffer read_wav(const std::string& path);

// `foo/bar.wav` -> `foo/bar.cal`
std::string sidecar_path(const std::string& wav_path);

}  // namespace nujam::wav
