#pragma once

#include <string>
#include <vector>

#include "nujam/sample_buffer.hpp"

// Free-field propagation: inverse distance law plus a per-frequency air
// absorption table (dB/m), applied as zero-phase spectral gain. No
// reflections, no propagation delay; sources superpose linearly at the
// receiver.
namespace nujam::acoustics {

constexpr double kMetersPerFoot = 0.3048;

double ft_to_m(double feet);  // feet >= 0

struct AbsorptionPoint {
  double freq_hz = 0.0;
  double db_per_m = 0.0;
};

// Frequencies strictly increasing, values non-negative and non-decreasing,
// covering at least 1 kHz through 22 kHz. Lookup interpolates linearly and
// clamps beyond the table ends.
struct AbsorptionTable {
  std::vector<AbsorptionPoint> points;
};

AbsorptionTable default_absorption_table();
void validate(const AbsorptionTable& t);
double absorption_db_per_m(const AbsorptionTable& t, double freq_hz);

struct SourceSpec {
  SampleBuffer waveform;          // digital_full_scale
  double spl_db = 60.0;           // level the source is calibrated to...
  double cal_distance_m = 0.9144; // ...at this distance
  double distance_m = 1.0;        // where the receiver sits
};

struct Scene {
  std::vector<SourceSpec> sources;
  double sample_rate_hz = 96000.0;
  AbsorptionTable absorption = default_absorption_table();
};

// Pressure waveform received from one source: waveform scaled so its level
// at cal_distance_m equals spl_db, then 1/r gain for the remaining path and
// per-frequency absorption over (distance - cal_distance). A receiver closer
// than the calibration point is amplified symmetrically.
SampleBuffer propagate(const SourceSpec& source, const AbsorptionTable& absorption,
                       double sample_rate_hz);

// Sum of propagate() over all sources, zero-padded to the longest. An empty
// scene yields an empty pascal buffer at the scene rate.
SampleBuffer scene_pressure(const Scene& scene);

// Scene description file in the line-oriented key = value format:
//   source.<n>.wav, source.<n>.spl_db, source.<n>.cal_distance_ft,
//   source.<n>.distance_ft, absorption.<freq_hz>, sample_rate_hz.
// WAV paths resolve relative to base_dir. Unknown keys are hard errors.
Scene load_scene_file(const std::string& path);
Scene parse_scene_text(const std::string& text, const std::string& base_dir);

}  // namespace nujam::acoustics
