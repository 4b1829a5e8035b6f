#include "nujam/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nujam/dsp.hpp"
#include "nujam/kvconfig.hpp"
#include "nujam/signals.hpp"
#include "nujam/wav.hpp"

namespace nujam::acoustics {

double ft_to_m(double feet) {
  if (!(feet >= 0.0)) throw std::invalid_argument("ft_to_m: feet must be non-negative");
  return feet * kMetersPerFoot;
}

AbsorptionTable default_absorption_table() {
  return AbsorptionTable{{{1000.0, 0.005},
                          {4000.0, 0.03},
                          {10000.0, 0.11},
                          {16000.0, 0.27},
                          {20000.0, 0.40},
                          {22000.0, 0.47}}};
}

void validate(const AbsorptionTable& t) {
  if (t.points.empty()) throw std::invalid_argument("absorption table: must not be empty");
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    if (!(t.points[i].db_per_m >= 0.0))
      throw std::invalid_argument("absorption table: values must be non-negative");
    if (i > 0) {
      if (!(t.points[i].freq_hz > t.points[i - 1].freq_hz))
        throw std::invalid_argument("absorption table: frequencies must be strictly increasing");
      if (t.points[i].db_per_m < t.points[i - 1].db_per_m)
        throw std::invalid_argument("absorption table: values must be non-decreasing in frequency");
    }
  }
  if (t.points.front().freq_hz > 1000.0 || t.points.back().freq_hz < 22000.0)
    throw std::invalid_argument("absorption table: must cover 1 kHz through 22 kHz");
}

double absorption_db_per_m(const AbsorptionTable& t, double freq_hz) {
  const auto& p = t.points;
  if (freq_hz <= p.front().freq_hz) return p.front().db_per_m;
  if (freq_hz >= p.back().freq_hz) return p.back().db_per_m;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (freq_hz <= p[i].freq_hz) {
      const double t01 = (freq_hz - p[i - 1].freq_hz) / (p[i].freq_hz - p[i - 1].freq_hz);
      return p[i - 1].db_per_m + t01 * (p[i].db_per_m - p[i - 1].db_per_m);
    }
  }
  return p.back().db_per_m;
}

SampleBuffer propagate(const SourceSpec& source, const AbsorptionTable& absorption,
                       double sample_rate_hz) {
  validate(absorption);
  validate_buffer(source.waveform, "propagate");
  if (source.waveform.unit != Unit::digital_full_scale)
    throw std::invalid_argument("propagate: source waveform must be digital_full_scale");
  if (!(source.distance_m > 0.0))
    throw std::invalid_argument("propagate: distance must be positive");
  if (!(source.cal_distance_m > 0.0))
    throw std::invalid_argument("propagate: calibration distance must be positive");
  if (!(sample_rate_hz > 0.0))
    throw std::invalid_argument("propagate: scene rate must be positive");

  SampleBuffer w = source.waveform.sample_rate_hz == sample_rate_hz
                       ? source.waveform
                       : signals::resample(source.waveform, sample_rate_hz);
  const double r = rms(w);
  if (r <= 0.0) throw std::invalid_argument("propagate: source waveform is silent");

  // Calibrate: at cal_distance the level is spl_db, then spread 1/r.
  const double cal_rms = signals::kPressureRefPa * std::pow(10.0, source.spl_db / 20.0);
  double gain = (cal_rms / r) * (source.cal_distance_m / source.distance_m);

  SampleBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  out.unit = Unit::pascal;
  out.samples.resize(w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i) out.samples[i] = gain * w.samples[i];

  const double extra_m = source.distance_m - source.cal_distance_m;
  if (extra_m != 0.0) {
    out.samples = dsp::apply_spectral_gain(out.samples, sample_rate_hz, [&](double f) {
      return std::pow(10.0, -absorption_db_per_m(absorption, f) * extra_m / 20.0);
    });
  }
  return out;
}

SampleBuffer scene_pressure(const Scene& scene) {
  if (!(scene.sample_rate_hz > 0.0))
    throw std::invalid_argument("scene_pressure: scene rate must be positive");
  validate(scene.absorption);
  SampleBuffer out;
  out.sample_rate_hz = scene.sample_rate_hz;
  out.unit = Unit::pascal;
  for (const SourceSpec& src : scene.sources) {
    SampleBuffer p = propagate(src, scene.absorption, scene.sample_rate_hz);
    if (p.samples.size() > out.samples.size()) out.samples.resize(p.samples.size(), 0.0);
    for (std::size_t i = 0; i < p.samples.size(); ++i) out.samples[i] += p.samples[i];
  }
  return out;
}

Scene parse_scene_text(const std::string& text, const std::string& base_dir) {
  Scene scene;
  std::map<int, SourceSpec> sources;
  std::vector<AbsorptionPoint> absorption;

  for (const auto& e : kvconfig::parse(text)) {
    if (e.key == "sample_rate_hz") {
      scene.sample_rate_hz = kvconfig::to_double(e);
      continue;
    }
    if (e.key.rfind("absorption.", 0) == 0) {
      kvconfig::Entry freq{e.line, e.key, e.key.substr(11)};
      absorption.push_back({kvconfig::to_double(freq), kvconfig::to_double(e)});
      continue;
    }
    if (e.key.rfind("source.", 0) == 0) {
      const auto rest = e.key.substr(7);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) kvconfig::fail(e, "expected source.<n>.<field>");
      kvconfig::Entry idx{e.line, e.key, rest.substr(0, dot)};
      const int n = static_cast<int>(kvconfig::to_int(idx));
      const std::string field = rest.substr(dot + 1);
      SourceSpec& src = sources[n];
      if (field == "wav") {
        const std::string path =
            (!base_dir.empty() && e.value.front() != '/') ? base_dir + "/" + e.value : e.value;
        src.waveform = wav::read_wav(path);
        if (src.waveform.unit == Unit::pascal)
          src.waveform.unit = Unit::digital_full_scale;  // scene recalibrates by spl_db
      } else if (field == "spl_db") {
        src.spl_db = kvconfig::to_double(e);
      } else if (field == "cal_distance_ft") {
        src.cal_distance_m = ft_to_m(kvconfig::to_double(e));
      } else if (field == "distance_ft") {
        src.distance_m = ft_to_m(kvconfig::to_double(e));
      } else {
        kvconfig::fail(e, "unknown source field '" + field + "'");
      }
      continue;
    }
    kvconfig::fail(e, "unknown key '" + e.key + "'");
  }

  for (auto& [n, src] : sources) {
    if (src.waveform.empty()) {
      std::ostringstream os;
      os << "source." << n << " has no wav";
      throw kvconfig::ParseError(os.str());
    }
    scene.sources.push_back(std::move(src));
  }
  if (!absorption.empty()) {
    std::sort(absorption.begin(), absorption.end(),
              [](const AbsorptionPoint& a, const AbsorptionPoint& b) { return a.freq_hz < b.freq_hz; });
    scene.absorption = AbsorptionTable{std::move(absorption)};
  }
  validate(scene.absorption);
  return scene;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_scene_file: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  auto slash = path.find_last_of("/\\");
  const std::string base = slash == std::string::npos ? std::string(".") : path.substr(0, slash);
  return parse_scene_text(ss.str(), base);
}

}  // namespace nujam::acoustics
