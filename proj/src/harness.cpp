#include "nujam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <utility>

#include "nujam/dsp.hpp"
#include "nujam/kvconfig.hpp"
#include "nujam/wav.hpp"

namespace nujam::harness {

namespace {

using signals::PhonemeClass;
using signals::Segment;

Segment vow(double hz, double dur) { return {PhonemeClass::vowel, hz, dur}; }
Segment fric(double hz, double dur) { return {PhonemeClass::fricative, hz, dur}; }
Segment stop(double dur) { return {PhonemeClass::stop, 0.0, dur}; }
Segment sil(double dur) { return {PhonemeClass::silence, 0.0, dur}; }

constexpr double kSnrLowHz = 300.0;
constexpr double kSnrHighHz = 6000.0;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

// Base name of every per-cell artifact: cmd03_6ft_jammed, plus _r<k> when
// the grid runs more than one repeat.
std::string cell_base(const std::string& command_id, double distance_ft, bool jammer_on,
                      int repeat) {
  std::string base =
      command_id + "_" + fmt_g(distance_ft) + "ft_" + (jammer_on ? "jammed" : "clean");
  if (repeat > 0) base += "_r" + std::to_string(repeat + 1);
  return base;
}

const char* verdict_cell(analysis::Verdict v) {
  switch (v) {
    case analysis::Verdict::ack:
      return "ack";
    case analysis::Verdict::misheard:
      return "misheard";
    default:
      return "x";  // no response
  }
}

std::string snr_cell(double snr_db) {
  if (std::isinf(snr_db)) return snr_db > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", snr_db);
  return buf;
}

SampleBuffer zeros_like(const SampleBuffer& b) {
  return {b.sample_rate_hz, std::vector<double>(b.size(), 0.0), b.unit};
}

}  // namespace

const std::vector<Command>& default_command_bank() {
  // One shared wake prefix; bodies differ in how much identity rides on
  // frication. Seeds are fixed so each command is the same "recording" in
  // every trial; only the channel between talker and microphone varies.
  static const std::vector<Segment> wake = {sil(0.04), vow(600, 0.14), stop(0.06),
                                            vow(350, 0.12)};
  static const std::vector<Command> bank = {
      {"cmd01", "fricative_heavy", 175.0, 1001,
       wake,
       {fric(5200, 0.16), vow(700, 0.10), fric(4300, 0.14), stop(0.05), fric(6000, 0.12),
        sil(0.06)}},
      {"cmd02", "fricative_heavy", 120.0, 1002,
       wake,
       {fric(3600, 0.18), stop(0.05), fric(5600, 0.16), vow(450, 0.09), fric(4800, 0.10),
        sil(0.06)}},
      {"cmd03", "fricative_heavy", 195.0, 1003,
       wake,
       {vow(520, 0.08), fric(6400, 0.20), fric(3900, 0.12), stop(0.04), fric(5000, 0.12),
        sil(0.06)}},
      {"cmd04", "fricative_heavy", 135.0, 1004,
       wake,
       {fric(4500, 0.14), vow(820, 0.10), fric(5900, 0.13), fric(3400, 0.11), stop(0.05),
        sil(0.06)}},
      {"cmd05", "balanced", 110.0, 1005,
       wake,
       {vow(640, 0.12), fric(4700, 0.12), vow(380, 0.12), stop(0.05), fric(5500, 0.10),
        vow(900, 0.10), sil(0.06)}},
      {"cmd06", "balanced", 160.0, 1006,
       wake,
       {fric(5100, 0.11), vow(300, 0.13), stop(0.05), vow(760, 0.12), fric(3800, 0.11),
        sil(0.06)}},
      {"cmd07", "balanced", 205.0, 1007,
       wake,
       {vow(480, 0.14), stop(0.05), fric(6100, 0.12), vow(660, 0.11), fric(4200, 0.10),
        stop(0.04), sil(0.06)}},
      {"cmd08", "fricative_poor", 100.0, 1008,
       wake,
       {vow(560, 0.16), stop(0.05), vow(840, 0.14), vow(320, 0.12), stop(0.06), vow(700, 0.10),
        sil(0.06)}},
      {"cmd09", "fricative_poor", 150.0, 1009,
       wake,
       {vow(420, 0.14), vow(880, 0.12), stop(0.05), vow(540, 0.16), stop(0.04), vow(260, 0.12),
        sil(0.06)}},
      {"cmd10", "fricative_poor", 185.0, 1010,
       wake,
       {stop(0.06), vow(720, 0.14), vow(460, 0.12), stop(0.05), vow(940, 0.10), vow(360, 0.14),
        sil(0.06)}},
  };
  return bank;
}

signals::UtteranceSpec utterance_for(const Command& cmd, bool manual_trigger) {
  signals::UtteranceSpec spec;
  if (!manual_trigger)
    spec.segments.insert(spec.segments.end(), cmd.wake_segments.begin(), cmd.wake_segments.end());
  spec.segments.insert(spec.segments.end(), cmd.body_segments.begin(), cmd.body_segments.end());
  spec.fundamental_hz = cmd.fundamental_hz;
  spec.seed = cmd.seed;
  return spec;
}

void validate(const ExperimentConfig& config) {
  if (config.distances_ft.empty()) throw std::invalid_argument("distances_ft must not be empty");
  for (double d : config.distances_ft)
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::invalid_argument("distances_ft entries must be positive");
  if (config.repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  if (!std::isfinite(config.speech_spl_db))
    throw std::invalid_argument("speech.spl_db must be finite");
  if (!(config.speech_cal_distance_ft > 0.0))
    throw std::invalid_argument("speech.cal_distance_ft must be positive");
  if (!std::isfinite(config.jammer_spl_db))
    throw std::invalid_argument("jammer.spl_db must be finite");
  if (!(config.jammer_cal_distance_ft > 0.0))
    throw std::invalid_argument("jammer.cal_distance_ft must be positive");
  if (!(config.jammer_distance_ft > 0.0))
    throw std::invalid_argument("jammer.distance_ft must be positive");
  modulation::validate(config.susbam);
  mic_model::validate(config.mic);
  if (std::llround(config.mic.adc_rate_hz) != 16000)
    throw std::invalid_argument("mic.adc_rate_hz must be 16000 (feature extraction is fixed)");
  if (!(config.t_ack > 0.0)) throw std::invalid_argument("asr.t_ack must be positive");
  if (!(config.t_margin > 0.0)) throw std::invalid_argument("asr.t_margin must be positive");
  if (!(config.scene_rate_hz >=
        2.0 * (config.susbam.carrier_hz + config.susbam.baseband_limit_hz)))
    throw std::invalid_argument("scene.sample_rate_hz too low to carry the jammer band");
  if (config.stft_window < 64 || (config.stft_window & (config.stft_window - 1)) != 0)
    throw std::invalid_argument("stft.window must be a power of two, at least 64");
  if (config.stft_hop == 0 || config.stft_hop > config.stft_window)
    throw std::invalid_argument("stft.hop must be in (0, stft.window]");
  acoustics::validate(config.absorption);
  if (config.output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
  active_commands(config);  // rejects unknown command ids
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  bool absorption_overridden = false;
  std::vector<acoustics::AbsorptionPoint> points;

  for (const auto& e : kvconfig::parse(text)) {
    if (e.key == "distances_ft") {
      config.distances_ft = kvconfig::to_double_list(e);
    } else if (e.key == "repeats") {
      long long v = kvconfig::to_int(e);
      if (v < 1) kvconfig::fail(e, "repeats must be at least 1");
      config.repeats = static_cast<int>(v);
    } else if (e.key == "manual_trigger") {
      config.manual_trigger = kvconfig::to_bool(e);
    } else if (e.key == "commands") {
      config.command_ids = kvconfig::to_string_list(e);
    } else if (e.key == "speech.spl_db") {
      config.speech_spl_db = kvconfig::to_double(e);
    } else if (e.key == "speech.cal_distance_ft") {
      config.speech_cal_distance_ft = kvconfig::to_double(e);
    } else if (e.key == "jammer.color") {
      try {
        config.jammer_color = signals::noise_color_from_string(e.value);
      } catch (const std::invalid_argument& ex) {
        kvconfig::fail(e, ex.what());
      }
    } else if (e.key == "jammer.spl_db") {
      config.jammer_spl_db = kvconfig::to_double(e);
    } else if (e.key == "jammer.cal_distance_ft") {
      config.jammer_cal_distance_ft = kvconfig::to_double(e);
    } else if (e.key == "jammer.distance_ft") {
      config.jammer_distance_ft = kvconfig::to_double(e);
    } else if (e.key == "jammer.carrier_hz") {
      config.susbam.carrier_hz = kvconfig::to_double(e);
    } else if (e.key == "jammer.baseband_limit_hz") {
      config.susbam.baseband_limit_hz = kvconfig::to_double(e);
    } else if (e.key == "jammer.output_rate_hz") {
      config.susbam.output_rate_hz = kvconfig::to_double(e);
    } else if (e.key == "mic.a1") {
      config.mic.a1 = kvconfig::to_double(e);
    } else if (e.key == "mic.a2") {
      config.mic.a2 = kvconfig::to_double(e);
    } else if (e.key == "mic.adc_rate_hz") {
      config.mic.adc_rate_hz = kvconfig::to_double(e);
    } else if (e.key == "mic.antialias_cutoff_hz") {
      config.mic.antialias_cutoff_hz = kvconfig::to_double(e);
    } else if (e.key == "mic.noise_floor_db_fs") {
      config.mic.noise_floor_db_fs = kvconfig::to_double(e);
    } else if (e.key == "mic.clip_level") {
      config.mic.clip_level = kvconfig::to_double(e);
    } else if (e.key == "asr.t_ack") {
      config.t_ack = kvconfig::to_double(e);
    } else if (e.key == "asr.t_margin") {
      config.t_margin = kvconfig::to_double(e);
    } else if (e.key == "seeds.master") {
      config.master_seed = kvconfig::to_uint64(e);
    } else if (e.key == "output_dir") {
      if (e.value.empty()) kvconfig::fail(e, "output_dir must not be empty");
      config.output_dir = e.value;
    } else if (e.key == "scene.sample_rate_hz") {
      config.scene_rate_hz = kvconfig::to_double(e);
    } else if (e.key == "stft.window") {
      long long v = kvconfig::to_int(e);
      if (v < 1) kvconfig::fail(e, "stft.window must be positive");
      config.stft_window = static_cast<std::size_t>(v);
    } else if (e.key == "stft.hop") {
      long long v = kvconfig::to_int(e);
      if (v < 1) kvconfig::fail(e, "stft.hop must be positive");
      config.stft_hop = static_cast<std::size_t>(v);
    } else if (e.key.rfind("absorption.", 0) == 0) {
      const std::string freq_text = e.key.substr(11);
      char* end = nullptr;
      double freq = std::strtod(freq_text.c_str(), &end);
      if (freq_text.empty() || end != freq_text.c_str() + freq_text.size() || !(freq > 0.0))
        kvconfig::fail(e, "bad frequency in absorption key");
      absorption_overridden = true;
      points.push_back({freq, kvconfig::to_double(e)});
    } else {
      kvconfig::fail(e, "unknown key '" + e.key + "'");
    }
  }

  if (absorption_overridden) {
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.freq_hz < b.freq_hz; });
    config.absorption.points = std::move(points);
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config(read_file(path));
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  out += "# experiment configuration (round-trips through the config parser)\n";
  out += "distances_ft = ";
  for (std::size_t i = 0; i < config.distances_ft.size(); ++i)
    out += (i ? ", " : "") + fmt_g17(config.distances_ft[i]);
  out += "\n";
  out += "repeats = " + std::to_string(config.repeats) + "\n";
  out += std::string("manual_trigger = ") + (config.manual_trigger ? "on" : "off") + "\n";
  if (!config.command_ids.empty()) {
    out += "commands = ";
    for (std::size_t i = 0; i < config.command_ids.size(); ++i)
      out += (i ? ", " : "") + config.command_ids[i];
    out += "\n";
  }
  out += "speech.spl_db = " + fmt_g17(config.speech_spl_db) + "\n";
  out += "speech.cal_distance_ft = " + fmt_g17(config.speech_cal_distance_ft) + "\n";
  out += std::string("jammer.color = ") + signals::to_string(config.jammer_color) + "\n";
  out += "jammer.spl_db = " + fmt_g17(config.jammer_spl_db) + "\n";
  out += "jammer.cal_distance_ft = " + fmt_g17(config.jammer_cal_distance_ft) + "\n";
  out += "jammer.distance_ft = " + fmt_g17(config.jammer_distance_ft) + "\n";
  out += "jammer.carrier_hz = " + fmt_g17(config.susbam.carrier_hz) + "\n";
  out += "jammer.baseband_limit_hz = " + fmt_g17(config.susbam.baseband_limit_hz) + "\n";
  out += "jammer.output_rate_hz = " + fmt_g17(config.susbam.output_rate_hz) + "\n";
  out += "mic.a1 = " + fmt_g17(config.mic.a1) + "\n";
  out += "mic.a2 = " + fmt_g17(config.mic.a2) + "\n";
  out += "mic.adc_rate_hz = " + fmt_g17(config.mic.adc_rate_hz) + "\n";
  out += "mic.antialias_cutoff_hz = " + fmt_g17(config.mic.antialias_cutoff_hz) + "\n";
  out += "mic.noise_floor_db_fs = " + fmt_g17(config.mic.noise_floor_db_fs) + "\n";
  out += "mic.clip_level = " + fmt_g17(config.mic.clip_level) + "\n";
  out += "asr.t_ack = " + fmt_g17(config.t_ack) + "\n";
  out += "asr.t_margin = " + fmt_g17(config.t_margin) + "\n";
  out += "seeds.master = " + std::to_string(config.master_seed) + "\n";
  out += "output_dir = " + config.output_dir + "\n";
  out += "scene.sample_rate_hz = " + fmt_g17(config.scene_rate_hz) + "\n";
  out += "stft.window = " + std::to_string(config.stft_window) + "\n";
  out += "stft.hop = " + std::to_string(config.stft_hop) + "\n";
  for (const auto& p : config.absorption.points)
    out += "absorption." + fmt_g(p.freq_hz) + " = " + fmt_g17(p.db_per_m) + "\n";
  return out;
}

std::vector<const Command*> active_commands(const ExperimentConfig& config) {
  const auto& bank = default_command_bank();
  std::vector<const Command*> out;
  if (config.command_ids.empty()) {
    for (const auto& c : bank) out.push_back(&c);
    return out;
  }
  for (const auto& id : config.command_ids) {
    auto it = std::find_if(bank.begin(), bank.end(),
                           [&](const Command& c) { return c.id == id; });
    if (it == bank.end()) throw std::invalid_argument("unknown command id '" + id + "'");
    out.push_back(&*it);
  }
  return out;
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& command_id, double distance_ft,
                        bool jammer_on, int repeat) {
  std::uint64_t s = dsp::mix_seed(master, dsp::hash_string(command_id));
  // Quantize distance to millifeet so equal config values hash equally.
  s = dsp::mix_seed(s, static_cast<std::uint64_t>(std::llround(distance_ft * 1000.0)));
  s = dsp::mix_seed(s, jammer_on ? 0x4a : 0x0ff);
  return dsp::mix_seed(s, static_cast<std::uint64_t>(repeat));
}

std::vector<analysis::Template> build_templates(const ExperimentConfig& config) {
  // Templates are enrollment recordings: the same utterances captured through
  // the microphone in a quiet room at the median grid distance. Raw synthetic
  // waveforms would not work here; their digital-zero silence sits tens of
  // nats below any real capture floor in log-mel terms, and that gap would
  // dominate every DTW distance. Enrolling mid-grid keeps the worst-case
  // level mismatch (which cepstral mean subtraction only partly absorbs)
  // small on both ends of the distance sweep. The enrollment seed is fixed
  // per command so templates do not move with the master seed.
  std::vector<double> sorted_dist = config.distances_ft;
  std::sort(sorted_dist.begin(), sorted_dist.end());
  const double enroll_dist_ft = sorted_dist[(sorted_dist.size() - 1) / 2];

  std::vector<analysis::Template> templates;
  for (const Command* cmd : active_commands(config)) {
    acoustics::SourceSpec src;
    src.waveform =
        signals::synth_utterance(utterance_for(*cmd, config.manual_trigger), config.scene_rate_hz);
    src.spl_db = config.speech_spl_db;
    src.cal_distance_m = acoustics::ft_to_m(config.speech_cal_distance_ft);
    src.distance_m = acoustics::ft_to_m(enroll_dist_ft);
    const SampleBuffer pressure =
        acoustics::propagate(src, config.absorption, config.scene_rate_hz);
    const SampleBuffer enrolled = mic_model::capture(
        pressure, config.mic, dsp::mix_seed(dsp::hash_string(cmd->id), 0xe2011));
    templates.push_back({cmd->id, analysis::mfcc(enrolled)});
  }
  return templates;
}

namespace {

// Per-cell sub-seed slots; the cell seed itself is never fed to an RNG.
constexpr std::uint64_t kSlotJamNoise = 1;
constexpr std::uint64_t kSlotMicMain = 2;
constexpr std::uint64_t kSlotMicReference = 3;
constexpr std::uint64_t kSlotMicInterference = 4;

SampleBuffer jammer_pressure(const ExperimentConfig& config, double duration_s,
                             std::uint64_t noise_seed) {
  signals::NoiseSpec spec;
  spec.color = config.jammer_color;
  spec.duration_s = duration_s;
  spec.sample_rate_hz = config.susbam.output_rate_hz;
  spec.seed = noise_seed;
  spec.band_low_hz = 0.0;
  spec.band_high_hz = config.susbam.baseband_limit_hz;
  SampleBuffer modulated = modulation::susbam_modulate(signals::gen_noise(spec), config.susbam);

  acoustics::SourceSpec src;
  src.waveform = std::move(modulated);
  src.spl_db = config.jammer_spl_db;
  src.cal_distance_m = acoustics::ft_to_m(config.jammer_cal_distance_ft);
  src.distance_m = acoustics::ft_to_m(config.jammer_distance_ft);
  return acoustics::propagate(src, config.absorption, config.scene_rate_hz);
}

}  // namespace

std::vector<TrialRecord> run_grid(const ExperimentConfig& config, const CaptureSink& sink) {
  validate(config);
  const auto commands = active_commands(config);
  const auto templates = build_templates(config);

  std::vector<TrialRecord> records;
  for (const Command* cmd : commands) {
    const SampleBuffer utt =
        signals::synth_utterance(utterance_for(*cmd, config.manual_trigger), config.scene_rate_hz);
    for (double dist : config.distances_ft) {
      acoustics::SourceSpec speech_src;
      speech_src.waveform = utt;
      speech_src.spl_db = config.speech_spl_db;
      speech_src.cal_distance_m = acoustics::ft_to_m(config.speech_cal_distance_ft);
      speech_src.distance_m = acoustics::ft_to_m(dist);
      const SampleBuffer speech_p =
          acoustics::propagate(speech_src, config.absorption, config.scene_rate_hz);

      for (bool jammer_on : {false, true}) {
        for (int rep = 0; rep < config.repeats; ++rep) {
          const std::uint64_t cs =
              cell_seed(config.master_seed, cmd->id, dist, jammer_on, rep);

          CellCaptures cell;
          cell.command_id = cmd->id;
          cell.distance_ft = dist;
          cell.jammer_on = jammer_on;
          cell.repeat = rep;

          if (jammer_on) {
            const SampleBuffer jam_p =
                jammer_pressure(config, utt.duration_s(), dsp::mix_seed(cs, kSlotJamNoise));
            const SampleBuffer total = signals::mix({speech_p, jam_p}, {1.0, 1.0});
            cell.capture = mic_model::capture(total, config.mic, dsp::mix_seed(cs, kSlotMicMain));
            cell.reference =
                mic_model::capture(speech_p, config.mic, dsp::mix_seed(cs, kSlotMicReference));
            cell.interference =
                mic_model::capture(jam_p, config.mic, dsp::mix_seed(cs, kSlotMicInterference));
          } else {
            cell.capture =
                mic_model::capture(speech_p, config.mic, dsp::mix_seed(cs, kSlotMicMain));
            cell.reference = cell.capture;
            // Interference with the jammer off is just the capture floor.
            cell.interference = mic_model::capture(zeros_like(speech_p), config.mic,
                                                   dsp::mix_seed(cs, kSlotMicInterference));
          }

          const analysis::TrialOutcome outcome = analysis::keyword_spot(
              cell.capture, templates, cmd->id, config.t_ack, config.t_margin);

          TrialRecord rec;
          rec.command_id = cmd->id;
          rec.distance_ft = dist;
          rec.jammer_on = jammer_on;
          rec.outcome = outcome.verdict;
          rec.audible_band_snr_db =
              analysis::band_snr(cell.reference, cell.interference, kSnrLowHz, kSnrHighHz);
          rec.margin = outcome.margin;
          rec.seed_used = cs;
          records.push_back(std::move(rec));

          if (sink) sink(cell);
        }
      }
    }
  }

  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.command_id != b.command_id) return a.command_id < b.command_id;
    if (a.distance_ft != b.distance_ft) return a.distance_ft < b.distance_ft;
    if (a.jammer_on != b.jammer_on) return !a.jammer_on;
    return a.seed_used < b.seed_used;
  });
  return records;
}

std::string table_to_csv(const std::vector<TrialRecord>& records) {
  std::vector<TrialRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.command_id != b.command_id) return a.command_id < b.command_id;
    if (a.distance_ft != b.distance_ft) return a.distance_ft < b.distance_ft;
    if (a.jammer_on != b.jammer_on) return !a.jammer_on;
    return a.seed_used < b.seed_used;
  });

  std::string out = "command,distance_ft,jammer,outcome,audible_snr_db,margin\n";
  for (const auto& r : sorted) {
    char margin[64];
    std::snprintf(margin, sizeof margin, "%.4f", r.margin);
    out += r.command_id + "," + fmt_g(r.distance_ft) + "," + (r.jammer_on ? "on" : "off") + "," +
           verdict_cell(r.outcome) + "," + snr_cell(r.audible_band_snr_db) + "," + margin + "\n";
  }
  return out;
}

void emit_table(const std::vector<TrialRecord>& records, const std::string& path) {
  write_file(path, table_to_csv(records));
}

void emit_spectrogram_pairs(const ExperimentConfig& config,
                            const std::vector<CellCaptures>& cells, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& cell : cells) {
    if (cell.repeat != 0) continue;
    const std::string base =
        dir + "/" + cell_base(cell.command_id, cell.distance_ft, cell.jammer_on, 0);
    const analysis::SpectrogramMatrix m =
        analysis::stft(cell.capture, config.stft_window, config.stft_hop);
    analysis::write_pgm(base + ".pgm", analysis::render_spectrogram(m));
    write_file(base + ".csv", analysis::matrix_to_csv(m));
  }
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::filesystem::path out_dir(config.output_dir);
  const std::filesystem::path captures_dir = out_dir / "captures";
  std::filesystem::create_directories(captures_dir);

  std::vector<CellCaptures> cells;
  const auto sink = [&](const CellCaptures& cell) {
    const std::string base = cell_base(cell.command_id, cell.distance_ft, cell.jammer_on,
                                       cell.repeat);
    wav::write_wav((captures_dir / (base + ".wav")).string(), cell.capture);
    if (cell.jammer_on) {
      wav::write_wav((captures_dir / (base + "_speech.wav")).string(), cell.reference);
      wav::write_wav((captures_dir / (base + "_jam.wav")).string(), cell.interference);
    } else {
      wav::write_wav((captures_dir / (base + "_floor.wav")).string(), cell.interference);
    }
    cells.push_back(cell);
  };

  std::vector<TrialRecord> records = run_grid(config, sink);
  emit_table(records, (out_dir / "trials.csv").string());
  emit_spectrogram_pairs(config, cells, (out_dir / "spectrograms").string());
  write_file((out_dir / "config_used.cfg").string(), serialize_config(config));
  return records;
}

void regenerate_report(const std::string& out_dir) {
  const std::filesystem::path root(out_dir);
  ExperimentConfig config = load_config_file((root / "config_used.cfg").string());
  validate(config);
  const auto commands = active_commands(config);
  const auto templates = build_templates(config);
  const std::filesystem::path captures_dir = root / "captures";

  std::vector<TrialRecord> records;
  std::vector<CellCaptures> cells;
  for (const Command* cmd : commands) {
    for (double dist : config.distances_ft) {
      for (bool jammer_on : {false, true}) {
        for (int rep = 0; rep < config.repeats; ++rep) {
          const std::string base = cell_base(cmd->id, dist, jammer_on, rep);

          CellCaptures cell;
          cell.command_id = cmd->id;
          cell.distance_ft = dist;
          cell.jammer_on = jammer_on;
          cell.repeat = rep;
          cell.capture = wav::read_wav((captures_dir / (base + ".wav")).string());
          if (jammer_on) {
            cell.reference = wav::read_wav((captures_dir / (base + "_speech.wav")).string());
            cell.interference = wav::read_wav((captures_dir / (base + "_jam.wav")).string());
          } else {
            cell.reference = cell.capture;
            cell.interference = wav::read_wav((captures_dir / (base + "_floor.wav")).string());
          }

          const analysis::TrialOutcome outcome = analysis::keyword_spot(
              cell.capture, templates, cmd->id, config.t_ack, config.t_margin);

          TrialRecord rec;
          rec.command_id = cmd->id;
          rec.distance_ft = dist;
          rec.jammer_on = jammer_on;
          rec.outcome = outcome.verdict;
          rec.audible_band_snr_db =
              analysis::band_snr(cell.reference, cell.interference, kSnrLowHz, kSnrHighHz);
          rec.margin = outcome.margin;
          rec.seed_used = cell_seed(config.master_seed, cmd->id, dist, jammer_on, rep);
          records.push_back(std::move(rec));
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  emit_table(records, (root / "trials.csv").string());
  emit_spectrogram_pairs(config, cells, (root / "spectrograms").string());
}

Thresholds calibrate_thresholds(const ExperimentConfig& config) {
  validate(config);
  const auto commands = active_commands(config);
  const auto templates = build_templates(config);

  // Self-distances grow with distance (the capture floor drifts away from
  // the enrollment conditions) while cross-distances at close range can dip
  // below far-range self-distances, so no single threshold separates the two
  // sets globally. It does not have to: the nearest template is reliably the
  // right one, and t_ack only draws the line between "plausible match" and
  // "no response". Size it as headroom over the worst clean self-distance.
  double max_self = 0.0;
  for (const Command* cmd : commands) {
    const SampleBuffer utt =
        signals::synth_utterance(utterance_for(*cmd, config.manual_trigger), config.scene_rate_hz);
    for (double dist : config.distances_ft) {
      acoustics::SourceSpec src;
      src.waveform = utt;
      src.spl_db = config.speech_spl_db;
      src.cal_distance_m = acoustics::ft_to_m(config.speech_cal_distance_ft);
      src.distance_m = acoustics::ft_to_m(dist);
      const SampleBuffer pressure =
          acoustics::propagate(src, config.absorption, config.scene_rate_hz);
      for (int rep = 0; rep < config.repeats; ++rep) {
        const std::uint64_t cs = cell_seed(config.master_seed, cmd->id, dist, false, rep);
        const SampleBuffer cap =
            mic_model::capture(pressure, config.mic, dsp::mix_seed(cs, kSlotMicMain));
        const analysis::FeatureMatrix feats = analysis::mfcc(cap);
        for (const auto& t : templates)
          if (t.command_id == cmd->id)
            max_self = std::max(max_self, analysis::dtw_distance(feats, t.features));
      }
    }
  }

  Thresholds th;
  th.t_ack = 1.2 * max_self;
  th.t_margin = 0.25 * th.t_ack;
  return th;
}

}  // namespace nujam::harness
