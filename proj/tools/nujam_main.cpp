// nujam: near-ultrasonic jamming simulation toolkit.
//
// Subcommands:
//   gen noise | gen utterance   write source material as WAV
//   jam                         write a modulated jammer WAV
//   simulate                    run the full trial grid into an output dir
//   analyze                     band SNR / degradation report for two captures
//   report                      rebuild CSV + spectrograms from stored captures
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime error.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nujam/analysis.hpp"
#include "nujam/harness.hpp"
#include "nujam/kvconfig.hpp"
#include "nujam/modulation.hpp"
#include "nujam/signals.hpp"
#include "nujam/wav.hpp"

namespace {

using namespace nujam;

struct GenNoiseArgs {
  std::string color = "white";
  double duration_s = 1.0;
  double rate_hz = 96000.0;
  double band_low_hz = 0.0;
  double band_high_hz = -1.0;  // default: Nyquist
  std::uint64_t seed = 1;
  std::string out;
};

struct GenUtteranceArgs {
  std::string command_id;
  bool manual_trigger = false;
  double rate_hz = 96000.0;
  std::string out;
};

struct JamArgs {
  std::string color = "white";
  double carrier_hz = 16000.0;
  double band_hz = 6000.0;  // baseband width; emission occupies carrier..carrier+band
  double duration_s = 1.0;
  double rate_hz = 96000.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct SimulateArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct AnalyzeArgs {
  std::string clean_path;
  std::string jammed_path;
  std::string band = "300:6000";
  std::string command_id;
  bool manual_trigger = false;
};

std::pair<double, double> parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("band must be LOW:HIGH, got '" + text + "'");
  std::size_t lo_end = 0, hi_end = 0;
  const std::string lo_text = text.substr(0, colon), hi_text = text.substr(colon + 1);
  double lo = 0.0, hi = 0.0;
  try {
    lo = std::stod(lo_text, &lo_end);
    hi = std::stod(hi_text, &hi_end);
  } catch (const std::exception&) {
    throw std::invalid_argument("band must be LOW:HIGH, got '" + text + "'");
  }
  if (lo_end != lo_text.size() || hi_end != hi_text.size() || !(lo < hi))
    throw std::invalid_argument("band must be LOW:HIGH with LOW < HIGH, got '" + text + "'");
  return {lo, hi};
}

const harness::Command& find_command(const std::string& id) {
  for (const auto& c : harness::default_command_bank())
    if (c.id == id) return c;
  std::string known;
  for (const auto& c : harness::default_command_bank()) known += (known.empty() ? "" : ", ") + c.id;
  throw std::invalid_argument("unknown command id '" + id + "' (bank: " + known + ")");
}

int run_gen_noise(const GenNoiseArgs& args) {
  signals::NoiseSpec spec;
  spec.color = signals::noise_color_from_string(args.color);
  spec.duration_s = args.duration_s;
  spec.sample_rate_hz = args.rate_hz;
  spec.seed = args.seed;
  spec.band_low_hz = args.band_low_hz;
  spec.band_high_hz = args.band_high_hz < 0.0 ? args.rate_hz / 2.0 : args.band_high_hz;
  wav::write_wav(args.out, signals::gen_noise(spec));
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

int run_gen_utterance(const GenUtteranceArgs& args) {
  const harness::Command& cmd = find_command(args.command_id);
  SampleBuffer utt =
      signals::synth_utterance(harness::utterance_for(cmd, args.manual_trigger), args.rate_hz);
  wav::write_wav(args.out, utt);
  std::printf("wrote %s (%.3f s)\n", args.out.c_str(), utt.duration_s());
  return 0;
}

int run_jam(const JamArgs& args) {
  modulation::SusbamParams params{args.carrier_hz, args.band_hz, args.rate_hz};
  modulation::validate(params);

  signals::NoiseSpec spec;
  spec.color = signals::noise_color_from_string(args.color);
  spec.duration_s = args.duration_s;
  spec.sample_rate_hz = args.rate_hz;
  spec.seed = args.seed;
  spec.band_low_hz = 0.0;
  spec.band_high_hz = args.band_hz;
  SampleBuffer jammer = modulation::susbam_modulate(signals::gen_noise(spec), params);
  wav::write_wav(args.out, jammer);
  std::printf("wrote %s (band %g-%g Hz)\n", args.out.c_str(), args.carrier_hz,
              args.carrier_hz + args.band_hz);
  return 0;
}

int run_simulate(const SimulateArgs& args) {
  harness::ExperimentConfig config;
  if (!args.config_path.empty()) {
    try {
      config = harness::load_config_file(args.config_path);
    } catch (const kvconfig::ParseError&) {
      throw;
    } catch (const std::runtime_error& e) {
      // An unreadable --config path is a configuration mistake, not a
      // mid-pipeline failure.
      throw std::invalid_argument(e.what());
    }
  }
  if (args.seed_set) config.master_seed = args.seed;
  if (!args.out_dir.empty()) config.output_dir = args.out_dir;

  const auto records = harness::run_experiment(config);
  int clean_total = 0, clean_ack = 0, jam_total = 0, jam_ack = 0;
  for (const auto& r : records) {
    if (r.jammer_on) {
      ++jam_total;
      jam_ack += r.outcome == analysis::Verdict::ack;
    } else {
      ++clean_total;
      clean_ack += r.outcome == analysis::Verdict::ack;
    }
  }
  std::printf("trials: %zu\n", records.size());
  std::printf("clean ack rate: %d/%d\n", clean_ack, clean_total);
  std::printf("jammed ack rate: %d/%d\n", jam_ack, jam_total);
  std::printf("outputs: %s\n", config.output_dir.c_str());
  return 0;
}

int run_analyze(const AnalyzeArgs& args) {
  const auto [lo, hi] = parse_band(args.band);
  const SampleBuffer clean = wav::read_wav(args.clean_path);
  const SampleBuffer jammed = wav::read_wav(args.jammed_path);

  // Ratio of clean to jammed in-band energy; negative when jamming added
  // energy to the band.
  const double snr = analysis::band_snr(clean, jammed, lo, hi);
  std::printf("band_hz = %g:%g\n", lo, hi);
  std::printf("band_snr_db = %.2f\n", snr);

  if (!args.command_id.empty()) {
    const harness::Command& cmd = find_command(args.command_id);
    const auto report = analysis::phoneme_class_degradation(
        harness::utterance_for(cmd, args.manual_trigger), clean, jammed);
    for (const auto& d : report)
      std::printf("%s: mean_drop_db = %.2f over %d segments\n",
                  signals::to_string(d.phoneme_class), d.mean_drop_db, d.segment_count);
  }
  return 0;
}

int run_report(const std::string& out_dir) {
  harness::regenerate_report(out_dir);
  std::printf("report regenerated in %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-ultrasonic jamming simulation toolkit"};
  app.require_subcommand(1);

  GenNoiseArgs gen_noise;
  GenUtteranceArgs gen_utt;
  JamArgs jam;
  SimulateArgs sim;
  AnalyzeArgs ana;
  std::string report_dir;

  CLI::App* gen = app.add_subcommand("gen", "write source material as WAV");
  gen->require_subcommand(1);
  CLI::App* noise = gen->add_subcommand("noise", "seeded colored noise");
  noise->add_option("--color", gen_noise.color, "white|pink|brown|babble")->capture_default_str();
  noise->add_option("--duration-s", gen_noise.duration_s)->capture_default_str();
  noise->add_option("--rate-hz", gen_noise.rate_hz)->capture_default_str();
  noise->add_option("--band-low-hz", gen_noise.band_low_hz)->capture_default_str();
  noise->add_option("--band-high-hz", gen_noise.band_high_hz, "default: Nyquist");
  noise->add_option("--seed", gen_noise.seed)->capture_default_str();
  noise->add_option("--out", gen_noise.out, "output WAV path")->required();

  CLI::App* utt = gen->add_subcommand("utterance", "synthetic command from the built-in bank");
  utt->add_option("--command", gen_utt.command_id, "command id, e.g. cmd01")->required();
  utt->add_flag("--manual-trigger", gen_utt.manual_trigger, "skip the wake prefix");
  utt->add_option("--rate-hz", gen_utt.rate_hz)->capture_default_str();
  utt->add_option("--out", gen_utt.out, "output WAV path")->required();

  CLI::App* jam_cmd = app.add_subcommand("jam", "write a modulated jammer WAV");
  jam_cmd->add_option("--color", jam.color, "baseband noise color")->capture_default_str();
  jam_cmd->add_option("--carrier-hz", jam.carrier_hz)->capture_default_str();
  jam_cmd->add_option("--band-hz", jam.band_hz, "baseband width; emission covers carrier..carrier+band")
      ->capture_default_str();
  jam_cmd->add_option("--duration-s", jam.duration_s)->capture_default_str();
  jam_cmd->add_option("--rate-hz", jam.rate_hz)->capture_default_str();
  jam_cmd->add_option("--seed", jam.seed)->capture_default_str();
  jam_cmd->add_option("--out", jam.out, "output WAV path")->required();

  CLI::App* sim_cmd = app.add_subcommand("simulate", "run the trial grid");
  sim_cmd->add_option("--config", sim.config_path, "config file (defaults apply when omitted)");
  sim_cmd->add_option("--seed", sim.seed, "override seeds.master")
      ->each([&](const std::string&) { sim.seed_set = true; });
  sim_cmd->add_option("--out-dir", sim.out_dir, "override output_dir");

  CLI::App* ana_cmd = app.add_subcommand("analyze", "compare a clean and a jammed capture");
  ana_cmd->add_option("--clean", ana.clean_path)->required();
  ana_cmd->add_option("--jammed", ana.jammed_path)->required();
  ana_cmd->add_option("--band", ana.band, "LOW:HIGH in Hz")->capture_default_str();
  ana_cmd->add_option("--command", ana.command_id,
                      "command id; adds a per-phoneme-class degradation report");
  ana_cmd->add_flag("--manual-trigger", ana.manual_trigger,
                    "the captures were made without the wake prefix");

  CLI::App* rep_cmd = app.add_subcommand("report", "rebuild trials.csv and spectrograms");
  rep_cmd->add_option("--out-dir", report_dir, "directory of a previous simulate run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (noise->parsed()) return run_gen_noise(gen_noise);
    if (utt->parsed()) return run_gen_utterance(gen_utt);
    if (jam_cmd->parsed()) return run_jam(jam);
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (ana_cmd->parsed()) return run_analyze(ana);
    if (rep_cmd->parsed()) return run_report(report_dir);
  } catch (const kvconfig::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
