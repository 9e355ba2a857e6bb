// Copyright 2026 The Careflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// careflow: classifies object-transport motions in grayscale video as
// careful (C) or not careful (NC). Subcommands: run, train, eval, gen,
// flow-check. Exit codes: 0 success, 2 configuration error, 3 I/O error,
// 4 data error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "careflow/config.hpp"
#include "careflow/errors.hpp"
#include "careflow/flow.hpp"
#include "careflow/model_io.hpp"
#include "careflow/pipeline.hpp"
#include "careflow/rng.hpp"
#include "careflow/segment_io.hpp"
#include "careflow/stats.hpp"
#include "careflow/synth.hpp"
#include "careflow/train.hpp"
#include "careflow/video_io.hpp"

namespace fs = std::filesystem;
using namespace careflow;

namespace {

// Config layering: defaults, then --config file, then --set key=value.
PipelineSettings resolve_settings(const std::string& config_path,
                                  const std::vector<std::string>& overrides,
                                  bool realtime_flag) {
  ConfigMap map;
  if (!config_path.empty()) map = load_config_file(config_path);
  for (const std::string& item : overrides) {
    const ConfigMap one = parse_config_text(item);
    for (const auto& [k, v] : one) map[k] = v;  // later sources win
  }
  PipelineSettings settings = settings_from_config(map);
  if (realtime_flag) settings.realtime = true;
  return settings;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string latency_csv(const LatencyStats& s) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "median_ms,mad_ms,n\n%.9g,%.9g,%zu\n",
                s.median_ms, s.mad_ms, s.n);
  return buf;
}

std::string wilcoxon_csv_row(const std::string& metric,
                             const std::vector<double>& c_values,
                             const std::vector<double>& nc_values) {
  // Populations are paired index-wise after truncation to the common size;
  // the pairing unit is the sample order within each class.
  const std::size_t n = std::min(c_values.size(), nc_values.size());
  std::vector<double> x(c_values.begin(), c_values.begin() + n);
  std::vector<double> y(nc_values.begin(), nc_values.begin() + n);
  char buf[192];
  try {
    const WilcoxonResult r = wilcoxon_signed_rank(x, y);
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.9g,%.9g,%d,%d,%s\n",
                  metric.c_str(), r.n, r.w, r.p_value,
                  r.significant_at_0_05 ? 1 : 0, r.significant_at_0_01 ? 1 : 0,
                  r.exact ? "exact" : "normal");
  } catch (const DataError&) {
    std::snprintf(buf, sizeof(buf), "%s,%zu,,,,,insufficient\n",
                  metric.c_str(), n);
  }
  return buf;
}

struct MetricPools {
  std::vector<double> md_c, md_nc, admd_c, admd_nc;

  void add(Label label, const Segment& seg) {
    if (seg.values.size() < 2 || seg.truncated) return;
    const KinematicMetrics m = kinematic_metrics(seg);
    if (label == Label::C) {
      md_c.push_back(m.md_s);
      admd_c.push_back(m.ad_over_md);
    } else {
      md_nc.push_back(m.md_s);
      admd_nc.push_back(m.ad_over_md);
    }
  }

  std::string boxplots() const {
    std::vector<std::pair<std::string, BoxplotSummary>> rows;
    auto push = [&rows](const char* name, const std::vector<double>& v) {
      if (!v.empty()) rows.emplace_back(name, boxplot_summary(v));
    };
    push("MD_C", md_c);
    push("MD_NC", md_nc);
    push("ADMD_C", admd_c);
    push("ADMD_NC", admd_nc);
    return boxplots_to_csv(rows);
  }

  std::string wilcoxon() const {
    std::string out = "metric,n,w,p_value,sig_0_05,sig_0_01,method\n";
    out += wilcoxon_csv_row("MD", md_c, md_nc);
    out += wilcoxon_csv_row("ADMD", admd_c, admd_nc);
    return out;
  }
};

int cmd_run(const std::string& input, const std::string& model_path,
            const std::string& out_path, const std::string& config_path,
            const std::vector<std::string>& overrides, bool realtime,
            const std::string& velocity_out, const std::string& latency_out) {
  const PipelineSettings settings =
      resolve_settings(config_path, overrides, realtime);
  const ModelParams model = load_model(model_path);
  FrameStreamReader source(input);
  const RunResult result = run_stream(source, model, settings);

  {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + out_path + "' for writing");
    // Batch outputs stay byte-stable across runs; realtime outputs carry the
    // measured recognition times.
    write_events_csv(out, result.events,
                     /*deterministic_latency=*/!settings.realtime);
    if (!out) throw IoError("write failed for '" + out_path + "'");
  }
  if (!velocity_out.empty()) {
    std::ofstream out(velocity_out, std::ios::binary);
    if (!out) throw IoError("cannot open '" + velocity_out + "' for writing");
    write_velocity_csv(out, result.series);
  }
  if (!latency_out.empty() && !result.events.empty()) {
    write_text_file(latency_out,
                    latency_csv(latency_stats(recognition_times_ms(result.events))));
  }
  std::printf("frames %zu, samples %llu, events %zu\n", result.frames,
              static_cast<unsigned long long>(result.counters.fed),
              result.events.size());
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& out_path,
              const TrainConfig& cfg, const std::string& log_path) {
  const std::vector<LabeledSequence> dataset = load_labeled_dataset(data_dir);
  const TrainResult result = train(dataset, cfg);
  save_model(result.params, out_path);
  std::string log = training_log_text(result);
  if (result.test_report) {
    log += "\n" + report_to_text(*result.test_report);
  }
  if (!log_path.empty()) {
    write_text_file(log_path, log);
  }
  std::printf("trained on %zu sequences; stopped after epoch %d, best epoch %d\n",
              dataset.size(), result.stopped_epoch, result.best_epoch);
  if (result.test_report) {
    std::printf("test accuracy %.4f over %zu held-out sequences\n",
                result.test_report->accuracy, result.test_report->total());
  }
  return 0;
}

int cmd_eval_data(const std::string& model_path, const std::string& data_dir,
                  const std::string& out_dir) {
  const ModelParams model = load_model(model_path);
  const std::vector<LabeledSequence> dataset = load_labeled_dataset(data_dir);
  if (dataset.empty()) throw DataError("eval: dataset is empty");
  fs::create_directories(out_dir);

  std::vector<Label> pred, truth;
  std::vector<double> inference_ms;
  MetricPools pools;
  for (const LabeledSequence& seq : dataset) {
    const Prediction p = predict(model, seq.values);
    pred.push_back(p.label);
    truth.push_back(seq.label);
    inference_ms.push_back(p.inference_ms);
    Segment seg;
    seg.values = seq.values;
    seg.t_start = 0.0;
    seg.t_end = static_cast<double>(seq.values.size()) / 15.0;
    pools.add(seq.label, seg);
  }
  const ClassificationReport report = classification_report(pred, truth);
  write_text_file((fs::path(out_dir) / "report.txt").string(),
                  report_to_text(report));
  write_text_file((fs::path(out_dir) / "report.csv").string(),
                  report_to_csv(report));
  write_text_file((fs::path(out_dir) / "boxplots.csv").string(),
                  pools.boxplots());
  write_text_file((fs::path(out_dir) / "wilcoxon.csv").string(),
                  pools.wilcoxon());
  write_text_file((fs::path(out_dir) / "latency.csv").string(),
                  latency_csv(latency_stats(inference_ms)));
  std::printf("%s", report_to_text(report).c_str());
  return 0;
}

int cmd_eval_stream(const std::string& model_path, const std::string& input,
                    const std::string& out_dir,
                    const std::string& config_path,
                    const std::vector<std::string>& overrides, bool realtime) {
  const PipelineSettings settings =
      resolve_settings(config_path, overrides, realtime);
  const ModelParams model = load_model(model_path);
  FrameStreamReader source(input);
  const RunResult result = run_stream(source, model, settings);
  fs::create_directories(out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "events.csv", std::ios::binary);
    if (!out) throw IoError("cannot write events.csv in '" + out_dir + "'");
    write_events_csv(out, result.events,
                     /*deterministic_latency=*/!settings.realtime);
  }
  MetricPools pools;  // grouped by predicted label: no ground truth here
  for (const RecognitionEvent& ev : result.events) {
    pools.add(ev.label, ev.segment);
  }
  write_text_file((fs::path(out_dir) / "boxplots.csv").string(),
                  pools.boxplots());
  if (!result.events.empty()) {
    write_text_file(
        (fs::path(out_dir) / "latency.csv").string(),
        latency_csv(latency_stats(recognition_times_ms(result.events))));
  }
  std::printf("frames %zu, events %zu\n", result.frames,
              result.events.size());
  return 0;
}

int cmd_gen(const std::string& kind, const std::string& out_dir,
            std::size_t per_class, std::uint64_t seed, bool identical,
            int width, int height, double fps, const std::string& format) {
  const ClassDistributions dist = identical
                                      ? ClassDistributions::identical()
                                      : ClassDistributions{};
  if (kind == "profiles") {
    const std::vector<GeneratedProfile> corpus =
        generate_corpus(per_class, dist, seed);
    std::vector<std::pair<Segment, Label>> items;
    items.reserve(corpus.size());
    for (const GeneratedProfile& p : corpus) {
      items.emplace_back(p.segment, p.label);
    }
    save_labeled_dataset(out_dir, items);
    std::printf("wrote %zu profiles to %s\n", items.size(), out_dir.c_str());
    return 0;
  }
  if (kind == "scenes") {
    fs::create_directories(out_dir);
    std::ofstream manifest(fs::path(out_dir) / "scenes.csv",
                           std::ios::binary);
    if (!manifest) throw IoError("cannot write scenes.csv in '" + out_dir + "'");
    manifest << "file,label,motion_start_s,motion_end_s\n";
    std::mt19937_64 rng(seed);
    std::size_t index = 0;
    for (Label label : {Label::C, Label::NC}) {
      for (std::size_t i = 0; i < per_class; ++i) {
        const SceneSample sample =
            sample_scene(label, dist, width, height, fps, rng());
        const RenderedScene scene = render_scene(sample.spec);
        char name[40];
        if (format == "pgm") {
          std::snprintf(name, sizeof(name), "scene_%04zu", index);
          write_pgm_dir((fs::path(out_dir) / name).string(), scene.frames,
                        fps);
        } else {
          std::snprintf(name, sizeof(name), "scene_%04zu.cfvid", index);
          write_cfvid((fs::path(out_dir) / name).string(), scene.frames, fps);
        }
        char row[128];
        std::snprintf(row, sizeof(row), "%s,%s,%.9g,%.9g\n", name,
                      to_string(label).c_str(), scene.motion_start_s,
                      scene.motion_end_s);
        manifest << row;
        ++index;
      }
    }
    manifest.flush();
    if (!manifest) throw IoError("manifest write failed in '" + out_dir + "'");
    std::printf("wrote %zu scenes to %s\n", index, out_dir.c_str());
    return 0;
  }
  throw ConfigError("gen: --kind must be 'profiles' or 'scenes'");
}

int cmd_flow_check(const std::string& input, bool self_test,
                   const std::string& out_path,
                   const std::string& config_path,
                   const std::vector<std::string>& overrides) {
  const PipelineSettings settings =
      resolve_settings(config_path, overrides, false);

  if (self_test) {
    // Known-translation diagnostic on a synthetic textured frame.
    std::mt19937_64 rng(7);
    SceneSpec spec;
    spec.seed = rng();
    RenderedScene still = render_scene(spec);  // static textured frame
    const Frame& base = still.frames.front();
    bool ok = true;
    std::printf("dx,dy,interior_rms_px\n");
    for (int d = 0; d <= 3; ++d) {
      for (const auto [dx, dy] : {std::pair{d, 0}, std::pair{0, d},
                                  std::pair{d, d}}) {
        if (dx == 0 && dy == 0) continue;
        Frame shifted = base;
        for (int y = 0; y < base.height; ++y) {
          for (int x = 0; x < base.width; ++x) {
            const int sx = std::clamp(x - dx, 0, base.width - 1);
            const int sy = std::clamp(y - dy, 0, base.height - 1);
            shifted.at(x, y) = base.at(sx, sy);
          }
        }
        const FlowField flow = compute_flow(base, shifted, settings.flow);
        double se = 0.0;
        std::size_t n = 0;
        const int m = 20;  // interior margin
        for (int y = m; y < base.height - m; ++y) {
          for (int x = m; x < base.width - m; ++x) {
            const std::size_t at =
                static_cast<std::size_t>(y) * base.width + x;
            const double eu = flow.u[at] - dx;
            const double ev = flow.v[at] - dy;
            se += eu * eu + ev * ev;
            ++n;
          }
        }
        const double rms = std::sqrt(se / (2.0 * static_cast<double>(n)));
        std::printf("%d,%d,%.4f\n", dx, dy, rms);
        if (rms > 0.25) ok = false;
      }
    }
    const FlowField zero = compute_flow(base, base, settings.flow);
    double max_mag = 0.0;
    for (std::size_t i = 0; i < zero.u.size(); ++i) {
      max_mag = std::max(max_mag, static_cast<double>(std::abs(zero.u[i])));
      max_mag = std::max(max_mag, static_cast<double>(std::abs(zero.v[i])));
    }
    std::printf("zero_motion_max_px,%.3g\n", max_mag);
    if (max_mag >= 1e-6) ok = false;
    std::printf("self_test,%s\n", ok ? "pass" : "fail");
    return ok ? 0 : 1;
  }

  if (input.empty()) {
    throw ConfigError("flow-check: give --input or --self-test");
  }
  FrameStreamReader source(input);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + out_path + "' for writing");
    out = &file;
  }
  *out << "t_s,u_mean_pxf,v_mean_pxf,active_px,v_pxs\n";
  std::optional<Frame> prev;
  while (auto frame = source.next()) {
    if (prev) {
      const FlowField flow = compute_flow(*prev, *frame, settings.flow);
      const MeanMotion mm = mean_motion(flow, settings.flow);
      const double v =
          tangential_velocity(mm.u_mean, mm.v_mean, settings.feature);
      char row[160];
      std::snprintf(row, sizeof(row), "%.9g,%.9g,%.9g,%zu,%.9g\n",
                    frame->timestamp, mm.u_mean, mm.v_mean, mm.active_count,
                    v);
      *out << row;
    }
    prev = std::move(*frame);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "careflow: carefulness classification of object-transport motions in "
      "grayscale video"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "careflow 0.1.0");
  app.footer("Exit codes: 0 success, 2 configuration error, 3 I/O error, "
             "4 data error.\n\nDefault configuration keys:\n" +
             default_config_text());

  // run
  auto* run = app.add_subcommand(
      "run", "Stream a frame container through the classifier, emit events CSV");
  std::string run_input, run_model, run_out, run_config;
  std::vector<std::string> run_set;
  bool run_realtime = false;
  std::string run_velocity, run_latency;
  run->add_option("--input", run_input, "CFVID file or PGM directory")
      ->required();
  run->add_option("--model", run_model, "model file")->required();
  run->add_option("--out", run_out, "events CSV path")->required();
  run->add_option("--config", run_config, "key = value config file");
  run->add_option("--set", run_set, "inline config override, e.g. --set 'segmenter.tau = 6'");
  run->add_flag("--realtime", run_realtime,
                "pace frames at source fps and measure true latency");
  run->add_option("--velocity-out", run_velocity,
                  "also write the 15 Hz velocity series CSV");
  run->add_option("--latency-out", run_latency,
                  "also write recognition-time statistics CSV");

  // train
  auto* tr = app.add_subcommand("train",
                                "Train the classifier on a labeled segment dataset");
  std::string tr_data, tr_out, tr_log;
  TrainConfig tr_cfg;
  tr->add_option("--data", tr_data, "dataset directory with labels.csv")
      ->required();
  tr->add_option("--out", tr_out, "model file to write")->required();
  tr->add_option("--seed", tr_cfg.seed, "RNG seed");
  tr->add_option("--epochs", tr_cfg.max_epochs, "maximum epochs");
  tr->add_option("--batch-size", tr_cfg.batch_size, "minibatch size");
  tr->add_option("--patience", tr_cfg.patience, "early-stopping patience");
  tr->add_option("--lr", tr_cfg.initial_lr, "initial learning rate");
  tr->add_option("--decay", tr_cfg.lr_decay_rate, "per-epoch LR decay factor");
  tr->add_option("--hidden", tr_cfg.hidden_units, "LSTM units per direction");
  tr->add_option("--train-frac", tr_cfg.train_frac, "training split fraction");
  tr->add_option("--val-frac", tr_cfg.val_frac, "validation split fraction");
  tr->add_option("--test-frac", tr_cfg.test_frac, "test split fraction");
  tr->add_option("--log", tr_log, "write the training log to this file");

  // eval
  auto* ev = app.add_subcommand(
      "eval", "Evaluate a model on a labeled dataset or a frame stream");
  std::string ev_model, ev_data, ev_input, ev_out, ev_config;
  std::vector<std::string> ev_set;
  bool ev_realtime = false;
  ev->add_option("--model", ev_model, "model file")->required();
  ev->add_option("--data", ev_data, "labeled segment dataset directory");
  ev->add_option("--input", ev_input, "CFVID file or PGM directory");
  ev->add_option("--out-dir", ev_out, "directory for the reports")->required();
  ev->add_option("--config", ev_config, "key = value config file");
  ev->add_option("--set", ev_set, "inline config override");
  ev->add_flag("--realtime", ev_realtime, "pace frames at source fps");

  // gen
  auto* gen = app.add_subcommand(
      "gen", "Generate synthetic labeled profiles or rendered scenes");
  std::string gen_kind, gen_out, gen_format = "cfvid";
  std::size_t gen_per_class = 400;
  std::uint64_t gen_seed = 0;
  bool gen_identical = false;
  int gen_width = 320, gen_height = 240;
  double gen_fps = 15.0;
  gen->add_option("--kind", gen_kind, "'profiles' or 'scenes'")->required();
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--per-class", gen_per_class, "samples per class");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_flag("--identical", gen_identical,
                "draw both classes from the same distribution (leakage guard)");
  gen->add_option("--width", gen_width, "scene width, px");
  gen->add_option("--height", gen_height, "scene height, px");
  gen->add_option("--fps", gen_fps, "scene frame rate");
  gen->add_option("--format", gen_format, "'cfvid' or 'pgm'");

  // flow-check
  auto* fc = app.add_subcommand("flow-check",
                                "Optical-flow diagnostics over a stream or a "
                                "built-in known-translation test");
  std::string fc_input, fc_out, fc_config;
  std::vector<std::string> fc_set;
  bool fc_self = false;
  fc->add_option("--input", fc_input, "CFVID file or PGM directory");
  fc->add_flag("--self-test", fc_self, "run the known-translation check");
  fc->add_option("--out", fc_out, "write per-pair motion CSV here");
  fc->add_option("--config", fc_config, "key = value config file");
  fc->add_option("--set", fc_set, "inline config override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad invocation is a configuration error
  }

  try {
    if (run->parsed()) {
      return cmd_run(run_input, run_model, run_out, run_config, run_set,
                     run_realtime, run_velocity, run_latency);
    }
    if (tr->parsed()) {
      return cmd_train(tr_data, tr_out, tr_cfg, tr_log);
    }
    if (ev->parsed()) {
      if (ev_data.empty() == ev_input.empty()) {
        throw ConfigError("eval: give exactly one of --data or --input");
      }
      if (!ev_data.empty()) {
        return cmd_eval_data(ev_model, ev_data, ev_out);
      }
      return cmd_eval_stream(ev_model, ev_input, ev_out, ev_config, ev_set,
                             ev_realtime);
    }
    if (gen->parsed()) {
      return cmd_gen(gen_kind, gen_out, gen_per_class, gen_seed,
                     gen_identical, gen_width, gen_height, gen_fps,
                     gen_format);
    }
    if (fc->parsed()) {
      return cmd_flow_check(fc_input, fc_self, fc_out, fc_config, fc_set);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
