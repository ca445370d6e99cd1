// Copyright 2026 The VDM Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Depth-video quality and rate-control driver.
//
// Subcommands: metrics, siti, sweep, calibrate, rdo, compare.
// Exit codes: 0 success, 2 validation failure, 3 I/O failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "vdm/discomfort.hpp"
#include "vdm/errors.hpp"
#include "vdm/io.hpp"
#include "vdm/precoded.hpp"
#include "vdm/report.hpp"

namespace {

struct InputOptions {
  int width = 0;
  int height = 0;
  int frames = 0;  // 0 = all
  double fps = 30.0;
  bool yuv420 = false;
  std::string pattern = "*.pgm";
};

// Directories load as PGM sequences, single .pgm files as one frame,
// anything else as headerless raw (which needs explicit --width/--height).
vdm::DepthSequence load_sequence(const std::string& path,
                                 const InputOptions& in) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    vdm::DepthSequence seq = vdm::read_pgm_sequence(path, in.pattern, in.fps);
    if (in.frames > 0) {
      if (static_cast<std::size_t>(in.frames) > seq.frames.size())
        throw vdm::ValidationError(path + ": " + std::to_string(in.frames) +
                                   " frames requested, only " +
                                   std::to_string(seq.frames.size()) +
                                   " found");
      seq.frames.resize(static_cast<std::size_t>(in.frames));
      seq.meta.frame_count = in.frames;
    }
    return seq;
  }
  if (path.size() > 4 && path.substr(path.size() - 4) == ".pgm") {
    vdm::DepthSequence seq;
    seq.frames.push_back(vdm::read_pgm(path));
    seq.meta.width = seq.frames[0].width;
    seq.meta.height = seq.frames[0].height;
    seq.meta.frame_count = 1;
    seq.meta.fps = in.fps;
    return seq;
  }
  if (in.width <= 0 || in.height <= 0)
    throw vdm::ValidationError(
        "raw input needs --width and --height: " + path);
  vdm::SequenceMeta meta;
  meta.width = in.width;
  meta.height = in.height;
  meta.frame_count = in.frames;
  meta.fps = in.fps;
  return vdm::read_raw_y(path, meta, in.yuv420);
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw vdm::IoError("cannot open for writing: " + out_path);
  out << text;
  if (!out) throw vdm::IoError("write failed: " + out_path);
}

// "k,a,b,c" -> pooling parameters.
vdm::VdmParams parse_params(const std::string& text) {
  std::istringstream ss(text);
  std::string item;
  std::vector<double> v;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw vdm::ValidationError("bad --params component '" + item + "'");
    }
  }
  if (v.size() != 4)
    throw vdm::ValidationError("--params wants k,a,b,c (got " +
                               std::to_string(v.size()) + " values)");
  vdm::VdmParams p{v[0], v[1], v[2], v[3], true};
  p.validate();
  return p;
}

// Exponents default to the ground-truth content indexes.
vdm::VdmParams resolve_params(const std::optional<std::string>& params_text,
                              const vdm::DepthSequence& gt) {
  return params_text ? parse_params(*params_text) : vdm::vdm_params_for(gt);
}

using Backend = std::variant<vdm::ToyCodec, vdm::PrecodedProvider>;

Backend make_backend(const std::string& selector) {
  if (selector == "toy") return vdm::ToyCodec{};
  if (selector.rfind("precoded:", 0) == 0)
    return vdm::PrecodedProvider::scan(selector.substr(9));
  throw vdm::ValidationError("unknown codec '" + selector +
                             "' (expected toy or precoded:<dir>)");
}

struct Cli {
  InputOptions input;
  std::string out_path;
  std::string format = "csv";
  std::vector<std::string> gt_paths;
  std::string proc_path;
  std::string codec = "toy";
  std::optional<std::string> params_text;
  std::string threshold_rule = "mean";
  std::optional<double> threshold;
  std::string policy = "vdm";
  std::vector<std::string> policies;
  std::vector<int> sweep_qps;
  int initial_qp = 40;
  int qp_min = 30;
  int qp_max = 50;
  int step = 1;
  std::string trace_path;
};

void add_input_flags(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--width", cli.input.width, "Raw input width in pixels");
  cmd->add_option("--height", cli.input.height, "Raw input height in pixels");
  cmd->add_option("--frames", cli.input.frames,
                  "Frames to load (0 = all available)");
  cmd->add_option("--fps", cli.input.fps, "Frames per second (default 30)");
  cmd->add_flag("--yuv420", cli.input.yuv420,
                "Raw input is planar YUV420; read Y, skip chroma");
  cmd->add_option("--pattern", cli.input.pattern,
                  "Filename glob for PGM directories (default *.pgm)");
}

void add_output_flags(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--out", cli.out_path, "Output path (default stdout)");
  cmd->add_option("--format", cli.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

std::string render(const std::string& format, const std::string& csv,
                   const vdm::Json& json) {
  return format == "json" ? json.dump(2) + "\n" : csv;
}

vdm::RdoConfig make_config(const Cli& cli, vdm::RdoPolicy policy) {
  vdm::RdoConfig cfg;
  cfg.policy = policy;
  cfg.initial_qp = vdm::QuantParam(cli.initial_qp);
  cfg.qp_min = cli.qp_min;
  cfg.qp_max = cli.qp_max;
  cfg.step = cli.step;
  cfg.threshold = cli.threshold;
  cfg.validate();
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Depth-video discomfort metrics, toy codec and QP rate control"};
  app.require_subcommand(1);
  Cli cli;

  CLI::App* metrics =
      app.add_subcommand("metrics", "Per-frame discomfort and fidelity table");
  metrics->add_option("--gt", cli.gt_paths, "Ground-truth sequence")
      ->required()
      ->expected(1);
  metrics->add_option("--proc", cli.proc_path, "Processed sequence")
      ->required();
  metrics->add_option("--params", cli.params_text,
                      "Pooling parameters k,a,b,c");
  add_input_flags(metrics, cli);
  add_output_flags(metrics, cli);

  CLI::App* siti =
      app.add_subcommand("siti", "Spatial/temporal content indexes");
  siti->add_option("--gt", cli.gt_paths, "Input sequence")
      ->required()
      ->expected(1);
  add_input_flags(siti, cli);
  add_output_flags(siti, cli);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Constant-QP quality/bitrate grid");
  sweep->add_option("--gt", cli.gt_paths, "Ground-truth sequence")
      ->required()
      ->expected(1);
  sweep->add_option("--qp", cli.sweep_qps,
                    "QP grid (default 30 35 40 45 49)");
  sweep->add_option("--codec", cli.codec, "toy or precoded:<dir>");
  sweep->add_option("--params", cli.params_text,
                    "Pooling parameters k,a,b,c");
  add_input_flags(sweep, cli);
  add_output_flags(sweep, cli);

  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Mean score per constant QP in [30, 49] plus threshold");
  calibrate->add_option("--gt", cli.gt_paths, "Ground-truth sequence")
      ->required()
      ->expected(1);
  calibrate->add_option("--codec", cli.codec, "toy or precoded:<dir>");
  calibrate->add_option("--params", cli.params_text,
                        "Pooling parameters k,a,b,c");
  calibrate->add_option("--threshold-rule", cli.threshold_rule,
                        "mean, qp<NN> or p<NN>");
  add_input_flags(calibrate, cli);
  add_output_flags(calibrate, cli);

  CLI::App* rdo = app.add_subcommand("rdo", "Run one rate-control policy");
  rdo->add_option("--gt", cli.gt_paths, "Ground-truth sequence")
      ->required()
      ->expected(1);
  rdo->add_option("--policy", cli.policy, "wrdo, srdo or vdm (default vdm)");
  rdo->add_option("--codec", cli.codec, "toy or precoded:<dir>");
  rdo->add_option("--params", cli.params_text, "Pooling parameters k,a,b,c");
  rdo->add_option("--qp", cli.initial_qp, "Initial QP (default 40)");
  rdo->add_option("--qp-min", cli.qp_min, "Minimum QP (default 30)");
  rdo->add_option("--qp-max", cli.qp_max, "Maximum QP (default 50)");
  rdo->add_option("--step", cli.step, "QP step per frame (default 1)");
  rdo->add_option("--threshold", cli.threshold,
                  "Control threshold (default: calibrated)");
  rdo->add_option("--threshold-rule", cli.threshold_rule,
                  "mean, qp<NN> or p<NN>");
  rdo->add_option("--trace", cli.trace_path,
                  "Also write the per-frame trace CSV here");
  add_input_flags(rdo, cli);
  add_output_flags(rdo, cli);

  CLI::App* compare =
      app.add_subcommand("compare", "Policy comparison table");
  compare->add_option("--gt", cli.gt_paths, "Ground-truth sequence(s)")
      ->required();
  compare->add_option("--policy", cli.policies,
                      "Policies to compare (default all three)");
  compare->add_option("--codec", cli.codec, "toy or precoded:<dir>");
  compare->add_option("--params", cli.params_text,
                      "Pooling parameters k,a,b,c");
  compare->add_option("--qp", cli.initial_qp, "Initial QP (default 40)");
  compare->add_option("--qp-min", cli.qp_min, "Minimum QP (default 30)");
  compare->add_option("--qp-max", cli.qp_max, "Maximum QP (default 50)");
  compare->add_option("--step", cli.step, "QP step per frame (default 1)");
  compare->add_option("--threshold", cli.threshold,
                      "Control threshold (default: calibrated)");
  compare->add_option("--threshold-rule", cli.threshold_rule,
                      "mean, qp<NN> or p<NN>");
  add_input_flags(compare, cli);
  add_output_flags(compare, cli);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit clean, bad flags are 2
  }

  if (metrics->parsed()) {
    const vdm::DepthSequence gt = load_sequence(cli.gt_paths[0], cli.input);
    const vdm::DepthSequence proc = load_sequence(cli.proc_path, cli.input);
    const vdm::VdmParams params = resolve_params(cli.params_text, gt);
    const vdm::MetricsReport report = vdm::run_metrics(gt, proc, params);
    write_output(render(cli.format, to_csv(report), to_json(report)),
                 cli.out_path);
  } else if (siti->parsed()) {
    const vdm::DepthSequence seq = load_sequence(cli.gt_paths[0], cli.input);
    const vdm::SitiReport report = vdm::run_siti(seq);
    write_output(render(cli.format, to_csv(report), to_json(report)),
                 cli.out_path);
  } else if (sweep->parsed()) {
    const vdm::DepthSequence gt = load_sequence(cli.gt_paths[0], cli.input);
    const vdm::VdmParams params = resolve_params(cli.params_text, gt);
    const std::vector<int>& qps =
        cli.sweep_qps.empty() ? vdm::default_sweep_qps() : cli.sweep_qps;
    const Backend backend = make_backend(cli.codec);
    const vdm::SweepReport report = std::visit(
        [&](const auto& codec) { return vdm::run_sweep(gt, codec, qps, params); },
        backend);
    write_output(render(cli.format, to_csv(report), to_json(report)),
                 cli.out_path);
  } else if (calibrate->parsed()) {
    const vdm::DepthSequence gt = load_sequence(cli.gt_paths[0], cli.input);
    const vdm::VdmParams params = resolve_params(cli.params_text, gt);
    const Backend backend = make_backend(cli.codec);
    const vdm::CalibrationReport report = std::visit(
        [&](const auto& codec) {
          return vdm::run_calibrate(gt, codec, params, cli.threshold_rule);
        },
        backend);
    write_output(render(cli.format, to_csv(report), to_json(report)),
                 cli.out_path);
  } else if (rdo->parsed()) {
    const vdm::RdoConfig cfg =
        make_config(cli, vdm::parse_policy(cli.policy));
    const Backend backend = make_backend(cli.codec);
    const vdm::DepthSequence gt = load_sequence(cli.gt_paths[0], cli.input);
    const vdm::VdmParams params = resolve_params(cli.params_text, gt);
    const vdm::RdoReport report = std::visit(
        [&](const auto& codec) {
          return vdm::run_rdo(gt, codec, cfg, params, cli.threshold_rule);
        },
        backend);
    const std::string name =
        std::filesystem::path(cli.gt_paths[0]).stem().string();
    write_output(render(cli.format, to_csv(report, name), to_json(report)),
                 cli.out_path);
    if (!cli.trace_path.empty())
      write_output(vdm::trace_to_csv(report.trace), cli.trace_path);
  } else if (compare->parsed()) {
    std::vector<vdm::RdoPolicy> policies;
    if (cli.policies.empty()) {
      policies = {vdm::RdoPolicy::WRDO, vdm::RdoPolicy::SRDO,
                  vdm::RdoPolicy::VDM_RDO};
    } else {
      for (const std::string& p : cli.policies)
        policies.push_back(vdm::parse_policy(p));
    }
    std::optional<vdm::VdmParams> params;
    if (cli.params_text) params = parse_params(*cli.params_text);
    const vdm::RdoConfig cfg = make_config(cli, vdm::RdoPolicy::WRDO);
    const Backend backend = make_backend(cli.codec);
    std::vector<vdm::DepthSequence> gts;
    std::vector<std::string> names;
    for (const std::string& path : cli.gt_paths) {
      gts.push_back(load_sequence(path, cli.input));
      names.push_back(std::filesystem::path(path).stem().string());
    }
    if (std::holds_alternative<vdm::PrecodedProvider>(backend) &&
        gts.size() != 1)
      throw vdm::ValidationError(
          "a precoded codec serves exactly one sequence");
    const vdm::CompareReport report = std::visit(
        [&](const auto& codec) {
          std::vector<const std::decay_t<decltype(codec)>*> codecs(
              gts.size(), &codec);
          return vdm::run_compare(names, gts, codecs, policies, cfg, params,
                                  cli.threshold_rule);
        },
        backend);
    write_output(render(cli.format, to_csv(report), to_json(report)),
                 cli.out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const vdm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vdm::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
