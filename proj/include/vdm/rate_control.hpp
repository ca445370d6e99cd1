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

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vdm/codec.hpp"
#include "vdm/discomfort.hpp"
#include "vdm/errors.hpp"
#include "vdm/fidelity.hpp"
#include "vdm/frame.hpp"

namespace vdm {

// The three QP policies compared by the toolkit:
//   WRDO    constant QP, no feedback
//   SRDO    MAD feedback against a fidelity ceiling
//   VDM_RDO discomfort feedback against a calibrated quality floor
enum class RdoPolicy { WRDO, SRDO, VDM_RDO };

inline const char* to_string(RdoPolicy p) {
  switch (p) {
    case RdoPolicy::WRDO: return "WRDO";
    case RdoPolicy::SRDO: return "SRDO";
    case RdoPolicy::VDM_RDO: return "VDM_RDO";
  }
  return "?";
}

inline RdoPolicy parse_policy(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (name == "wrdo") return RdoPolicy::WRDO;
  if (name == "srdo") return RdoPolicy::SRDO;
  if (name == "vdm" || name == "vdm_rdo" || name == "vdm-rdo")
    return RdoPolicy::VDM_RDO;
  throw ValidationError("unknown policy '" + name +
                        "' (expected wrdo, srdo or vdm)");
}

// Mean discomfort score per constant QP over the calibration range
// [30, 49]; the source of the VDM_RDO quality floor.
struct CalibrationTable {
  static constexpr int kQpLo = 30;
  static constexpr int kQpHi = 49;
  static constexpr int kEntries = kQpHi - kQpLo + 1;

  std::vector<double> mean_vdm;  // index 0 is QP 30

  double at(int qp) const {
    if (qp < kQpLo || qp > kQpHi)
      throw ValidationError("calibration table covers QP [30, 49], asked " +
                            std::to_string(qp));
    return mean_vdm[static_cast<std::size_t>(qp - kQpLo)];
  }
};

// Encodes the whole sequence at every constant QP in [30, 49] and records
// the mean discomfort score. Entries are independent of one another.
template <CodecBackend Backend>
CalibrationTable calibrate(const DepthSequence& gt, const Backend& codec,
                           const VdmParams& params) {
  if (gt.frames.size() < 2)
    throw ValidationError("calibrate needs at least 2 frames");
  CalibrationTable table;
  table.mean_vdm.reserve(CalibrationTable::kEntries);
  for (int qp = CalibrationTable::kQpLo; qp <= CalibrationTable::kQpHi; ++qp) {
    DepthSequence recon;
    recon.meta = gt.meta;
    recon.frames.reserve(gt.frames.size());
    for (std::size_t t = 0; t < gt.frames.size(); ++t)
      recon.frames.push_back(
          codec.encode(t, gt.frames[t], QuantParam(qp)).reconstruction);
    table.mean_vdm.push_back(score_sequence(gt, recon, params).mean_vdm);
  }
  return table;
}

// How to pick the quality floor from a calibration table.
//   mean    arithmetic mean of the 20 entries (default)
//   qp<NN>  the entry at a fixed QP
//   p<NN>   nearest-rank percentile of the entries
struct ThresholdRule {
  enum class Kind { Mean, AtQp, Percentile };
  Kind kind = Kind::Mean;
  int qp = 40;
  double percentile = 50.0;

  static ThresholdRule parse(const std::string& text) {
    ThresholdRule rule;
    if (text == "mean") {
      rule.kind = Kind::Mean;
      return rule;
    }
    try {
      if (text.rfind("qp", 0) == 0) {
        rule.kind = Kind::AtQp;
        rule.qp = std::stoi(text.substr(2));
        return rule;
      }
      if (text.rfind("p", 0) == 0) {
        rule.kind = Kind::Percentile;
        rule.percentile = std::stod(text.substr(1));
        if (rule.percentile < 0.0 || rule.percentile > 100.0)
          throw ValidationError("percentile out of [0, 100]: " + text);
        return rule;
      }
    } catch (const std::logic_error&) {
    }
    throw ValidationError("unknown threshold rule '" + text +
                          "' (expected mean, qp<NN> or p<NN>)");
  }
};

inline double select_threshold(const CalibrationTable& table,
                               const ThresholdRule& rule = ThresholdRule{}) {
  if (table.mean_vdm.size() != CalibrationTable::kEntries)
    throw ValidationError("calibration table must hold exactly " +
                          std::to_string(CalibrationTable::kEntries) +
                          " entries");
  switch (rule.kind) {
    case ThresholdRule::Kind::Mean:
      return mean(table.mean_vdm);
    case ThresholdRule::Kind::AtQp:
      return table.at(rule.qp);
    case ThresholdRule::Kind::Percentile: {
      std::vector<double> sorted = table.mean_vdm;
      std::sort(sorted.begin(), sorted.end());
      // Nearest-rank: the ceil(p/100 * N)-th smallest value.
      const auto n = static_cast<double>(sorted.size());
      auto rank = static_cast<std::size_t>(
          std::ceil(rule.percentile / 100.0 * n));
      rank = std::clamp<std::size_t>(rank, 1, sorted.size());
      return sorted[rank - 1];
    }
  }
  throw ValidationError("unhandled threshold rule");
}

struct RdoConfig {
  RdoPolicy policy = RdoPolicy::VDM_RDO;
  QuantParam initial_qp{40};
  int qp_min = 30;
  int qp_max = 50;
  int step = 1;
  // Quality floor (VDM_RDO) or fidelity ceiling (SRDO). SRDO calibrates
  // itself to the mean per-frame MAD at the initial QP when unset;
  // VDM_RDO requires a value, typically from select_threshold.
  std::optional<double> threshold;

  void validate() const {
    if (qp_min < 0 || qp_max > 51 || qp_min > qp_max)
      throw ValidationError("QP bounds must satisfy 0 <= min <= max <= 51");
    if (initial_qp.qp < qp_min || initial_qp.qp > qp_max)
      throw ValidationError("initial QP " + std::to_string(initial_qp.qp) +
                            " outside [" + std::to_string(qp_min) + ", " +
                            std::to_string(qp_max) + "]");
    if (step < 1) throw ValidationError("QP step must be >= 1");
  }
};

// Per-frame record of a policy run.
struct RdoTrace {
  struct Row {
    int frame = 0;
    int qp = 0;
    double metric = 0.0;  // the policy's control metric for this frame
    double bits = 0.0;
  };
  RdoPolicy policy = RdoPolicy::WRDO;
  std::vector<Row> rows;

  double total_bits() const {
    double sum = 0.0;
    for (const Row& r : rows) sum += r.bits;
    return sum;
  }
};

struct RdoRun {
  RdoTrace trace;
  DepthSequence processed;
  double threshold_used = 0.0;  // 0 for WRDO
};

// Runs one policy over the sequence. All policies share the loop shape:
// encode frame t at the current QP, evaluate the control metric on the
// just-encoded material, move the QP one step for frame t+1, clamped to
// [qp_min, qp_max].
//
//   WRDO     no movement; the trace metric is the pair discomfort score,
//            recorded for reference only.
//   SRDO     metric = MAD of the just-encoded frame. Below the ceiling the
//            quality is better than needed, so the QP rises; at or above
//            it the QP drops.
//   VDM_RDO  metric = discomfort score of the just-encoded pair. Above
//            the floor the QP rises, otherwise it drops. The first
//            decision, before a second frame exists, scores frame 0
//            against itself (temporal terms 0).
//
// The control metric trails the encode by one frame by construction.
template <CodecBackend Backend>
RdoRun run_policy(const DepthSequence& gt, const Backend& codec,
                  const RdoConfig& cfg, const VdmParams& params) {
  cfg.validate();
  params.validate();
  gt.validate();
  if (gt.frames.empty()) throw ValidationError("empty sequence");
  if (cfg.policy == RdoPolicy::VDM_RDO && !cfg.threshold)
    throw ValidationError("VDM_RDO needs a threshold (see select_threshold)");

  double threshold = cfg.threshold.value_or(0.0);
  if (cfg.policy == RdoPolicy::SRDO && !cfg.threshold) {
    // Fidelity ceiling: mean per-frame MAD at the constant initial QP.
    double sum = 0.0;
    for (std::size_t t = 0; t < gt.frames.size(); ++t)
      sum += mad(gt.frames[t],
                 codec.encode(t, gt.frames[t], cfg.initial_qp).reconstruction);
    threshold = sum / static_cast<double>(gt.frames.size());
  }

  RdoRun run;
  run.trace.policy = cfg.policy;
  run.threshold_used = cfg.policy == RdoPolicy::WRDO ? 0.0 : threshold;
  run.processed.meta = gt.meta;
  run.processed.frames.reserve(gt.frames.size());

  QuantParam qp = cfg.initial_qp;
  ErrorMap prev_err;
  for (std::size_t t = 0; t < gt.frames.size(); ++t) {
    EncodedFrame enc = codec.encode(t, gt.frames[t], qp);
    run.processed.frames.push_back(std::move(enc.reconstruction));
    const DepthFrame& recon = run.processed.frames.back();

    double metric = 0.0;
    if (cfg.policy == RdoPolicy::SRDO) {
      metric = mad(gt.frames[t], recon);
    } else {
      ErrorMap cur_err = delta_z(gt.frames[t], recon);
      const std::size_t tp = t == 0 ? 0 : t - 1;
      metric = vdm_frame(
          pair_indexes(t == 0 ? cur_err : prev_err, cur_err,
                       run.processed.frames[tp], recon),
          params);
      prev_err = std::move(cur_err);
    }
    run.trace.rows.push_back(
        {static_cast<int>(t), qp.qp, metric, enc.estimated_bits});

    if (t + 1 < gt.frames.size()) {
      int next = qp.qp;
      switch (cfg.policy) {
        case RdoPolicy::WRDO:
          break;
        case RdoPolicy::SRDO:
          next = metric < threshold ? qp.qp + cfg.step : qp.qp - cfg.step;
          break;
        case RdoPolicy::VDM_RDO:
          next = metric > threshold ? qp.qp + cfg.step : qp.qp - cfg.step;
          break;
      }
      qp = QuantParam(std::clamp(next, cfg.qp_min, cfg.qp_max));
    }
  }
  return run;
}

// Sequence-level outcome of a run: bitrate plus quality means.
// infinite_psnr_frames counts lossless frames, which are kept out of the
// PSNR mean; a run with only lossless frames reports an infinite mean.
struct RdoSummary {
  double kbits_per_sec = 0.0;
  double mean_psnr_db = 0.0;
  double mean_ssim = 0.0;
  double mean_vdm = 0.0;
  int infinite_psnr_frames = 0;
};

// Shared summary path: every command that reports a (sequence, bits)
// outcome funnels through here so identical inputs give bit-identical
// numbers.
inline RdoSummary summarize_pair(const DepthSequence& gt,
                                 const DepthSequence& proc, double total_bits,
                                 double fps, const VdmParams& params) {
  require_same_shape(gt, proc, "summarize");
  const std::size_t n = gt.frames.size();
  RdoSummary s;
  s.kbits_per_sec =
      RateReport::of(total_bits, static_cast<int>(n), fps).kbits_per_sec;
  double psnr_sum = 0.0, ssim_sum = 0.0;
  int finite = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double p = psnr(gt.frames[t], proc.frames[t]);
    if (std::isfinite(p)) {
      psnr_sum += p;
      ++finite;
    } else {
      ++s.infinite_psnr_frames;
    }
    ssim_sum += ssim(gt.frames[t], proc.frames[t]);
  }
  s.mean_psnr_db = finite > 0 ? psnr_sum / finite : kInfinitePsnr;
  s.mean_ssim = ssim_sum / static_cast<double>(n);
  s.mean_vdm = score_sequence(gt, proc, params).mean_vdm;
  return s;
}

inline RdoSummary summarize(const RdoTrace& trace, const DepthSequence& gt,
                            const DepthSequence& proc, double fps,
                            const VdmParams& params) {
  if (trace.rows.size() != gt.frames.size())
    throw ValidationError("trace rows (" + std::to_string(trace.rows.size()) +
                          ") do not match frame count (" +
                          std::to_string(gt.frames.size()) + ")");
  return summarize_pair(gt, proc, trace.total_bits(), fps, params);
}

}  // namespace vdm
