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

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vdm/discomfort.hpp"
#include "vdm/fidelity.hpp"
#include "vdm/frame.hpp"
#include "vdm/rate_control.hpp"

namespace vdm {

using Json = nlohmann::json;

// CSV cells carry 6 significant digits; JSON keeps full precision.
// Infinities serialize as "inf" in both formats (JSON has no infinity
// literal, so a string stands in).
inline std::string fmt_g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline Json json_num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// metrics: per-frame discomfort + fidelity table

struct MetricsRow {
  int frame = 0;  // the later frame of the pair
  double so = 0.0, to = 0.0, ti = 0.0;
  double vdm = 0.0, vqm3 = 0.0;
  double psnr_db = 0.0, ssim = 0.0, mad = 0.0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;  // frame_count - 1 rows, frames 1..n-1
  MetricsRow mean;               // column means over the rows
  int infinite_psnr_frames = 0;  // rows excluded from the PSNR mean
};

inline MetricsReport run_metrics(const DepthSequence& gt,
                                 const DepthSequence& proc,
                                 const VdmParams& params) {
  const SequenceScore score = score_sequence(gt, proc, params);
  MetricsReport report;
  report.rows.reserve(score.frames.size());
  double psnr_sum = 0.0;
  int finite = 0;
  for (const FrameScore& fs : score.frames) {
    MetricsRow row;
    row.frame = fs.frame;
    row.so = fs.indexes.so;
    row.to = fs.indexes.to;
    row.ti = fs.indexes.ti;
    row.vdm = fs.vdm;
    row.vqm3 = fs.vqm3;
    const std::size_t t = static_cast<std::size_t>(fs.frame);
    row.psnr_db = psnr(gt.frames[t], proc.frames[t]);
    row.ssim = ssim(gt.frames[t], proc.frames[t]);
    row.mad = mad(gt.frames[t], proc.frames[t]);
    if (std::isfinite(row.psnr_db)) {
      psnr_sum += row.psnr_db;
      ++finite;
    } else {
      ++report.infinite_psnr_frames;
    }
    report.mean.so += row.so;
    report.mean.to += row.to;
    report.mean.ti += row.ti;
    report.mean.vdm += row.vdm;
    report.mean.vqm3 += row.vqm3;
    report.mean.ssim += row.ssim;
    report.mean.mad += row.mad;
    report.rows.push_back(row);
  }
  const double n = static_cast<double>(report.rows.size());
  report.mean.so /= n;
  report.mean.to /= n;
  report.mean.ti /= n;
  report.mean.vdm /= n;
  report.mean.vqm3 /= n;
  report.mean.ssim /= n;
  report.mean.mad /= n;
  report.mean.psnr_db = finite > 0 ? psnr_sum / finite : kInfinitePsnr;
  return report;
}

inline constexpr const char* kMetricsCsvHeader =
    "frame,so,to,ti,vdm,vqm3,psnr_db,ssim,mad";

inline std::string to_csv(const MetricsReport& r) {
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  auto emit = [&out](const std::string& label, const MetricsRow& row) {
    out += label + "," + fmt_g6(row.so) + "," + fmt_g6(row.to) + "," +
           fmt_g6(row.ti) + "," + fmt_g6(row.vdm) + "," + fmt_g6(row.vqm3) +
           "," + fmt_g6(row.psnr_db) + "," + fmt_g6(row.ssim) + "," +
           fmt_g6(row.mad) + "\n";
  };
  for (const MetricsRow& row : r.rows) emit(std::to_string(row.frame), row);
  emit("mean", r.mean);
  return out;
}

inline Json row_json(const MetricsRow& row) {
  return Json{{"so", json_num(row.so)},         {"to", json_num(row.to)},
              {"ti", json_num(row.ti)},         {"vdm", json_num(row.vdm)},
              {"vqm3", json_num(row.vqm3)},     {"psnr_db", json_num(row.psnr_db)},
              {"ssim", json_num(row.ssim)},     {"mad", json_num(row.mad)}};
}

inline Json to_json(const MetricsReport& r) {
  Json frames = Json::array();
  for (const MetricsRow& row : r.rows) {
    Json j = row_json(row);
    j["frame"] = row.frame;
    frames.push_back(std::move(j));
  }
  Json mean = row_json(r.mean);
  mean["infinite_psnr_frames"] = r.infinite_psnr_frames;
  return Json{{"command", "metrics"},
              {"frames", std::move(frames)},
              {"mean", std::move(mean)}};
}

// ---------------------------------------------------------------------------
// siti: sequence content-complexity indexes

struct SitiReport {
  double si = 0.0;       // pre-root spatial information
  double ti_info = 0.0;  // pre-root temporal information
  double s_inf = 0.0;    // cube roots
  double t_inf = 0.0;
};

inline SitiReport run_siti(const DepthSequence& seq) {
  SitiReport r;
  r.si = spatial_information(seq);
  r.ti_info = temporal_information(seq);
  r.s_inf = std::cbrt(r.si);
  r.t_inf = std::cbrt(r.ti_info);
  return r;
}

inline constexpr const char* kSitiCsvHeader = "si,ti_info,s_inf,t_inf";

inline std::string to_csv(const SitiReport& r) {
  return std::string(kSitiCsvHeader) + "\n" + fmt_g6(r.si) + "," +
         fmt_g6(r.ti_info) + "," + fmt_g6(r.s_inf) + "," + fmt_g6(r.t_inf) +
         "\n";
}

inline Json to_json(const SitiReport& r) {
  return Json{{"command", "siti"},
              {"si", json_num(r.si)},
              {"ti_info", json_num(r.ti_info)},
              {"s_inf", json_num(r.s_inf)},
              {"t_inf", json_num(r.t_inf)}};
}

// ---------------------------------------------------------------------------
// sweep: constant-QP grid

struct SweepRow {
  int qp = 0;
  double mean_vdm = 0.0;
  double mean_ssim = 0.0;
  double mean_psnr_db = 0.0;
  double normalized_psnr = 0.0;
  double kbits_per_sec = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

namespace detail {

template <CodecBackend Backend>
std::pair<DepthSequence, double> constant_qp_run(const DepthSequence& gt,
                                                 const Backend& codec,
                                                 QuantParam qp) {
  DepthSequence proc;
  proc.meta = gt.meta;
  proc.frames.reserve(gt.frames.size());
  double total_bits = 0.0;
  for (std::size_t t = 0; t < gt.frames.size(); ++t) {
    EncodedFrame enc = codec.encode(t, gt.frames[t], qp);
    total_bits += enc.estimated_bits;
    proc.frames.push_back(std::move(enc.reconstruction));
  }
  return {std::move(proc), total_bits};
}

}  // namespace detail

inline const std::vector<int>& default_sweep_qps() {
  static const std::vector<int> qps = {30, 35, 40, 45, 49};
  return qps;
}

template <CodecBackend Backend>
SweepReport run_sweep(const DepthSequence& gt, const Backend& codec,
                      const std::vector<int>& qps, const VdmParams& params) {
  if (qps.empty()) throw ValidationError("sweep needs at least one QP");
  SweepReport report;
  std::vector<double> psnrs;
  for (int qp : qps) {
    auto [proc, bits] = detail::constant_qp_run(gt, codec, QuantParam(qp));
    const RdoSummary s =
        summarize_pair(gt, proc, bits, gt.meta.fps, params);
    SweepRow row;
    row.qp = qp;
    row.mean_vdm = s.mean_vdm;
    row.mean_ssim = s.mean_ssim;
    row.mean_psnr_db = s.mean_psnr_db;
    row.kbits_per_sec = s.kbits_per_sec;
    psnrs.push_back(s.mean_psnr_db);
    report.rows.push_back(row);
  }
  // Lossless grids (every PSNR infinite) cannot be max-normalized; the
  // column then mirrors the sentinel.
  bool any_finite = false;
  for (double p : psnrs) any_finite |= std::isfinite(p);
  const std::vector<double> norm =
      any_finite ? normalized_psnr(psnrs) : psnrs;
  for (std::size_t i = 0; i < norm.size(); ++i)
    report.rows[i].normalized_psnr = norm[i];
  return report;
}

inline constexpr const char* kSweepCsvHeader =
    "qp,mean_vdm,mean_ssim,mean_psnr_db,normalized_psnr,kbits_per_sec";

inline std::string to_csv(const SweepReport& r) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const SweepRow& row : r.rows)
    out += std::to_string(row.qp) + "," + fmt_g6(row.mean_vdm) + "," +
           fmt_g6(row.mean_ssim) + "," + fmt_g6(row.mean_psnr_db) + "," +
           fmt_g6(row.normalized_psnr) + "," + fmt_g6(row.kbits_per_sec) +
           "\n";
  return out;
}

inline Json to_json(const SweepReport& r) {
  Json rows = Json::array();
  for (const SweepRow& row : r.rows)
    rows.push_back(Json{{"qp", row.qp},
                        {"mean_vdm", json_num(row.mean_vdm)},
                        {"mean_ssim", json_num(row.mean_ssim)},
                        {"mean_psnr_db", json_num(row.mean_psnr_db)},
                        {"normalized_psnr", json_num(row.normalized_psnr)},
                        {"kbits_per_sec", json_num(row.kbits_per_sec)}});
  return Json{{"command", "sweep"}, {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// calibrate: quality-floor table

struct CalibrationReport {
  CalibrationTable table;
  std::string rule;
  double threshold = 0.0;
};

template <CodecBackend Backend>
CalibrationReport run_calibrate(const DepthSequence& gt, const Backend& codec,
                                const VdmParams& params,
                                const std::string& rule_text = "mean") {
  CalibrationReport r;
  r.table = calibrate(gt, codec, params);
  r.rule = rule_text;
  r.threshold = select_threshold(r.table, ThresholdRule::parse(rule_text));
  return r;
}

inline constexpr const char* kCalibrateCsvHeader = "qp,mean_vdm";

inline std::string to_csv(const CalibrationReport& r) {
  std::string out = std::string(kCalibrateCsvHeader) + "\n";
  for (int qp = CalibrationTable::kQpLo; qp <= CalibrationTable::kQpHi; ++qp)
    out += std::to_string(qp) + "," + fmt_g6(r.table.at(qp)) + "\n";
  out += "threshold," + fmt_g6(r.threshold) + "\n";
  return out;
}

inline Json to_json(const CalibrationReport& r) {
  Json table = Json::array();
  for (int qp = CalibrationTable::kQpLo; qp <= CalibrationTable::kQpHi; ++qp)
    table.push_back(Json{{"qp", qp}, {"mean_vdm", json_num(r.table.at(qp))}});
  return Json{{"command", "calibrate"},
              {"rule", r.rule},
              {"threshold", json_num(r.threshold)},
              {"table", std::move(table)}};
}

// ---------------------------------------------------------------------------
// rdo / compare: policy runs and the policy-comparison table

struct RdoReport {
  RdoPolicy policy = RdoPolicy::WRDO;
  double threshold = 0.0;
  RdoTrace trace;
  RdoSummary summary;
};

// Runs one policy end to end: resolves the threshold (calibrating for
// VDM_RDO when none is given), runs the control loop, summarizes.
template <CodecBackend Backend>
RdoReport run_rdo(const DepthSequence& gt, const Backend& codec,
                  RdoConfig cfg, const VdmParams& params,
                  const std::string& rule_text = "mean") {
  if (cfg.policy == RdoPolicy::VDM_RDO && !cfg.threshold)
    cfg.threshold = select_threshold(calibrate(gt, codec, params),
                                     ThresholdRule::parse(rule_text));
  RdoRun run = run_policy(gt, codec, cfg, params);
  RdoReport report;
  report.policy = cfg.policy;
  report.threshold = run.threshold_used;
  report.summary =
      summarize(run.trace, gt, run.processed, gt.meta.fps, params);
  report.trace = std::move(run.trace);
  return report;
}

inline constexpr const char* kTraceCsvHeader = "frame,qp,metric,bits";

inline std::string trace_to_csv(const RdoTrace& trace) {
  std::string out = std::string(kTraceCsvHeader) + "\n";
  for (const RdoTrace::Row& row : trace.rows)
    out += std::to_string(row.frame) + "," + std::to_string(row.qp) + "," +
           fmt_g6(row.metric) + "," + fmt_g6(row.bits) + "\n";
  return out;
}

struct CompareReport {
  std::vector<RdoPolicy> policies;
  struct SequenceResult {
    std::string name;
    std::vector<RdoReport> per_policy;  // aligned with policies
  };
  std::vector<SequenceResult> sequences;
  std::vector<RdoSummary> average;  // aligned with policies
};

// Runs every requested policy on every sequence through the exact same
// path as the single-policy command, then averages across sequences.
// When no explicit pooling parameters are given, exponents are derived
// from each sequence's own content.
template <CodecBackend Backend>
CompareReport run_compare(const std::vector<std::string>& names,
                          const std::vector<DepthSequence>& gts,
                          const std::vector<const Backend*>& codecs,
                          const std::vector<RdoPolicy>& policies,
                          const RdoConfig& base_cfg,
                          const std::optional<VdmParams>& explicit_params,
                          const std::string& rule_text = "mean") {
  if (gts.empty()) throw ValidationError("compare needs at least 1 sequence");
  if (names.size() != gts.size() || codecs.size() != gts.size())
    throw ValidationError("compare: names, sequences and codecs must align");
  if (policies.empty())
    throw ValidationError("compare needs at least 1 policy");

  CompareReport report;
  report.policies = policies;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const VdmParams params =
        explicit_params ? *explicit_params : vdm_params_for(gts[i]);
    CompareReport::SequenceResult result;
    result.name = names[i];
    for (RdoPolicy policy : policies) {
      RdoConfig cfg = base_cfg;
      cfg.policy = policy;
      result.per_policy.push_back(
          run_rdo(gts[i], *codecs[i], cfg, params, rule_text));
    }
    report.sequences.push_back(std::move(result));
  }
  const double n = static_cast<double>(gts.size());
  for (std::size_t p = 0; p < policies.size(); ++p) {
    RdoSummary avg;
    for (const auto& seq : report.sequences) {
      avg.kbits_per_sec += seq.per_policy[p].summary.kbits_per_sec;
      avg.mean_psnr_db += seq.per_policy[p].summary.mean_psnr_db;
      avg.mean_ssim += seq.per_policy[p].summary.mean_ssim;
      avg.mean_vdm += seq.per_policy[p].summary.mean_vdm;
      avg.infinite_psnr_frames +=
          seq.per_policy[p].summary.infinite_psnr_frames;
    }
    avg.kbits_per_sec /= n;
    avg.mean_psnr_db /= n;
    avg.mean_ssim /= n;
    avg.mean_vdm /= n;
    report.average.push_back(avg);
  }
  return report;
}

inline Json summary_json(const RdoSummary& s) {
  return Json{{"kbits_per_sec", json_num(s.kbits_per_sec)},
              {"mean_psnr_db", json_num(s.mean_psnr_db)},
              {"mean_ssim", json_num(s.mean_ssim)},
              {"mean_vdm", json_num(s.mean_vdm)},
              {"infinite_psnr_frames", s.infinite_psnr_frames}};
}

inline Json to_json(const RdoReport& r) {
  Json trace = Json::array();
  for (const RdoTrace::Row& row : r.trace.rows)
    trace.push_back(Json{{"frame", row.frame},
                         {"qp", row.qp},
                         {"metric", json_num(row.metric)},
                         {"bits", json_num(row.bits)}});
  return Json{{"command", "rdo"},
              {"policy", to_string(r.policy)},
              {"threshold", json_num(r.threshold)},
              {"summary", summary_json(r.summary)},
              {"trace", std::move(trace)}};
}

namespace detail {

// Shared Table-style renderer: sections bitrate_kbps / psnr_db / ssim /
// mean_vdm, one column per policy, one row per sequence plus AVERAGE.
inline std::string comparison_csv(const std::vector<RdoPolicy>& policies,
                                  const std::vector<std::string>& names,
                                  const std::vector<std::vector<RdoSummary>>&
                                      rows,  // [sequence][policy]
                                  const std::vector<RdoSummary>& average) {
  std::string out = "section,sequence";
  for (RdoPolicy p : policies) out += std::string(",") + to_string(p);
  out += "\n";
  struct Section {
    const char* name;
    double RdoSummary::* field;
  };
  static constexpr Section kSections[] = {
      {"bitrate_kbps", &RdoSummary::kbits_per_sec},
      {"psnr_db", &RdoSummary::mean_psnr_db},
      {"ssim", &RdoSummary::mean_ssim},
      {"mean_vdm", &RdoSummary::mean_vdm},
  };
  for (const Section& section : kSections) {
    for (std::size_t i = 0; i <= names.size(); ++i) {
      const bool is_avg = i == names.size();
      out += std::string(section.name) + "," +
             (is_avg ? "AVERAGE" : csv_escape(names[i]));
      for (std::size_t p = 0; p < policies.size(); ++p) {
        const RdoSummary& s = is_avg ? average[p] : rows[i][p];
        out += "," + fmt_g6(s.*(section.field));
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace detail

inline std::string to_csv(const RdoReport& r, const std::string& name) {
  return detail::comparison_csv({r.policy}, {name}, {{r.summary}},
                                {r.summary});
}

inline std::string to_csv(const CompareReport& r) {
  std::vector<std::string> names;
  std::vector<std::vector<RdoSummary>> rows;
  for (const auto& seq : r.sequences) {
    names.push_back(seq.name);
    std::vector<RdoSummary> row;
    for (const auto& rep : seq.per_policy) row.push_back(rep.summary);
    rows.push_back(std::move(row));
  }
  return detail::comparison_csv(r.policies, names, rows, r.average);
}

inline Json to_json(const CompareReport& r) {
  Json policies = Json::array();
  for (RdoPolicy p : r.policies) policies.push_back(to_string(p));
  Json sequences = Json::array();
  for (const auto& seq : r.sequences) {
    Json results = Json::object();
    for (std::size_t p = 0; p < r.policies.size(); ++p) {
      Json entry = summary_json(seq.per_policy[p].summary);
      entry["threshold"] = json_num(seq.per_policy[p].threshold);
      results[to_string(r.policies[p])] = std::move(entry);
    }
    sequences.push_back(
        Json{{"name", seq.name}, {"results", std::move(results)}});
  }
  Json average = Json::object();
  for (std::size_t p = 0; p < r.policies.size(); ++p)
    average[to_string(r.policies[p])] = summary_json(r.average[p]);
  return Json{{"command", "compare"},
              {"policies", std::move(policies)},
              {"sequences", std::move(sequences)},
              {"average", std::move(average)}};
}

}  // namespace vdm
