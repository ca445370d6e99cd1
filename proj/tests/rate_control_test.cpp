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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support/synthetic.hpp"
#include "vdm/codec.hpp"
#include "vdm/rate_control.hpp"

using vdm::CalibrationTable;
using vdm::DepthSequence;
using vdm::QuantParam;
using vdm::RdoConfig;
using vdm::RdoPolicy;
using vdm::RdoRun;
using vdm::ThresholdRule;
using vdm::ToyCodec;
using vdm::VdmParams;

namespace {

RdoConfig config(RdoPolicy policy, std::optional<double> threshold = {}) {
  RdoConfig cfg;
  cfg.policy = policy;
  cfg.threshold = threshold;
  return cfg;
}

void expect_bounded_trace(const vdm::RdoTrace& trace, const RdoConfig& cfg) {
  int prev_qp = trace.rows.front().qp;
  for (const auto& row : trace.rows) {
    EXPECT_GE(row.qp, cfg.qp_min);
    EXPECT_LE(row.qp, cfg.qp_max);
    EXPECT_LE(std::abs(row.qp - prev_qp), cfg.step);
    prev_qp = row.qp;
  }
}

}  // namespace

TEST(Calibrate, ConstantVideoFillsTableWithK) {
  const DepthSequence gt = vdmtest::constant_sequence(16, 16, 4, 128);
  // Constant content has zero information indexes, so the exponents
  // derived from it are zero as well.
  const CalibrationTable table =
      vdm::calibrate(gt, ToyCodec{}, VdmParams{1.0, 0.0, 0.0, 0.0, true});
  ASSERT_EQ(table.mean_vdm.size(), 20u);
  for (double v : table.mean_vdm) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Calibrate, CoversExactlyQp30To49) {
  const DepthSequence gt = vdmtest::moving_gradient_texture(32, 32, 3);
  const CalibrationTable table =
      vdm::calibrate(gt, ToyCodec{}, vdm::vdm_params_for(gt));
  EXPECT_EQ(table.mean_vdm.size(),
            static_cast<std::size_t>(CalibrationTable::kEntries));
  EXPECT_NO_THROW(table.at(30));
  EXPECT_NO_THROW(table.at(49));
  EXPECT_THROW(table.at(29), vdm::ValidationError);
  EXPECT_THROW(table.at(50), vdm::ValidationError);
}

TEST(Calibrate, MonotoneNonIncreasingOnSceneContent) {
  const DepthSequence gt = vdmtest::depth_scene(48, 48, 6, 1);
  const CalibrationTable table =
      vdm::calibrate(gt, ToyCodec{}, vdm::vdm_params_for(gt));
  for (std::size_t i = 1; i < table.mean_vdm.size(); ++i)
    EXPECT_LE(table.mean_vdm[i], table.mean_vdm[i - 1] + 1e-12)
        << "qp " << (30 + i);
  for (double v : table.mean_vdm) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);  // entries live in [0, k]
  }
}

TEST(SelectThreshold, MeanEntryAndPercentileRules) {
  CalibrationTable table;
  for (int i = 0; i < 20; ++i) table.mean_vdm.push_back(1.0 - 0.02 * i);
  EXPECT_NEAR(vdm::select_threshold(table), 0.81, 1e-12);
  EXPECT_NEAR(vdm::select_threshold(table, ThresholdRule::parse("qp40")),
              0.80, 1e-12);
  // Nearest-rank p50 of 20 sorted entries is the 10th smallest.
  EXPECT_NEAR(vdm::select_threshold(table, ThresholdRule::parse("p50")),
              0.62 + 0.02 * 9, 1e-12);
  CalibrationTable all_one;
  all_one.mean_vdm.assign(20, 1.0);
  EXPECT_DOUBLE_EQ(vdm::select_threshold(all_one), 1.0);
}

TEST(SelectThreshold, MalformedRulesAndTablesRejected) {
  EXPECT_THROW(ThresholdRule::parse("median"), vdm::ValidationError);
  EXPECT_THROW(ThresholdRule::parse("p200"), vdm::ValidationError);
  CalibrationTable short_table;
  short_table.mean_vdm.assign(3, 1.0);
  EXPECT_THROW(vdm::select_threshold(short_table), vdm::ValidationError);
}

TEST(RunPolicy, WrdoHoldsTheInitialQp) {
  const DepthSequence gt = vdmtest::moving_gradient_texture(32, 32, 6);
  const RdoRun run = vdm::run_policy(gt, ToyCodec{},
                                     config(RdoPolicy::WRDO),
                                     vdm::vdm_params_for(gt));
  ASSERT_EQ(run.trace.rows.size(), 6u);
  for (const auto& row : run.trace.rows) EXPECT_EQ(row.qp, 40);
}

TEST(RunPolicy, ZeroThresholdRampsToQpMaxByFrameTen) {
  const DepthSequence gt = vdmtest::constant_sequence(16, 16, 14, 128);
  const RdoConfig cfg = config(RdoPolicy::VDM_RDO, 0.0);
  const RdoRun run = vdm::run_policy(gt, ToyCodec{}, cfg,
                                     VdmParams{1.0, 0.0, 0.0, 0.0, true});
  for (std::size_t t = 0; t < run.trace.rows.size(); ++t) {
    const int expected = std::min(40 + static_cast<int>(t), 50);
    EXPECT_EQ(run.trace.rows[t].qp, expected) << "frame " << t;
  }
  EXPECT_EQ(run.trace.rows[10].qp, 50);
  expect_bounded_trace(run.trace, cfg);
}

TEST(RunPolicy, UnreachableThresholdRampsToQpMinByFrameTen) {
  const DepthSequence gt = vdmtest::constant_sequence(16, 16, 14, 128);
  const RdoConfig cfg = config(RdoPolicy::VDM_RDO, 1.5);
  const RdoRun run = vdm::run_policy(gt, ToyCodec{}, cfg,
                                     VdmParams{1.0, 0.0, 0.0, 0.0, true});
  for (std::size_t t = 0; t < run.trace.rows.size(); ++t) {
    const int expected = std::max(40 - static_cast<int>(t), 30);
    EXPECT_EQ(run.trace.rows[t].qp, expected) << "frame " << t;
  }
  EXPECT_EQ(run.trace.rows[10].qp, 30);
  expect_bounded_trace(run.trace, cfg);
}

TEST(RunPolicy, VdmRdoWithoutThresholdRejected) {
  const DepthSequence gt = vdmtest::constant_sequence(16, 16, 3, 0);
  EXPECT_THROW(vdm::run_policy(gt, ToyCodec{}, config(RdoPolicy::VDM_RDO),
                               VdmParams{1.0, 0.0, 0.0, 0.0, true}),
               vdm::ValidationError);
}

TEST(RunPolicy, SrdoSelfCalibratesAndStaysBounded) {
  const DepthSequence gt = vdmtest::moving_gradient_texture(32, 32, 12);
  const RdoConfig cfg = config(RdoPolicy::SRDO);
  const RdoRun run =
      vdm::run_policy(gt, ToyCodec{}, cfg, vdm::vdm_params_for(gt));
  expect_bounded_trace(run.trace, cfg);
  EXPECT_GT(run.threshold_used, 0.0);
  // The loop reacts: at least one move away from the initial QP.
  bool moved = false;
  for (const auto& row : run.trace.rows) moved |= row.qp != 40;
  EXPECT_TRUE(moved);
}

TEST(RunPolicy, DeterministicTraces) {
  const DepthSequence gt = vdmtest::depth_scene(32, 32, 8, 1);
  const VdmParams params = vdm::vdm_params_for(gt);
  const RdoConfig cfg = config(RdoPolicy::VDM_RDO, 0.9);
  const RdoRun a = vdm::run_policy(gt, ToyCodec{}, cfg, params);
  const RdoRun b = vdm::run_policy(gt, ToyCodec{}, cfg, params);
  ASSERT_EQ(a.trace.rows.size(), b.trace.rows.size());
  for (std::size_t t = 0; t < a.trace.rows.size(); ++t) {
    EXPECT_EQ(a.trace.rows[t].qp, b.trace.rows[t].qp);
    EXPECT_DOUBLE_EQ(a.trace.rows[t].metric, b.trace.rows[t].metric);
    EXPECT_DOUBLE_EQ(a.trace.rows[t].bits, b.trace.rows[t].bits);
  }
}

TEST(RunPolicy, RaisingTheFloorLowersTheMeanQp) {
  const DepthSequence gt = vdmtest::depth_scene(48, 48, 12, 2);
  const VdmParams params = vdm::vdm_params_for(gt);
  double prev_mean_qp = 1e9;
  for (double threshold : {0.2, 0.9, 1.4}) {
    const RdoRun run = vdm::run_policy(
        gt, ToyCodec{}, config(RdoPolicy::VDM_RDO, threshold), params);
    double mean_qp = 0.0;
    for (const auto& row : run.trace.rows) mean_qp += row.qp;
    mean_qp /= static_cast<double>(run.trace.rows.size());
    EXPECT_LE(mean_qp, prev_mean_qp) << "threshold " << threshold;
    prev_mean_qp = mean_qp;
  }
}

TEST(RunPolicy, ConfigValidation) {
  RdoConfig cfg;
  cfg.initial_qp = QuantParam(20);  // below qp_min 30
  EXPECT_THROW(cfg.validate(), vdm::ValidationError);
  cfg = RdoConfig{};
  cfg.step = 0;
  EXPECT_THROW(cfg.validate(), vdm::ValidationError);
  cfg = RdoConfig{};
  cfg.qp_min = 45;
  cfg.qp_max = 40;
  EXPECT_THROW(cfg.validate(), vdm::ValidationError);
}

TEST(Summarize, WrdoSummaryEqualsDirectConstantEncode) {
  const DepthSequence gt = vdmtest::moving_gradient_texture(32, 32, 5);
  const VdmParams params = vdm::vdm_params_for(gt);
  const RdoRun run = vdm::run_policy(gt, ToyCodec{},
                                     config(RdoPolicy::WRDO), params);
  const vdm::RdoSummary from_run =
      vdm::summarize(run.trace, gt, run.processed, gt.meta.fps, params);

  const auto [recon, report] = vdm::encode_sequence(gt, QuantParam(40));
  const vdm::RdoSummary direct = vdm::summarize_pair(
      gt, recon, report.total_bits, gt.meta.fps, params);
  EXPECT_EQ(from_run.kbits_per_sec, direct.kbits_per_sec);
  EXPECT_EQ(from_run.mean_psnr_db, direct.mean_psnr_db);
  EXPECT_EQ(from_run.mean_ssim, direct.mean_ssim);
  EXPECT_EQ(from_run.mean_vdm, direct.mean_vdm);
}

TEST(Summarize, RateIdentityAndIncrementalRecomputation) {
  const DepthSequence gt = vdmtest::depth_scene(32, 32, 6, 1);
  const VdmParams params = vdm::vdm_params_for(gt);
  const RdoRun run = vdm::run_policy(gt, ToyCodec{},
                                     config(RdoPolicy::VDM_RDO, 0.8), params);
  const vdm::RdoSummary s =
      vdm::summarize(run.trace, gt, run.processed, gt.meta.fps, params);

  double bits = 0.0;
  for (const auto& row : run.trace.rows) bits += row.bits;
  EXPECT_NEAR(s.kbits_per_sec, bits * 30.0 / 6.0 / 1000.0, 1e-9);

  double psnr_sum = 0.0, ssim_sum = 0.0;
  int finite = 0;
  for (std::size_t t = 0; t < gt.frames.size(); ++t) {
    const double p = vdm::psnr(gt.frames[t], run.processed.frames[t]);
    if (std::isfinite(p)) {
      psnr_sum += p;
      ++finite;
    }
    ssim_sum += vdm::ssim(gt.frames[t], run.processed.frames[t]);
  }
  EXPECT_NEAR(s.mean_psnr_db, psnr_sum / finite, 1e-9);
  EXPECT_NEAR(s.mean_ssim, ssim_sum / 6.0, 1e-9);
  EXPECT_NEAR(s.mean_vdm,
              vdm::score_sequence(gt, run.processed, params).mean_vdm, 1e-9);
}

TEST(Summarize, LosslessRunReportsInfiniteCount) {
  const DepthSequence gt = vdmtest::constant_sequence(16, 16, 4, 128);
  const VdmParams params{1.0, 0.0, 0.0, 0.0, true};
  const RdoRun run = vdm::run_policy(gt, ToyCodec{},
                                     config(RdoPolicy::WRDO), params);
  const vdm::RdoSummary s =
      vdm::summarize(run.trace, gt, run.processed, gt.meta.fps, params);
  EXPECT_EQ(s.infinite_psnr_frames, 4);
  EXPECT_TRUE(std::isinf(s.mean_psnr_db));
  EXPECT_DOUBLE_EQ(s.mean_ssim, 1.0);
  EXPECT_DOUBLE_EQ(s.mean_vdm, 1.0);
}

TEST(Summarize, TraceLengthMismatchRejected) {
  const DepthSequence gt = vdmtest::constant_sequence(16, 16, 3, 1);
  vdm::RdoTrace trace;
  trace.rows.resize(2);
  EXPECT_THROW(
      vdm::summarize(trace, gt, gt, 30.0, VdmParams{1, 0, 0, 0, true}),
      vdm::ValidationError);
}

TEST(RateReport, TableScaleExample) {
  // 200 frames totaling 551280 bits at 30 fps.
  const vdm::RateReport r = vdm::RateReport::of(551280.0, 200, 30.0);
  EXPECT_NEAR(r.kbits_per_sec, 82.692, 1e-9);
}
