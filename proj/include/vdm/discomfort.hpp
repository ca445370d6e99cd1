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
#include <utility>
#include <vector>

#include "vdm/errors.hpp"
#include "vdm/frame.hpp"
#include "vdm/stats.hpp"

namespace vdm {

// Per-pixel absolute depth error between a ground-truth frame and its
// processed counterpart, on the normalized [0, 1] scale.
using ErrorMap = Plane;

// Per-frame-pair discomfort indexes.
//   so: std of the error map (spatial outliers), bounded by 0.5
//   to: std of the error-map difference across the pair, bounded by 1.0
//   ti: std of the processed-frame difference, bounded by 1.0
struct DiscomfortIndexes {
  double so = 0.0;
  double to = 0.0;
  double ti = 0.0;
};

// Per-sequence content complexity: cube roots of the maximum per-frame
// spatial (Sobel-based) and temporal (frame-difference) information, both
// on the 8-bit intensity scale. Zero for constant video.
struct ContentIndexes {
  double s_inf = 0.0;
  double t_inf = 0.0;
};

// Pooling parameters. The discomfort score is
//   k * (1 - so^a) * (1 - to^b) * (1 - ti)^c
// for the content-adaptive metric and
//   k * (1 - masked_so)^a * (1 - to)^b * (1 - ti)^c
// for its fixed-exponent ancestor. a and b are typically the content
// indexes of the ground-truth sequence; they may legitimately be 0 on
// constant content, where so^a is taken as 0 so a lossless pair still
// scores k. With clamp_indexes (the default) indexes are clamped to
// [0, 1] before pooling so complements never go negative.
struct VdmParams {
  double k = 1.0;
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  bool clamp_indexes = true;

  void validate() const {
    if (k <= 0.0) throw ValidationError("pooling scale k must be positive");
    if (a < 0.0 || b < 0.0)
      throw ValidationError("pooling exponents a, b must be >= 0");
  }
};

// Fixed parameterization of the ancestor metric (maximum score 5.0).
inline VdmParams vqm3_params() {
  return VdmParams{5.0, 8.0, 8.0, 6.0, true};
}

// |normalize(gt) - normalize(processed)|, per pixel.
inline ErrorMap delta_z(const DepthFrame& gt, const DepthFrame& processed) {
  require_same_shape(gt, processed, "delta_z");
  Plane g = normalize(gt);
  const Plane p = normalize(processed);
  for (std::size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = std::abs(g.values[i] - p.values[i]);
  return g;
}

// Spatial outliers: population std of the error map.
inline double spatial_outliers(const ErrorMap& err) {
  if (err.values.empty()) throw ValidationError("empty error map");
  return population_std(err.values);
}

// Temporal outliers: population std of the signed per-pixel difference
// between consecutive error maps. Constant error drift scores 0.
inline double temporal_outliers(const ErrorMap& err_t, const ErrorMap& err_t1) {
  if (!err_t.same_shape(err_t1))
    throw ValidationError("temporal_outliers: dimension mismatch");
  if (err_t.values.empty()) throw ValidationError("empty error map");
  std::vector<double> diff(err_t.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = err_t1.values[i] - err_t.values[i];
  return population_std(diff);
}

// Temporal inconsistency: population std of the signed normalized
// difference of consecutive processed frames.
inline double temporal_inconsistency(const DepthFrame& z_t,
                                     const DepthFrame& z_t1) {
  require_same_shape(z_t, z_t1, "temporal_inconsistency");
  const Plane a = normalize(z_t);
  const Plane b = normalize(z_t1);
  std::vector<double> diff(a.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = b.values[i] - a.values[i];
  return population_std(diff);
}

namespace detail {

// 3x3 Sobel gradient magnitudes over the frame interior (the 1-pixel
// border has no full neighborhood and is excluded).
inline std::vector<double> sobel_interior(const DepthFrame& f) {
  f.validate();
  if (f.width < 3 || f.height < 3)
    throw ValidationError("Sobel needs frames of at least 3x3, got " +
                          std::to_string(f.width) + "x" +
                          std::to_string(f.height));
  std::vector<double> mag;
  mag.reserve(static_cast<std::size_t>(f.width - 2) * (f.height - 2));
  for (int y = 1; y + 1 < f.height; ++y) {
    for (int x = 1; x + 1 < f.width; ++x) {
      const double gx = -f.at(x - 1, y - 1) + f.at(x + 1, y - 1) -
                        2.0 * f.at(x - 1, y) + 2.0 * f.at(x + 1, y) -
                        f.at(x - 1, y + 1) + f.at(x + 1, y + 1);
      const double gy = -f.at(x - 1, y - 1) - 2.0 * f.at(x, y - 1) -
                        f.at(x + 1, y - 1) + f.at(x - 1, y + 1) +
                        2.0 * f.at(x, y + 1) + f.at(x + 1, y + 1);
      mag.push_back(std::sqrt(gx * gx + gy * gy));
    }
  }
  return mag;
}

}  // namespace detail

// Spatial information of one frame: std of the Sobel gradient magnitude
// over interior pixels, 8-bit scale.
inline double spatial_information_frame(const DepthFrame& f) {
  return population_std(detail::sobel_interior(f));
}

// Pre-root spatial information of a sequence: maximum per-frame value.
inline double spatial_information(const DepthSequence& seq) {
  if (seq.frames.empty())
    throw ValidationError("spatial_information needs at least 1 frame");
  double best = 0.0;
  for (const DepthFrame& f : seq.frames)
    best = std::max(best, spatial_information_frame(f));
  return best;
}

// Temporal information of one consecutive pair: std over pixels of the
// signed 8-bit frame difference.
inline double temporal_information_pair(const DepthFrame& prev,
                                        const DepthFrame& cur) {
  require_same_shape(prev, cur, "temporal_information");
  std::vector<double> diff(prev.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = static_cast<double>(cur.pixels[i]) - prev.pixels[i];
  return population_std(diff);
}

// Pre-root temporal information of a sequence: maximum over consecutive
// pairs.
inline double temporal_information(const DepthSequence& seq) {
  if (seq.frames.size() < 2)
    throw ValidationError("temporal_information needs at least 2 frames");
  double best = 0.0;
  for (std::size_t t = 1; t < seq.frames.size(); ++t)
    best = std::max(best,
                    temporal_information_pair(seq.frames[t - 1], seq.frames[t]));
  return best;
}

// Cube roots of the sequence information maxima; the content-adaptive
// pooling exponents.
inline ContentIndexes content_indexes(const DepthSequence& seq) {
  return ContentIndexes{std::cbrt(spatial_information(seq)),
                        std::cbrt(temporal_information(seq))};
}

// Pooling parameters with exponents taken from the ground-truth content.
inline VdmParams vdm_params_for(const DepthSequence& gt, double k = 1.0,
                                double c = 0.0) {
  const ContentIndexes idx = content_indexes(gt);
  return VdmParams{k, idx.s_inf, idx.t_inf, c, true};
}

namespace detail {

// Index power with the convention 0^p = 0 for any p >= 0, so a zero index
// contributes a full complement even when the exponent is 0.
inline double index_pow(double x, double p) {
  return x <= 0.0 ? 0.0 : std::pow(x, p);
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace detail

// Content-adaptive discomfort score for one frame pair:
// k * (1 - so^a) * (1 - to^b) * (1 - ti)^c. Maximum k, reached when the
// pair is error-free. With the default c = 0 the ti factor is exactly 1.
inline double vdm_frame(const DiscomfortIndexes& idx, const VdmParams& p) {
  p.validate();
  double so = idx.so, to = idx.to, ti = idx.ti;
  if (p.clamp_indexes) {
    so = detail::clamp01(so);
    to = detail::clamp01(to);
    ti = detail::clamp01(ti);
  }
  return p.k * (1.0 - detail::index_pow(so, p.a)) *
         (1.0 - detail::index_pow(to, p.b)) * std::pow(1.0 - ti, p.c);
}

// Ancestor fixed-exponent score: k * (1 - masked_so)^a * (1 - to)^b *
// (1 - ti)^c, with masked_so produced by so_to_mask.
inline double vqm3_frame(const DiscomfortIndexes& idx, double masked_so,
                         const VdmParams& p) {
  p.validate();
  double to = idx.to, ti = idx.ti, so = masked_so;
  if (p.clamp_indexes) {
    so = detail::clamp01(so);
    to = detail::clamp01(to);
    ti = detail::clamp01(ti);
  }
  return p.k * std::pow(1.0 - so, p.a) * std::pow(1.0 - to, p.b) *
         std::pow(1.0 - ti, p.c);
}

// Spatial-outlier std restricted to pixels that are outliers both
// spatially and temporally. A pixel is a spatial outlier when its error
// exceeds mean + sigma_factor * std of the error map, and a temporal
// outlier when its absolute error change exceeds the same cut on the
// absolute change map. An empty intersection scores 0.
inline double so_to_mask(const ErrorMap& err_t, const ErrorMap& err_t1,
                         double sigma_factor = 1.0) {
  if (!err_t.same_shape(err_t1))
    throw ValidationError("so_to_mask: dimension mismatch");
  if (err_t.values.empty()) throw ValidationError("empty error map");
  if (sigma_factor < 0.0)
    throw ValidationError("sigma_factor must be >= 0");

  const std::size_t n = err_t1.values.size();
  std::vector<double> change(n);
  for (std::size_t i = 0; i < n; ++i)
    change[i] = std::abs(err_t1.values[i] - err_t.values[i]);

  const double spatial_cut =
      mean(err_t1.values) + sigma_factor * population_std(err_t1.values);
  const double temporal_cut =
      mean(change) + sigma_factor * population_std(change);

  std::vector<double> selected;
  for (std::size_t i = 0; i < n; ++i)
    if (err_t1.values[i] > spatial_cut && change[i] > temporal_cut)
      selected.push_back(err_t1.values[i]);
  return selected.empty() ? 0.0 : population_std(selected);
}

// Indexes of one consecutive pair: spatial outliers of the later error
// map, temporal outliers across the pair, temporal inconsistency of the
// processed frames. The score is attributed to the later frame.
inline DiscomfortIndexes pair_indexes(const ErrorMap& err_t,
                                      const ErrorMap& err_t1,
                                      const DepthFrame& proc_t,
                                      const DepthFrame& proc_t1) {
  DiscomfortIndexes idx;
  idx.so = spatial_outliers(err_t1);
  idx.to = temporal_outliers(err_t, err_t1);
  idx.ti = temporal_inconsistency(proc_t, proc_t1);
  return idx;
}

struct FrameScore {
  int frame = 0;  // index of the later frame of the pair
  DiscomfortIndexes indexes;
  double masked_so = 0.0;
  double vdm = 0.0;
  double vqm3 = 0.0;
};

struct SequenceScore {
  std::vector<FrameScore> frames;  // one entry per consecutive pair
  double mean_vdm = 0.0;
  double mean_vqm3 = 0.0;
};

// Scores every consecutive pair of a processed sequence against ground
// truth and averages. Produces frame_count - 1 scores, attributed to
// frames 1..frame_count-1.
inline SequenceScore score_sequence(const DepthSequence& gt,
                                    const DepthSequence& proc,
                                    const VdmParams& params,
                                    const VdmParams& ancestor = vqm3_params()) {
  require_same_shape(gt, proc, "score_sequence");
  if (gt.frames.size() < 2)
    throw ValidationError("score_sequence needs at least 2 frames");
  params.validate();
  ancestor.validate();

  SequenceScore score;
  score.frames.reserve(gt.frames.size() - 1);
  double vdm_sum = 0.0, vqm3_sum = 0.0;
  ErrorMap prev = delta_z(gt.frames[0], proc.frames[0]);
  for (std::size_t t = 1; t < gt.frames.size(); ++t) {
    ErrorMap cur = delta_z(gt.frames[t], proc.frames[t]);
    FrameScore fs;
    fs.frame = static_cast<int>(t);
    fs.indexes = pair_indexes(prev, cur, proc.frames[t - 1], proc.frames[t]);
    fs.masked_so = so_to_mask(prev, cur);
    fs.vdm = vdm_frame(fs.indexes, params);
    fs.vqm3 = vqm3_frame(fs.indexes, fs.masked_so, ancestor);
    vdm_sum += fs.vdm;
    vqm3_sum += fs.vqm3;
    score.frames.push_back(fs);
    prev = std::move(cur);
  }
  const double pairs = static_cast<double>(score.frames.size());
  score.mean_vdm = vdm_sum / pairs;
  score.mean_vqm3 = vqm3_sum / pairs;
  return score;
}

}  // namespace vdm
