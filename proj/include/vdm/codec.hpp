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
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "vdm/errors.hpp"
#include "vdm/frame.hpp"

namespace vdm {

// Quantization parameter on the usual [0, 51] scale. Rate control further
// restricts itself to [30, 50].
struct QuantParam {
  int qp = 0;

  QuantParam() = default;
  explicit QuantParam(int value) : qp(value) {
    if (qp < 0 || qp > 51)
      throw ValidationError("QP must be in [0, 51], got " +
                            std::to_string(qp));
  }

  friend bool operator==(QuantParam, QuantParam) = default;
};

// Quantizer step size; doubles every 6 QP units, 1.0 at QP 4.
inline double qstep(QuantParam qp) {
  return std::exp2((qp.qp - 4) / 6.0);
}

struct EncodedFrame {
  DepthFrame reconstruction;
  double estimated_bits = 0.0;
  QuantParam qp_used;
};

// Sequence-level bit accounting. kbits_per_sec = total_bits * fps /
// frame_count / 1000.
struct RateReport {
  double total_bits = 0.0;
  int frame_count = 0;
  double fps = 0.0;
  double kbits_per_sec = 0.0;

  static RateReport of(double total_bits, int frame_count, double fps) {
    RateReport r;
    r.total_bits = total_bits;
    r.frame_count = frame_count;
    r.fps = fps;
    r.kbits_per_sec = total_bits * fps / frame_count / 1000.0;
    return r;
  }
};

namespace detail {

inline constexpr int kBlock = 8;
inline constexpr double kHeaderBits = 32.0;  // per-frame overhead
inline constexpr double kLevelShift = 128.0;

// Orthonormal type-II DCT basis: basis[u][x] = c(u) cos((2x+1)u pi / 16).
inline const std::array<std::array<double, kBlock>, kBlock>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, kBlock>, kBlock> m{};
    const double pi = std::acos(-1.0);
    for (int u = 0; u < kBlock; ++u) {
      const double c = u == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
      for (int x = 0; x < kBlock; ++x)
        m[u][x] = c * std::cos((2 * x + 1) * u * pi / (2.0 * kBlock));
    }
    return m;
  }();
  return basis;
}

// coeff = B * block * B^T
inline void forward_dct(const double block[kBlock * kBlock],
                        double coeff[kBlock * kBlock]) {
  const auto& b = dct_basis();
  double tmp[kBlock * kBlock];
  for (int y = 0; y < kBlock; ++y)
    for (int u = 0; u < kBlock; ++u) {
      double s = 0.0;
      for (int x = 0; x < kBlock; ++x) s += block[y * kBlock + x] * b[u][x];
      tmp[y * kBlock + u] = s;
    }
  for (int u = 0; u < kBlock; ++u)
    for (int v = 0; v < kBlock; ++v) {
      double s = 0.0;
      for (int y = 0; y < kBlock; ++y) s += b[v][y] * tmp[y * kBlock + u];
      coeff[v * kBlock + u] = s;
    }
}

// block = B^T * coeff * B
inline void inverse_dct(const double coeff[kBlock * kBlock],
                        double block[kBlock * kBlock]) {
  const auto& b = dct_basis();
  double tmp[kBlock * kBlock];
  for (int v = 0; v < kBlock; ++v)
    for (int x = 0; x < kBlock; ++x) {
      double s = 0.0;
      for (int u = 0; u < kBlock; ++u) s += coeff[v * kBlock + u] * b[u][x];
      tmp[v * kBlock + x] = s;
    }
  for (int x = 0; x < kBlock; ++x)
    for (int y = 0; y < kBlock; ++y) {
      double s = 0.0;
      for (int v = 0; v < kBlock; ++v) s += b[v][y] * tmp[v * kBlock + x];
      block[y * kBlock + x] = s;
    }
}

// Round half away from zero.
inline long long quantize_level(double coeff, double step) {
  return std::llround(coeff / step);
}

}  // namespace detail

// Intra-only block-transform encode of one frame. Per 8x8 block: level
// shift by -128, orthonormal 2-D DCT, uniform quantization at qstep(qp)
// with ties away from zero, dequantize, inverse DCT, round and clamp to
// [0, 255]. Frames whose dimensions are not multiples of 8 are padded by
// edge replication and cropped on output.
//
// estimated_bits is the zero-order entropy of the frame's quantized-level
// stream (symbol probabilities pooled over the whole frame) plus a 32-bit
// header; a constant frame therefore costs exactly the header. The
// estimate is deterministic and monotone in QP, standing in for a real
// entropy coder.
inline EncodedFrame encode_frame(const DepthFrame& src, QuantParam qp) {
  src.validate();
  const double step = qstep(qp);
  const int wp = (src.width + detail::kBlock - 1) / detail::kBlock *
                 detail::kBlock;
  const int hp = (src.height + detail::kBlock - 1) / detail::kBlock *
                 detail::kBlock;

  // Padded, level-shifted copy (edge replication).
  std::vector<double> padded(static_cast<std::size_t>(wp) * hp);
  for (int y = 0; y < hp; ++y) {
    const int sy = std::min(y, src.height - 1);
    for (int x = 0; x < wp; ++x) {
      const int sx = std::min(x, src.width - 1);
      padded[static_cast<std::size_t>(y) * wp + x] =
          static_cast<double>(src.at(sx, sy)) - detail::kLevelShift;
    }
  }

  std::vector<double> recon(padded.size());
  std::map<long long, long long> level_counts;
  double block[detail::kBlock * detail::kBlock];
  double coeff[detail::kBlock * detail::kBlock];
  for (int by = 0; by < hp; by += detail::kBlock) {
    for (int bx = 0; bx < wp; bx += detail::kBlock) {
      for (int y = 0; y < detail::kBlock; ++y)
        for (int x = 0; x < detail::kBlock; ++x)
          block[y * detail::kBlock + x] =
              padded[static_cast<std::size_t>(by + y) * wp + bx + x];
      detail::forward_dct(block, coeff);
      for (double& c : coeff) {
        const long long level = detail::quantize_level(c, step);
        ++level_counts[level];
        c = static_cast<double>(level) * step;
      }
      detail::inverse_dct(coeff, block);
      for (int y = 0; y < detail::kBlock; ++y)
        for (int x = 0; x < detail::kBlock; ++x)
          recon[static_cast<std::size_t>(by + y) * wp + bx + x] =
              block[y * detail::kBlock + x];
    }
  }

  EncodedFrame out;
  out.qp_used = qp;
  out.reconstruction.width = src.width;
  out.reconstruction.height = src.height;
  out.reconstruction.bit_depth = src.bit_depth;
  out.reconstruction.pixels.resize(src.size());
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const double v =
          recon[static_cast<std::size_t>(y) * wp + x] + detail::kLevelShift;
      out.reconstruction.at(x, y) = static_cast<std::uint8_t>(
          std::clamp<long long>(std::llround(v), 0, 255));
    }

  const double total = static_cast<double>(wp) * hp;
  double entropy = 0.0;
  for (const auto& [level, count] : level_counts) {
    const double p = static_cast<double>(count) / total;
    entropy -= p * std::log2(p);
  }
  out.estimated_bits = total * entropy + detail::kHeaderBits;
  return out;
}

// Encodes every frame independently under its scheduled QP.
inline std::pair<DepthSequence, RateReport> encode_sequence(
    const DepthSequence& seq, const std::vector<QuantParam>& qp_schedule) {
  seq.validate();
  if (qp_schedule.size() != seq.frames.size())
    throw ValidationError("QP schedule length " +
                          std::to_string(qp_schedule.size()) +
                          " does not match frame count " +
                          std::to_string(seq.frames.size()));
  DepthSequence recon;
  recon.meta = seq.meta;
  recon.frames.reserve(seq.frames.size());
  double total_bits = 0.0;
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    EncodedFrame enc = encode_frame(seq.frames[t], qp_schedule[t]);
    total_bits += enc.estimated_bits;
    recon.frames.push_back(std::move(enc.reconstruction));
  }
  return {std::move(recon),
          RateReport::of(total_bits, static_cast<int>(seq.frames.size()),
                         seq.meta.fps)};
}

inline std::pair<DepthSequence, RateReport> encode_sequence(
    const DepthSequence& seq, QuantParam constant_qp) {
  return encode_sequence(
      seq, std::vector<QuantParam>(seq.frames.size(), constant_qp));
}

// Contract consumed by rate control: (frame index, frame, qp) -> encode.
// The index lets lookup-based backends serve pre-encoded material.
template <typename T>
concept CodecBackend =
    requires(const T& codec, std::size_t t, const DepthFrame& f,
             QuantParam qp) {
      { codec.encode(t, f, qp) } -> std::same_as<EncodedFrame>;
    };

// The built-in transform codec as a rate-control backend.
struct ToyCodec {
  EncodedFrame encode(std::size_t /*frame_index*/, const DepthFrame& src,
                      QuantParam qp) const {
    return encode_frame(src, qp);
  }
};

static_assert(CodecBackend<ToyCodec>);

}  // namespace vdm
