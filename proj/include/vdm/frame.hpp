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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vdm/errors.hpp"

namespace vdm {

// Geometry and timing shared by every frame of a sequence.
//
// The full codec + rate-control pipeline assumes width/height >= 8 (block
// size) and frame_count >= 2 (temporal metrics need consecutive frames).
// Loaders accept smaller inputs for metric-only use; the operations that
// actually need those minimums enforce them.
struct SequenceMeta {
  int width = 0;
  int height = 0;
  int frame_count = 0;  // 0 on raw input means "all frames in the file"
  double fps = 30.0;
  int bit_depth = 8;  // only 8 supported

  int pixels_per_frame() const { return width * height; }
  int max_value() const { return (1 << bit_depth) - 1; }

  void validate() const {
    if (width <= 0 || height <= 0)
      throw ValidationError("frame dimensions must be positive, got " +
                            std::to_string(width) + "x" +
                            std::to_string(height));
    if (fps <= 0.0) throw ValidationError("fps must be positive");
    if (bit_depth != 8)
      throw ValidationError("only 8-bit depth maps are supported, got " +
                            std::to_string(bit_depth) + "-bit");
    if (frame_count < 0) throw ValidationError("frame_count must be >= 0");
  }
};

// One grayscale depth plane, row-major, one byte per pixel.
struct DepthFrame {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint8_t> pixels;

  static DepthFrame solid(int width, int height, std::uint8_t value) {
    DepthFrame f;
    f.width = width;
    f.height = height;
    f.pixels.assign(static_cast<std::size_t>(width) * height, value);
    return f;
  }

  std::size_t size() const { return pixels.size(); }

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }

  int max_value() const { return (1 << bit_depth) - 1; }

  bool same_shape(const DepthFrame& other) const {
    return width == other.width && height == other.height &&
           bit_depth == other.bit_depth;
  }

  void validate() const {
    if (width <= 0 || height <= 0)
      throw ValidationError("frame dimensions must be positive");
    if (bit_depth != 8)
      throw ValidationError("only 8-bit depth maps are supported");
    if (pixels.size() != static_cast<std::size_t>(width) * height)
      throw ValidationError(
          "pixel count " + std::to_string(pixels.size()) +
          " does not match dimensions " + std::to_string(width) + "x" +
          std::to_string(height));
  }
};

inline void require_same_shape(const DepthFrame& a, const DepthFrame& b,
                               const char* what) {
  if (!a.same_shape(b))
    throw ValidationError(std::string(what) + ": dimension mismatch, " +
                          std::to_string(a.width) + "x" +
                          std::to_string(a.height) + " vs " +
                          std::to_string(b.width) + "x" +
                          std::to_string(b.height));
}

// Real-valued plane with frame dimensions. Holds normalized intensities,
// error maps and other per-pixel intermediates.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }

  bool same_shape(const Plane& other) const {
    return width == other.width && height == other.height;
  }
};

// Maps pixels onto [0, 1]: value / (2^bit_depth - 1). Monotone, 0 -> 0.0
// and the maximum code -> 1.0.
inline Plane normalize(const DepthFrame& frame) {
  frame.validate();
  Plane p;
  p.width = frame.width;
  p.height = frame.height;
  p.values.resize(frame.size());
  const double scale = 1.0 / frame.max_value();
  for (std::size_t i = 0; i < frame.size(); ++i)
    p.values[i] = frame.pixels[i] * scale;
  return p;
}

// An ordered run of frames with shared geometry.
struct DepthSequence {
  SequenceMeta meta;
  std::vector<DepthFrame> frames;

  std::size_t frame_count() const { return frames.size(); }

  void validate() const {
    meta.validate();
    if (frames.size() != static_cast<std::size_t>(meta.frame_count))
      throw ValidationError("sequence holds " +
                            std::to_string(frames.size()) +
                            " frames but meta declares " +
                            std::to_string(meta.frame_count));
    for (const DepthFrame& f : frames) {
      f.validate();
      if (f.width != meta.width || f.height != meta.height ||
          f.bit_depth != meta.bit_depth)
        throw ValidationError("sequence frames must share dimensions");
    }
  }
};

inline void require_same_shape(const DepthSequence& a, const DepthSequence& b,
                               const char* what) {
  if (a.frames.size() != b.frames.size())
    throw ValidationError(std::string(what) + ": frame count mismatch, " +
                          std::to_string(a.frames.size()) + " vs " +
                          std::to_string(b.frames.size()));
  for (std::size_t t = 0; t < a.frames.size(); ++t)
    require_same_shape(a.frames[t], b.frames[t], what);
}

}  // namespace vdm
