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

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "vdm/errors.hpp"
#include "vdm/frame.hpp"

namespace vdm {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

// Mean absolute difference on the 8-bit scale.
inline double mad(const DepthFrame& a, const DepthFrame& b) {
  require_same_shape(a, b, "mad");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += std::abs(static_cast<double>(a.pixels[i]) - b.pixels[i]);
  return sum / static_cast<double>(a.size());
}

// Mean squared error on the 8-bit scale.
inline double mse(const DepthFrame& a, const DepthFrame& b) {
  require_same_shape(a, b, "mse");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

// 10*log10(peak^2 / MSE). Identical frames return the infinity sentinel,
// serialized as "inf" in reports.
inline double psnr(const DepthFrame& a, const DepthFrame& b) {
  const double e = mse(a, b);
  if (e == 0.0) return kInfinitePsnr;
  const double peak = a.max_value();
  return 10.0 * std::log10(peak * peak / e);
}

// Divides each value by the maximum finite value so curves plot on a
// shared [0, 1] axis. Infinite entries pass through unchanged; a list
// with no finite entry cannot be normalized.
inline std::vector<double> normalized_psnr(const std::vector<double>& values) {
  if (values.empty())
    throw ValidationError("normalized_psnr of an empty list");
  double max_finite = -kInfinitePsnr;
  for (double v : values)
    if (std::isfinite(v) && v > max_finite) max_finite = v;
  if (!std::isfinite(max_finite))
    throw ValidationError("normalized_psnr: all values are infinite");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = std::isfinite(values[i]) ? values[i] / max_finite : values[i];
  return out;
}

namespace detail {

// 11x11 Gaussian window, sigma 1.5, normalized to sum 1.
inline const std::array<double, 121>& ssim_window() {
  static const std::array<double, 121> window = [] {
    std::array<double, 121> w{};
    double sum = 0.0;
    for (int y = 0; y < 11; ++y)
      for (int x = 0; x < 11; ++x) {
        const double dx = x - 5.0, dy = y - 5.0;
        w[y * 11 + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
        sum += w[y * 11 + x];
      }
    for (double& v : w) v /= sum;
    return w;
  }();
  return window;
}

}  // namespace detail

// Mean local structural similarity over 11x11 Gaussian windows (sigma 1.5,
// K1 = 0.01, K2 = 0.03, peak 255). Stride 1; only fully interior windows
// contribute, so frames must be at least 11x11.
inline double ssim(const DepthFrame& a, const DepthFrame& b) {
  require_same_shape(a, b, "ssim");
  constexpr int kWin = 11;
  if (a.width < kWin || a.height < kWin)
    throw ValidationError("ssim needs frames of at least 11x11, got " +
                          std::to_string(a.width) + "x" +
                          std::to_string(a.height));
  constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
  constexpr double kC2 = (0.03 * 255) * (0.03 * 255);
  const auto& win = detail::ssim_window();

  double total = 0.0;
  std::size_t windows = 0;
  for (int y0 = 0; y0 + kWin <= a.height; ++y0) {
    for (int x0 = 0; x0 + kWin <= a.width; ++x0) {
      double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
      for (int wy = 0; wy < kWin; ++wy) {
        for (int wx = 0; wx < kWin; ++wx) {
          const double w = win[wy * kWin + wx];
          const double va = a.at(x0 + wx, y0 + wy);
          const double vb = b.at(x0 + wx, y0 + wy);
          mu_a += w * va;
          mu_b += w * vb;
          aa += w * (va * va);
          bb += w * (vb * vb);
          ab += w * (va * vb);  // grouped so the pair order cannot matter
        }
      }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      total += ((2.0 * (mu_a * mu_b) + kC1) * (2.0 * cov + kC2)) /
               ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

// All pixel-fidelity metrics of one frame pair.
struct FidelityScores {
  double mad = 0.0;
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

inline FidelityScores fidelity(const DepthFrame& a, const DepthFrame& b) {
  FidelityScores s;
  s.mad = mad(a, b);
  s.mse = mse(a, b);
  const double peak = a.max_value();
  s.psnr_db = s.mse == 0.0 ? kInfinitePsnr
                           : 10.0 * std::log10(peak * peak / s.mse);
  s.ssim = ssim(a, b);
  return s;
}

}  // namespace vdm
