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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"
#include "vdm/codec.hpp"
#include "vdm/fidelity.hpp"
#include "vdm/io.hpp"
#include "vdm/precoded.hpp"

using vdm::DepthFrame;
using vdm::DepthSequence;
using vdm::EncodedFrame;
using vdm::QuantParam;

TEST(Qstep, AnchorsOfTheExponentialScale) {
  EXPECT_DOUBLE_EQ(vdm::qstep(QuantParam(4)), 1.0);
  EXPECT_DOUBLE_EQ(vdm::qstep(QuantParam(10)), 2.0);
  EXPECT_DOUBLE_EQ(vdm::qstep(QuantParam(40)), 64.0);
  EXPECT_THROW(QuantParam(52), vdm::ValidationError);
  EXPECT_THROW(QuantParam(-1), vdm::ValidationError);
}

TEST(Dct, ForwardInverseRoundTrip) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-128.0, 127.0);
  for (int trial = 0; trial < 20; ++trial) {
    double block[64], coeff[64], back[64];
    for (double& v : block) v = dist(rng);
    vdm::detail::forward_dct(block, coeff);
    vdm::detail::inverse_dct(coeff, back);
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(back[i], block[i], 1e-9);
  }
}

TEST(Dct, ParsevalEnergyConservation) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-128.0, 127.0);
  for (int trial = 0; trial < 20; ++trial) {
    double block[64], coeff[64];
    double pixel_energy = 0.0, coeff_energy = 0.0;
    for (double& v : block) {
      v = dist(rng);
      pixel_energy += v * v;
    }
    vdm::detail::forward_dct(block, coeff);
    for (double v : coeff) coeff_energy += v * v;
    EXPECT_NEAR(coeff_energy, pixel_energy, 1e-6 * pixel_energy);
  }
}

TEST(EncodeFrame, ConstantFrameIsExactAtEveryQp) {
  const DepthFrame src = vdmtest::constant_frame(16, 16, 128);
  for (int qp : {0, 10, 30, 40, 49, 51}) {
    const EncodedFrame enc = vdm::encode_frame(src, QuantParam(qp));
    EXPECT_EQ(enc.reconstruction.pixels, src.pixels) << "qp " << qp;
    // A single pooled symbol has zero entropy: only the header remains.
    EXPECT_DOUBLE_EQ(enc.estimated_bits, 32.0);
  }
}

TEST(EncodeFrame, NearLosslessAtQpZero) {
  const DepthFrame src = vdmtest::random_frame(64, 64, 23);
  const EncodedFrame enc = vdm::encode_frame(src, QuantParam(0));
  EXPECT_GE(vdm::psnr(src, enc.reconstruction), 50.0);
}

TEST(EncodeFrame, BitsFallAndDistortionRisesWithQp) {
  const DepthFrame src = vdmtest::random_frame(64, 64, 29);
  double prev_bits = 1e18;
  double prev_mse = -1.0;
  for (int qp : {30, 35, 40, 45, 49}) {
    const EncodedFrame enc = vdm::encode_frame(src, QuantParam(qp));
    EXPECT_LT(enc.estimated_bits, prev_bits) << "qp " << qp;
    EXPECT_GT(vdm::mse(src, enc.reconstruction), prev_mse) << "qp " << qp;
    prev_bits = enc.estimated_bits;
    prev_mse = vdm::mse(src, enc.reconstruction);
  }
}

TEST(EncodeFrame, BitMonotonicityOverFullGrid) {
  // Weak monotonicity for arbitrary content, strict for a random frame
  // whose coefficient spectrum is dense.
  const DepthFrame textured = vdmtest::moving_gradient_texture(32, 32, 1)
                                  .frames[0];
  double prev = 1e18;
  for (int qp = 30; qp <= 49; ++qp) {
    const double bits =
        vdm::encode_frame(textured, QuantParam(qp)).estimated_bits;
    EXPECT_LE(bits, prev + 1e-9) << "qp " << qp;
    prev = bits;
  }
  const DepthFrame noise = vdmtest::random_frame(64, 64, 29);
  prev = 1e18;
  for (int qp = 30; qp <= 49; ++qp) {
    const double bits = vdm::encode_frame(noise, QuantParam(qp)).estimated_bits;
    EXPECT_LT(bits, prev) << "qp " << qp;
    prev = bits;
  }
}

TEST(EncodeFrame, DeterministicAcrossCalls) {
  const DepthFrame src = vdmtest::random_frame(40, 24, 31);
  const EncodedFrame a = vdm::encode_frame(src, QuantParam(37));
  const EncodedFrame b = vdm::encode_frame(src, QuantParam(37));
  EXPECT_EQ(a.reconstruction.pixels, b.reconstruction.pixels);
  EXPECT_DOUBLE_EQ(a.estimated_bits, b.estimated_bits);
}

TEST(EncodeFrame, PadsNonMultipleOfEightAndCropsBack) {
  const DepthFrame src = vdmtest::random_frame(13, 9, 37);
  const EncodedFrame enc = vdm::encode_frame(src, QuantParam(30));
  EXPECT_EQ(enc.reconstruction.width, 13);
  EXPECT_EQ(enc.reconstruction.height, 9);
  EXPECT_GE(enc.estimated_bits, 32.0);
}

TEST(EncodeFrame, EmptyFrameRejected) {
  DepthFrame empty;
  EXPECT_THROW(vdm::encode_frame(empty, QuantParam(30)),
               vdm::ValidationError);
}

TEST(EncodeSequence, ConstantVideoMatchesRateIdentity) {
  const DepthSequence seq = vdmtest::constant_sequence(16, 16, 2, 128);
  const auto [recon, report] =
      vdm::encode_sequence(seq, QuantParam(30));
  for (std::size_t t = 0; t < 2; ++t)
    EXPECT_EQ(recon.frames[t].pixels, seq.frames[t].pixels);
  EXPECT_DOUBLE_EQ(report.total_bits, 64.0);
  EXPECT_DOUBLE_EQ(report.kbits_per_sec,
                   report.total_bits * 30.0 / 2.0 / 1000.0);
}

TEST(EncodeSequence, ScheduleLengthMustMatch) {
  const DepthSequence seq = vdmtest::constant_sequence(16, 16, 3, 0);
  EXPECT_THROW(
      vdm::encode_sequence(seq, std::vector<QuantParam>(2, QuantParam(30))),
      vdm::ValidationError);
}

TEST(EncodeSequence, SweepBitrateStrictlyFallsWithQp) {
  const DepthSequence seq = vdmtest::moving_gradient_texture(64, 64, 6);
  double prev = 1e18;
  for (int qp : {30, 35, 40, 45, 49}) {
    const auto [recon, report] = vdm::encode_sequence(seq, QuantParam(qp));
    EXPECT_LT(report.total_bits, prev) << "qp " << qp;
    prev = report.total_bits;
  }
}

TEST(Precoded, ServesFramesAndManifestBits) {
  vdmtest::TempDir root;
  const DepthSequence seq = vdmtest::random_sequence(16, 16, 3, 43);
  namespace fs = std::filesystem;
  for (int qp : {30, 40}) {
    const fs::path dir = root.path() / ("qp" + std::to_string(qp));
    fs::create_directories(dir);
    double bits = 1000.0 + qp;
    std::string manifest = "frame,bits\n";
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%04zu.pgm", t);
      vdm::write_pgm(seq.frames[t], (dir / name).string());
      manifest += std::to_string(t) + "," + std::to_string(bits + t) + "\n";
    }
    std::ofstream(dir / "bits.csv") << manifest;
  }

  const vdm::PrecodedProvider provider(root.path().string(),
                                       {QuantParam(30), QuantParam(40)});
  const EncodedFrame enc = provider.encode(0, seq.frames[0], QuantParam(30));
  EXPECT_EQ(enc.reconstruction.pixels, seq.frames[0].pixels);
  EXPECT_DOUBLE_EQ(enc.estimated_bits, 1030.0);

  // Total of a constant-QP pass reproduces the manifest sum exactly.
  double total = 0.0;
  for (std::size_t t = 0; t < seq.frames.size(); ++t)
    total += provider.encode(t, seq.frames[t], QuantParam(40)).estimated_bits;
  EXPECT_DOUBLE_EQ(total, 1040.0 + 1041.0 + 1042.0);

  EXPECT_THROW(provider.encode(0, seq.frames[0], QuantParam(35)),
               vdm::ValidationError);
  EXPECT_THROW(provider.encode(9, seq.frames[0], QuantParam(30)),
               vdm::ValidationError);
}

TEST(Precoded, MissingPiecesAreNamed) {
  vdmtest::TempDir root;
  EXPECT_THROW(
      vdm::PrecodedProvider(root.path().string(), {QuantParam(30)}),
      vdm::IoError);

  namespace fs = std::filesystem;
  const fs::path dir = root.path() / "qp30";
  fs::create_directories(dir);
  vdm::write_pgm(vdmtest::constant_frame(8, 8, 1),
                 (dir / "frame_0000.pgm").string());
  // Frames exist but the manifest is absent.
  EXPECT_THROW(
      vdm::PrecodedProvider(root.path().string(), {QuantParam(30)}),
      vdm::IoError);

  std::ofstream(dir / "bits.csv") << "wrong,header\n";
  EXPECT_THROW(
      vdm::PrecodedProvider(root.path().string(), {QuantParam(30)}),
      vdm::IoError);
}

TEST(Precoded, ScanDiscoversQpDirectories) {
  vdmtest::TempDir root;
  namespace fs = std::filesystem;
  for (int qp : {30, 31}) {
    const fs::path dir = root.path() / ("qp" + std::to_string(qp));
    fs::create_directories(dir);
    vdm::write_pgm(vdmtest::constant_frame(8, 8, 1),
                   (dir / "frame_0000.pgm").string());
    std::ofstream(dir / "bits.csv") << "frame,bits\n0,100\n";
  }
  const auto provider = vdm::PrecodedProvider::scan(root.path().string());
  EXPECT_EQ(provider.qp_set().size(), 2u);
}
