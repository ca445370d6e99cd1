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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vdm/codec.hpp"
#include "vdm/errors.hpp"
#include "vdm/io.hpp"

namespace vdm {

// Serves externally pre-encoded material (for example genuine AVC output)
// through the codec backend contract. Layout on disk, one directory per
// QP under a common root:
//
//   <root>/qp<NN>/frame_0000.pgm ...   decoded frames
//   <root>/qp<NN>/bits.csv             header "frame,bits", one row/frame
//
// Everything is loaded eagerly; the provider is read-only afterwards.
class PrecodedProvider {
 public:
  PrecodedProvider(const std::string& root,
                   const std::vector<QuantParam>& qp_set) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
      throw IoError("precoded root is not a directory: " + root);
    if (qp_set.empty())
      throw ValidationError("precoded provider needs at least one QP");
    for (QuantParam qp : qp_set) {
      char name[8];
      std::snprintf(name, sizeof(name), "qp%02d", qp.qp);
      const fs::path dir = fs::path(root) / name;
      if (!fs::is_directory(dir))
        throw IoError("missing precoded directory: " + dir.string());
      Entry entry;
      entry.frames = read_pgm_sequence(dir.string(), "*.pgm");
      entry.bits = read_bits_manifest((dir / "bits.csv").string());
      entries_.emplace(qp.qp, std::move(entry));
    }
  }

  // Discovers every qp<NN> subdirectory under root.
  static PrecodedProvider scan(const std::string& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
      throw IoError("precoded root is not a directory: " + root);
    std::vector<QuantParam> qps;
    for (const auto& entry : fs::directory_iterator(root)) {
      if (!entry.is_directory()) continue;
      const std::string name = entry.path().filename().string();
      if (name.size() == 4 && name.rfind("qp", 0) == 0 &&
          std::isdigit(static_cast<unsigned char>(name[2])) &&
          std::isdigit(static_cast<unsigned char>(name[3])))
        qps.push_back(QuantParam(std::stoi(name.substr(2))));
    }
    if (qps.empty())
      throw IoError("no qp<NN> directories under precoded root: " + root);
    return PrecodedProvider(root, qps);
  }

  EncodedFrame encode(std::size_t frame_index, const DepthFrame& src,
                      QuantParam qp) const {
    const auto it = entries_.find(qp.qp);
    if (it == entries_.end())
      throw ValidationError("precoded lookup: QP " + std::to_string(qp.qp) +
                            " not in the provider's set");
    const Entry& entry = it->second;
    if (frame_index >= entry.frames.frames.size())
      throw ValidationError("precoded lookup: frame " +
                            std::to_string(frame_index) +
                            " absent at QP " + std::to_string(qp.qp));
    const auto bits_it = entry.bits.find(frame_index);
    if (bits_it == entry.bits.end())
      throw ValidationError("precoded lookup: no bits entry for frame " +
                            std::to_string(frame_index) + " at QP " +
                            std::to_string(qp.qp));
    const DepthFrame& recon = entry.frames.frames[frame_index];
    if (src.width > 0 && !recon.same_shape(src))
      throw ValidationError("precoded frame " + std::to_string(frame_index) +
                            " at QP " + std::to_string(qp.qp) +
                            " does not match the source dimensions");
    EncodedFrame out;
    out.reconstruction = recon;
    out.estimated_bits = bits_it->second;
    out.qp_used = qp;
    return out;
  }

  std::vector<QuantParam> qp_set() const {
    std::vector<QuantParam> qps;
    qps.reserve(entries_.size());
    for (const auto& [qp, entry] : entries_) qps.push_back(QuantParam(qp));
    return qps;
  }

  std::size_t frame_count(QuantParam qp) const {
    const auto it = entries_.find(qp.qp);
    return it == entries_.end() ? 0 : it->second.frames.frames.size();
  }

 private:
  struct Entry {
    DepthSequence frames;
    std::map<std::size_t, double> bits;
  };

  static std::map<std::size_t, double> read_bits_manifest(
      const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing bits manifest: " + path);
    std::string line;
    if (!std::getline(in, line))
      throw IoError("empty bits manifest: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "frame,bits")
      throw IoError(path + ": expected header 'frame,bits', got '" + line +
                    "'");
    std::map<std::size_t, double> bits;
    int row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string frame_str, bits_str;
      if (!std::getline(ss, frame_str, ',') || !std::getline(ss, bits_str))
        throw IoError(path + ": malformed row " + std::to_string(row));
      try {
        bits[static_cast<std::size_t>(std::stoull(frame_str))] =
            std::stod(bits_str);
      } catch (const std::logic_error&) {
        throw IoError(path + ": malformed row " + std::to_string(row));
      }
    }
    return bits;
  }

  std::map<int, Entry> entries_;
};

static_assert(CodecBackend<PrecodedProvider>);

}  // namespace vdm
