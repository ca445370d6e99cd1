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
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "vdm/errors.hpp"
#include "vdm/frame.hpp"

namespace vdm {

namespace detail {

// Shell-style filename matching: '*' any run, '?' one character.
inline bool glob_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0;
  std::size_t star = std::string::npos, star_n = 0;
  while (n < name.size()) {
    if (p < pattern.size() &&
        (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      star_n = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++star_n;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

// Value of the last digit run in a filename, or -1 when there is none.
// Drives the frame ordering of directory reads.
inline long long trailing_index(const std::string& name) {
  std::size_t end = name.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(name[end - 1])))
    --end;
  if (end == 0) return -1;
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(name[begin - 1])))
    --begin;
  // Cap the parsed run so absurdly long digit strings cannot overflow.
  if (end - begin > 18) begin = end - 18;
  return std::stoll(name.substr(begin, end - begin));
}

}  // namespace detail

// Reads a headerless raw sequence: row-major, one byte per pixel, frames
// concatenated. meta.frame_count == 0 loads every frame in the file. With
// yuv420_chroma_skip the file is treated as planar YUV420 and the
// width*height/2 chroma bytes trailing each Y plane are skipped.
inline DepthSequence read_raw_y(const std::string& path, SequenceMeta meta,
                                bool yuv420_chroma_skip = false) {
  meta.validate();
  std::size_t luma = static_cast<std::size_t>(meta.pixels_per_frame());
  std::size_t stride = luma;
  if (yuv420_chroma_skip) {
    if (luma % 2 != 0)
      throw ValidationError("YUV420 layout needs an even pixel count, got " +
                            std::to_string(meta.width) + "x" +
                            std::to_string(meta.height));
    stride += luma / 2;
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open raw file: " + path);
  in.seekg(0, std::ios::end);
  const std::uint64_t file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0, std::ios::beg);

  if (file_size == 0 || file_size % stride != 0)
    throw IoError("truncated raw file " + path + ": size " +
                  std::to_string(file_size) +
                  " is not a positive multiple of the " +
                  std::to_string(stride) + "-byte frame stride");
  const std::size_t available = static_cast<std::size_t>(file_size / stride);
  const std::size_t wanted =
      meta.frame_count == 0 ? available
                            : static_cast<std::size_t>(meta.frame_count);
  if (wanted > available)
    throw IoError("truncated raw file " + path + ": " +
                  std::to_string(wanted) + " frames requested (" +
                  std::to_string(wanted * stride) + " bytes) but only " +
                  std::to_string(available) + " present (" +
                  std::to_string(file_size) + " bytes)");

  DepthSequence seq;
  seq.meta = meta;
  seq.meta.frame_count = static_cast<int>(wanted);
  seq.frames.reserve(wanted);
  for (std::size_t t = 0; t < wanted; ++t) {
    DepthFrame f;
    f.width = meta.width;
    f.height = meta.height;
    f.bit_depth = meta.bit_depth;
    f.pixels.resize(luma);
    if (!in.read(reinterpret_cast<char*>(f.pixels.data()),
                 static_cast<std::streamsize>(luma)))
      throw IoError("read error in raw file " + path + " at frame " +
                    std::to_string(t));
    if (yuv420_chroma_skip)
      in.seekg(static_cast<std::streamoff>(luma / 2), std::ios::cur);
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

// Reads one binary PGM (P5) frame. maxval above 255 (16-bit data) is
// rejected.
inline DepthFrame read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open PGM file: " + path);

  // Header tokens may be separated by whitespace and '#' comment lines.
  auto next_token = [&in, &path]() {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
      } else if (!std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
          tok.push_back(static_cast<char>(in.get()));
        return tok;
      }
    }
    throw IoError("unexpected end of PGM header in " + path);
  };

  const std::string magic = next_token();
  if (magic != "P5")
    throw IoError(path + ": not a binary PGM (P5) file, magic '" + magic +
                  "'");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::logic_error&) {
    throw IoError(path + ": malformed PGM header");
  }
  if (width <= 0 || height <= 0)
    throw IoError(path + ": invalid PGM dimensions");
  if (maxval <= 0 || maxval > 255)
    throw IoError(path + ": unsupported PGM maxval " + std::to_string(maxval));
  in.get();  // single whitespace after maxval

  DepthFrame f;
  f.width = width;
  f.height = height;
  f.pixels.resize(static_cast<std::size_t>(width) * height);
  if (!in.read(reinterpret_cast<char*>(f.pixels.data()),
               static_cast<std::streamsize>(f.pixels.size())))
    throw IoError(path + ": truncated PGM pixel data");
  return f;
}

// Writes a frame as binary PGM (P5), maxval 255, row-major.
inline void write_pgm(const DepthFrame& frame, const std::string& path) {
  frame.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.size()));
  if (!out) throw IoError("write failed: " + path);
}

// Loads every PGM in a directory whose filename matches the glob pattern,
// ordered by the numeric index embedded in the name. All frames must share
// dimensions.
inline DepthSequence read_pgm_sequence(const std::string& dir,
                                       const std::string& pattern = "*.pgm",
                                       double fps = 30.0) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw IoError("not a directory: " + dir);

  std::vector<std::pair<long long, std::string>> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (detail::glob_match(pattern, name))
      names.emplace_back(detail::trailing_index(name), name);
  }
  if (names.empty())
    throw IoError("no files matching '" + pattern + "' in " + dir);
  std::sort(names.begin(), names.end());

  DepthSequence seq;
  for (const auto& [index, name] : names) {
    const std::string path = (fs::path(dir) / name).string();
    DepthFrame f = read_pgm(path);
    if (!seq.frames.empty() && !f.same_shape(seq.frames.front()))
      throw ValidationError("mixed dimensions in PGM sequence: " + path +
                            " is " + std::to_string(f.width) + "x" +
                            std::to_string(f.height) + ", expected " +
                            std::to_string(seq.frames.front().width) + "x" +
                            std::to_string(seq.frames.front().height));
    seq.frames.push_back(std::move(f));
  }
  seq.meta.width = seq.frames.front().width;
  seq.meta.height = seq.frames.front().height;
  seq.meta.frame_count = static_cast<int>(seq.frames.size());
  seq.meta.fps = fps;
  return seq;
}

}  // namespace vdm
