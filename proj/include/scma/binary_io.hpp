// Copyright 2026 The SCMA-AUD Authors
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

// Little-endian binary framing shared by the dataset and model files:
// a magic line, a single-line JSON header, then a raw payload.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scma/error.hpp"

namespace scma::io {

inline void write_header(std::ostream& out, const std::string& magic,
                         const nlohmann::json& header) {
  out << magic << '\n' << header.dump() << '\n';
}

inline nlohmann::json read_header(std::istream& in, const std::string& magic,
                                  const std::string& what) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == magic,
          ErrorKind::Format, what + ": bad magic (expected " + magic + ")");
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Format,
          what + ": missing header");
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, what + ": malformed header: " + e.what());
  }
}

inline void write_f32(std::ostream& out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (float v : values) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      char b[4];
      for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
      out.write(b, 4);
    }
  }
}

inline void read_f32(std::istream& in, std::span<float> values, const std::string& what) {
  std::vector<unsigned char> raw(values.size_bytes());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  require(static_cast<std::size_t>(in.gcount()) == raw.size(), ErrorKind::Format,
          what + ": truncated payload");
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
}

// Bytes left between the current read position and the end of the stream.
inline std::uint64_t remaining_bytes(std::istream& in) {
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  in.seekg(here);
  return here < 0 || end < here ? 0 : static_cast<std::uint64_t>(end - here);
}

inline void expect_eof(std::istream& in, const std::string& what) {
  in.peek();
  require(in.eof(), ErrorKind::Format, what + ": trailing bytes after payload");
}

}  // namespace scma::io
