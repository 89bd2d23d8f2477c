// Copyright 2026 cmaf authors
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
//
// Little-endian binary readers/writers shared by the file formats.
// Read errors name the file, the field and (for bulk payloads) expected vs
// actual byte counts.

#ifndef CMAF_BINIO_HPP_
#define CMAF_BINIO_HPP_

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cmaf/error.hpp"

namespace cmaf::binio {

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path) {
    std::filesystem::path p(path);
    if (p.has_parent_path())
      std::filesystem::create_directories(p.parent_path());
    os_.open(path, std::ios::binary | std::ios::trunc);
    check(os_.good(), "cannot open for writing: ", path);
  }

  void magic(const char* m) { os_.write(m, 4); }
  void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }

  void u16(std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    os_.write(reinterpret_cast<char*>(b), 2);
  }

  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i)
      b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os_.write(reinterpret_cast<char*>(b), 4);
  }

  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v & 0xffffffffu));
    u32(static_cast<std::uint32_t>(v >> 32));
  }

  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }

  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }

  void f32_array(const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f32(static_cast<float>(v[i]));
  }

  void f64_array(const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f64(v[i]);
  }

  void close(const char* what) {
    os_.flush();
    check(os_.good(), what, ": write failed: ", path_);
    os_.close();
  }

 private:
  std::string path_;
  std::ofstream os_;
};

class Reader {
 public:
  Reader(const std::string& path, const char* what)
      : path_(path), is_(path, std::ios::binary) {
    check(is_.good(), what, " file not found or unreadable: ", path);
  }

  const std::string& path() const { return path_; }

  void expect_magic(const char* magic) {
    char got[4] = {0};
    is_.read(got, 4);
    check(is_.gcount() == 4 && std::memcmp(got, magic, 4) == 0, path_,
          ": bad magic, expected \"", magic, "\"");
  }

  std::uint8_t u8(const char* field) {
    unsigned char b;
    read_exact(&b, 1, field);
    return b;
  }

  std::uint16_t u16(const char* field) {
    unsigned char b[2];
    read_exact(b, 2, field);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32(const char* field) {
    unsigned char b[4];
    read_exact(b, 4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  std::uint64_t u64(const char* field) {
    const std::uint64_t lo = u32(field);
    const std::uint64_t hi = u32(field);
    return lo | (hi << 32);
  }

  float f32(const char* field) {
    std::uint32_t bits = u32(field);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double f64(const char* field) {
    std::uint64_t bits = u64(field);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  void f32_array(double* out, std::size_t count, const char* field) {
    std::vector<unsigned char> buf(count * 4);
    bulk(buf, field);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b)
        bits |= static_cast<std::uint32_t>(buf[i * 4 + b]) << (8 * b);
      float v;
      std::memcpy(&v, &bits, 4);
      out[i] = static_cast<double>(v);
    }
  }

  void f64_array(double* out, std::size_t count, const char* field) {
    std::vector<unsigned char> buf(count * 8);
    bulk(buf, field);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(buf[i * 8 + b]) << (8 * b);
      std::memcpy(&out[i], &bits, 8);
    }
  }

 private:
  void bulk(std::vector<unsigned char>& buf, const char* field) {
    is_.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(is_.gcount());
    check(got == buf.size(), path_, ": truncated ", field, ", expected ",
          buf.size(), " bytes, got ", got);
  }

  void read_exact(void* p, std::size_t n, const char* field) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    check(static_cast<std::size_t>(is_.gcount()) == n, path_,
          ": truncated while reading field '", field, "'");
  }

  std::string path_;
  std::ifstream is_;
};

}  // namespace cmaf::binio

#endif  // CMAF_BINIO_HPP_
