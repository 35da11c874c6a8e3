/* Copyright 2026 The MCSA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mcsa/io.hpp"

namespace mcsa::io {
namespace {

namespace fs = std::filesystem;

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("mcsa_io_" + name); }

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

TEST_CASE("float WAV round trip") {
  frontend::MultichannelWave w{Tensor({3, 50}), 16000.0};
  for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = std::sin(0.1 * i) * 0.5;
  const auto p = temp("float.wav");
  write_wav(p.string(), w);
  const auto back = read_wav(p.string());
  CHECK(back.sample_rate == 16000.0);
  REQUIRE(back.samples.shape() == w.samples.shape());
  CHECK(max_abs_diff(back.samples, w.samples) < 1e-7);
  fs::remove(p);
}

TEST_CASE("16-bit PCM is scaled to [-1, 1)") {
  const auto p = temp("pcm.wav");
  {
    std::ofstream out(p, std::ios::binary);
    const std::int16_t samples[] = {0, 16384, -32768, 32767};  // two stereo frames
    out.write("RIFF", 4);
    put<std::uint32_t>(out, 36 + sizeof(samples));
    out.write("WAVEfmt ", 8);
    put<std::uint32_t>(out, 16);
    put<std::uint16_t>(out, 1);
    put<std::uint16_t>(out, 2);
    put<std::uint32_t>(out, 8000);
    put<std::uint32_t>(out, 8000 * 4);
    put<std::uint16_t>(out, 4);
    put<std::uint16_t>(out, 16);
    out.write("data", 4);
    put<std::uint32_t>(out, sizeof(samples));
    out.write(reinterpret_cast<const char*>(samples), sizeof(samples));
  }
  const auto w = read_wav(p.string());
  CHECK(w.sample_rate == 8000.0);
  REQUIRE(w.samples.shape() == Shape{2, 2});
  CHECK(w.samples.at({0, 0}) == 0.0);
  CHECK(w.samples.at({1, 0}) == 0.5);
  CHECK(w.samples.at({0, 1}) == -1.0);
  CHECK(w.samples.at({1, 1}) == doctest::Approx(32767.0 / 32768.0));
  fs::remove(p);
}

TEST_CASE("malformed WAV files raise DataError") {
  const auto p = temp("bad.wav");
  {
    std::ofstream out(p, std::ios::binary);
    out << "RIFF1234WAVEjunk";
  }
  CHECK_THROWS_AS(read_wav(p.string()), DataError);
  CHECK_THROWS_AS(read_wav(temp("missing.wav").string()), DataError);
  fs::remove(p);
}

TEST_CASE("tensor archive round trip") {
  TensorArchive a;
  a.tensors["x"] = Tensor({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  a.tensors["y.z"] = Tensor({1}, std::vector<double>{-1e-300});
  a.meta = {{"kind", "test"}, {"n", 3}};
  const auto p = temp("archive.bin");
  write_archive(p.string(), a);
  const auto b = read_archive(p.string());
  CHECK(b.meta == a.meta);
  REQUIRE(b.tensors.size() == 2);
  CHECK(b.tensors.at("x").shape() == Shape{2, 3});
  CHECK(b.tensors.at("x").vec() == a.tensors.at("x").vec());
  CHECK(b.tensors.at("y.z")[0] == -1e-300);
  // Truncation is detected.
  fs::resize_file(p, fs::file_size(p) - 8);
  CHECK_THROWS_AS(read_archive(p.string()), DataError);
  fs::remove(p);
}

TEST_CASE("JSON helpers") {
  const auto p = temp("x.json");
  write_json(p.string(), {{"a", 1}});
  CHECK(read_json(p.string())["a"] == 1);
  {
    std::ofstream out(p);
    out << "{oops";
  }
  CHECK_THROWS_AS(read_json(p.string()), DataError);
  fs::remove(p);
}

}  // namespace
}  // namespace mcsa::io
