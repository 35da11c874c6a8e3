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

#include "mcsa/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace mcsa::io {

namespace {

constexpr char kArchiveMagic[8] = {'M', 'C', 'S', 'A', 'T', 'N', 'S', 'R'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

frontend::MultichannelWave read_wav(const std::string& path) {
  const std::vector<char> buf = slurp(path);
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw DataError(path + ": not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_pos = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const std::uint32_t len = get<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt " && len >= 16 && body + 16 <= buf.size()) {
      format = get<std::uint16_t>(buf, body);
      channels = get<std::uint16_t>(buf, body + 2);
      rate = get<std::uint32_t>(buf, body + 4);
      bits = get<std::uint16_t>(buf, body + 14);
      if (format == 0xFFFE && len >= 26) format = get<std::uint16_t>(buf, body + 24);
    } else if (id == "data") {
      data_pos = body;
      data_len = std::min<std::size_t>(len, buf.size() - body);
      break;
    }
    pos = body + len + (len & 1u);
  }
  if (channels == 0 || data_pos == 0) throw DataError(path + ": missing fmt or data chunk");
  const bool pcm16 = format == 1 && bits == 16;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !f32) {
    throw DataError(path + ": unsupported WAV encoding (need 16-bit PCM or 32-bit float)");
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = data_len / (width * channels);
  frontend::MultichannelWave w;
  w.sample_rate = rate;
  w.samples = Tensor({channels, frames}, 0.0);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t at = data_pos + (i * channels + c) * width;
      w.samples[c * frames + i] = pcm16 ? get<std::int16_t>(buf, at) / 32768.0
                                        : static_cast<double>(get<float>(buf, at));
    }
  }
  return w;
}

void write_wav(const std::string& path, const frontend::MultichannelWave& wave) {
  const auto channels = static_cast<std::uint16_t>(wave.channels());
  const std::size_t frames = wave.length();
  const auto rate = static_cast<std::uint32_t>(wave.sample_rate);
  const auto data_len = static_cast<std::uint32_t>(frames * channels * 4);
  std::ofstream out = open_out(path);
  out.write("RIFF", 4);
  put<std::uint32_t>(out, 36 + data_len);
  out.write("WAVEfmt ", 8);
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, 3);
  put<std::uint16_t>(out, channels);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * channels * 4);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(channels * 4));
  put<std::uint16_t>(out, 32);
  out.write("data", 4);
  put<std::uint32_t>(out, data_len);
  for (std::size_t i = 0; i < frames; ++i)
    for (std::size_t c = 0; c < channels; ++c)
      put<float>(out, static_cast<float>(wave.samples[c * frames + i]));
  if (!out) throw DataError("write failed: " + path);
}

void write_archive(const std::string& path, const TensorArchive& archive) {
  nlohmann::json header = {{"meta", archive.meta}, {"tensors", nlohmann::json::object()}};
  std::size_t offset = 0;
  for (const auto& [name, t] : archive.tensors) {
    header["tensors"][name] = {{"shape", t.shape()}, {"offset", offset}};
    offset += t.size();
  }
  const std::string text = header.dump();
  std::ofstream out = open_out(path);
  out.write(kArchiveMagic, 8);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, t] : archive.tensors) {
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw DataError("write failed: " + path);
}

TensorArchive read_archive(const std::string& path) {
  const std::vector<char> buf = slurp(path);
  if (buf.size() < 16 || std::memcmp(buf.data(), kArchiveMagic, 8) != 0) {
    throw DataError(path + ": not a tensor archive");
  }
  const auto header_len = get<std::uint64_t>(buf, 8);
  if (16 + header_len > buf.size()) throw DataError(path + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(buf.begin() + 16, buf.begin() + 16 + static_cast<long>(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad header: " + e.what());
  }
  const std::size_t data = 16 + header_len;
  TensorArchive a;
  a.meta = header.value("meta", nlohmann::json::object());
  for (const auto& [name, entry] : header.at("tensors").items()) {
    const Shape shape = entry.at("shape").get<Shape>();
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    const std::size_t n = shape_numel(shape);
    if (data + (offset + n) * sizeof(double) > buf.size()) {
      throw DataError(path + ": tensor " + name + " runs past end of file");
    }
    std::vector<double> values(n);
    std::memcpy(values.data(), buf.data() + data + offset * sizeof(double), n * sizeof(double));
    a.tensors.emplace(name, Tensor(shape, std::move(values)));
  }
  return a;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace mcsa::io
