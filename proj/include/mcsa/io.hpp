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

// WAV files and a small named-tensor archive format.

#ifndef MCSA_IO_HPP_
#define MCSA_IO_HPP_

#include <map>
#include <string>

#include "json.hpp"
#include "mcsa/signal_frontend.hpp"
#include "mcsa/tensor.hpp"

namespace mcsa::io {

// Error raised for unreadable, truncated or malformed input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads 16-bit PCM or 32-bit float WAV, any channel count.
frontend::MultichannelWave read_wav(const std::string& path);

// Writes 32-bit float WAV.
void write_wav(const std::string& path, const frontend::MultichannelWave& wave);

// Archive layout: "MCSATNSR" magic, little-endian u64 header length, JSON
// header {"meta": ..., "tensors": {name: {"shape": [...], "offset": n}}},
// then float64 data; offsets count doubles from the start of the data.
struct TensorArchive {
  std::map<std::string, Tensor> tensors;
  nlohmann::json meta = nlohmann::json::object();
};

void write_archive(const std::string& path, const TensorArchive& archive);
TensorArchive read_archive(const std::string& path);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace mcsa::io

#endif  // MCSA_IO_HPP_
