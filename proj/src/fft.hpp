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

// Thin RAII wrappers over FFTW real transforms. Internal to the library.

#ifndef MCSA_SRC_FFT_HPP_
#define MCSA_SRC_FFT_HPP_

#include <fftw3.h>

#include <cstddef>
#include <mutex>
#include <vector>

namespace mcsa::fft {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex();

class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  const fftw_complex* run();

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// Linear convolution, length a.size() + b.size() - 1 (empty if either is).
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mcsa::fft

#endif  // MCSA_SRC_FFT_HPP_
