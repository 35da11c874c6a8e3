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

#include <cmath>

#include "doctest.h"
#include "mcsa/mfcca_encoder.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mcsa::encoder {
namespace {

using testing::random_tensor;

MfccaConfig tiny(std::size_t context = 2) {
  MfccaConfig cfg;
  cfg.d_model = 8;
  cfg.heads = 2;
  cfg.context = context;
  cfg.num_layers = 2;
  cfg.ff_dim = 12;
  cfg.conv_kernel = 3;
  return cfg;
}

TEST_CASE("keys and values span (2F+1)·C rows") {
  std::mt19937_64 rng(1);
  for (std::size_t c : {1u, 2u, 3u, 4u})
    for (std::size_t f : {0u, 1u, 2u}) {
      const Tensor x = random_tensor({5, c, 4}, rng);
      CHECK(context_expand(x, f).values.shape() == Shape{5, (2 * f + 1) * c, 4});
      nn::ParameterSet params;
      const auto m = MfccaAttention::create(params, "m", tiny(f), rng);
      const auto out = m.forward(ag::constant(random_tensor({5, c, 8}, rng)));
      CHECK(out.weights.shape() == Shape{5 * 2, c, (2 * f + 1) * c});
    }
}

TEST_CASE("MFCCA matches the loop oracle") {
  std::mt19937_64 rng(2);
  for (std::size_t c : {1u, 2u, 4u})
    for (std::size_t f : {0u, 2u}) {
      nn::ParameterSet params;
      const auto m = MfccaAttention::create(params, "m", tiny(f), rng);
      const Tensor x = random_tensor({6, c, 8}, rng);
      const auto out = m.forward(ag::constant(x));
      CHECK(max_abs_diff(out.output.value(), oracle::mfcca(x, m)) < 1e-12);
      const Tensor& w = out.weights.value();
      for (std::size_t r = 0; r < w.size() / w.dim(2); ++r) {
        double s = 0.0;
        for (std::size_t n = 0; n < w.dim(2); ++n) s += w[r * w.dim(2) + n];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
}

TEST_CASE("with F = 0 and one channel every weight is one") {
  std::mt19937_64 rng(3);
  nn::ParameterSet params;
  const auto m = MfccaAttention::create(params, "m", tiny(0), rng);
  const auto out = m.forward(ag::constant(random_tensor({4, 1, 8}, rng)));
  for (double v : out.weights.value().vec()) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("channel fusion plan and loop oracle") {
  CHECK(ChannelConvFusion::stage_plan(1) == std::vector<std::size_t>{1});
  CHECK(ChannelConvFusion::stage_plan(2) == std::vector<std::size_t>{2, 1});
  CHECK(ChannelConvFusion::stage_plan(3) == std::vector<std::size_t>{3, 2, 1});
  CHECK(ChannelConvFusion::stage_plan(4) == std::vector<std::size_t>{4, 2, 1});
  CHECK_THROWS_AS(ChannelConvFusion::stage_plan(5), std::invalid_argument);
  std::mt19937_64 rng(4);
  for (std::size_t c : {1u, 2u, 3u, 4u}) {
    nn::ParameterSet params;
    auto fusion = ChannelConvFusion::create(params, "f", c, rng);
    for (auto& s : fusion.stages) s.bias.mutable_value() = random_tensor(s.bias.shape(), rng);
    const Tensor x = random_tensor({c, 7, 5}, rng);
    const Tensor got = fusion(ag::constant(x)).value();
    REQUIRE(got.shape() == Shape{7, 5});
    CHECK(max_abs_diff(got, oracle::channel_fusion(x, fusion)) < 1e-12);
  }
}

TEST_CASE("encoder shapes for one to four microphones") {
  std::mt19937_64 rng(5);
  for (std::size_t c : {1u, 2u, 3u, 4u}) {
    nn::ParameterSet params;
    const auto enc = MfccaEncoder::create(params, "enc", tiny(), c, rng);
    const auto out = enc.encode(ag::constant(random_tensor({c, 9, 8}, rng)));
    CHECK(out.per_channel.shape() == Shape{c, 9, 8});
    CHECK(out.fused.shape() == Shape{9, 8});
    CHECK(enc.blocks().size() == 2);
  }
}

TEST_CASE("encoder is equivariant to microphone order before fusion") {
  std::mt19937_64 rng(6);
  nn::ParameterSet params;
  const auto enc = MfccaEncoder::create(params, "enc", tiny(), 3, rng);
  const Tensor x = random_tensor({3, 5, 8}, rng);
  Tensor swapped = x;
  const std::size_t plane = 5 * 8;
  for (std::size_t i = 0; i < plane; ++i) std::swap(swapped[i], swapped[2 * plane + i]);
  const Tensor a = enc.encode(ag::constant(x)).per_channel.value();
  const Tensor b = enc.encode(ag::constant(swapped)).per_channel.value();
  for (std::size_t i = 0; i < plane; ++i) {
    CHECK(a[i] == doctest::Approx(b[2 * plane + i]).epsilon(1e-10));
    CHECK(a[plane + i] == doctest::Approx(b[plane + i]).epsilon(1e-10));
  }
}

TEST_CASE("encoder parameter gradients") {
  std::mt19937_64 rng(7);
  nn::ParameterSet params;
  auto cfg = tiny(1);
  cfg.num_layers = 1;
  cfg.d_model = 4;
  cfg.ff_dim = 6;
  const auto enc = MfccaEncoder::create(params, "enc", cfg, 2, rng);
  const Tensor x = random_tensor({2, 4, 4}, rng), w = random_tensor({4, 4}, rng);
  auto loss = [&] { return ag::sum(ag::mul(enc.encode(ag::constant(x)).fused, ag::constant(w))); };
  CHECK(testing::parameter_gradient_check(params, loss) < 1e-4);
}

TEST_CASE("invalid configurations") {
  auto cfg = tiny();
  cfg.heads = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  std::mt19937_64 rng(8);
  nn::ParameterSet params;
  CHECK_THROWS_AS(MfccaEncoder::create(params, "e", tiny(), 5, rng), std::invalid_argument);
}

}  // namespace
}  // namespace mcsa::encoder
