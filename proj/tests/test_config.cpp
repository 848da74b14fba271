// Copyright 2026 The DPSBCD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "dpsbcd/config.hpp"
#include "dpsbcd/errors.hpp"

namespace dpsbcd {
namespace {

RunConfig resolve(const std::string& text) { return resolve_config(ConfigMap::parse(text, "t")); }

TEST(Config, DefaultsMatchTheExperiment) {
  const RunConfig c = resolve("");
  EXPECT_EQ(c.train.hidden, (std::vector<std::size_t>{200, 200, 200, 200}));
  EXPECT_EQ(c.train.batch_size, 960u);
  EXPECT_EQ(c.train.rho, 3.0);
  EXPECT_EQ(c.train.eta, 0.01);
  EXPECT_EQ(c.privacy.alpha, 100.0);
  EXPECT_EQ(c.data.generator.n, 6000u);
  EXPECT_DOUBLE_EQ(c.c0(), 100.0);
}

TEST(Config, ParsesSectionsCommentsAndLists) {
  const RunConfig c = resolve(
      "# comment\n"
      "seed = 5\n"
      "train.eta = 0.05   # trailing\n"
      "train.hidden = 8,4\n"
      "train.prox = l1\n"
      "train.schedule = linear_decay(0.01, 0.001)\n"
      "privacy.c0 = init\n"
      "train.init_variance = 0.04\n"
      "account.epochs = 10:30:10\n"
      "account.schedule.fast = constant(0.02)\n"
      "sweep.schedule.a = constant(0.01)\n"
      "data.seed = 8\n");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.train.seed, 5u);
  EXPECT_EQ(c.train.eta, 0.05);
  EXPECT_EQ(c.train.hidden, (std::vector<std::size_t>{8, 4}));
  EXPECT_EQ(c.train.prox, ProxKind::kL1);
  EXPECT_NEAR(eval_schedule(c.train.schedule, 0.05, 2, 0), 0.008, 1e-15);
  EXPECT_DOUBLE_EQ(c.c0(), 25.0);
  EXPECT_EQ(c.account.epochs, (std::vector<std::int64_t>{10, 20, 30}));
  ASSERT_EQ(c.account.schedules.size(), 1u);
  EXPECT_EQ(c.account.schedules[0].name, "fast");
  EXPECT_EQ(c.data_seed(), 8u);
}

TEST(Config, UnknownKeyNamesOrigin) {
  try {
    resolve("train.eta = 0.1\ntrain.etaa = 0.1\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("train.etaa"), std::string::npos) << w;
    EXPECT_NE(w.find("t:2"), std::string::npos) << w;
  }
}

TEST(Config, DuplicateKeyRejected) {
  EXPECT_THROW(ConfigMap::parse("seed = 1\nseed = 2\n", "t"), ConfigError);
}

TEST(Config, MalformedValuesRejected) {
  for (const char* bad : {"seed = x", "train.eta = -1", "train.eta = nan", "train.dp = maybe",
                          "privacy.alpha = 1", "account.b = 11", "train.schedule = nope(1)",
                          "sweep.repeats = 0", "account.j0 = 21", "train.hidden = 4,,4",
                          "no equals sign", "train.prox = l3", "account.epochs = 5:1"}) {
    EXPECT_THROW(resolve(bad), ConfigError) << bad;
  }
}

TEST(Config, SetOverridesFile) {
  ConfigMap m = ConfigMap::parse("train.eta = 0.1\n", "t");
  m.set_assignment("train.eta=0.2", "--set");
  EXPECT_EQ(resolve_config(m).train.eta, 0.2);
  EXPECT_THROW(m.set_assignment("novalue", "--set"), ConfigError);
}

TEST(Config, HashIgnoresOutputDirectory) {
  const RunConfig a = resolve("seed = 1\nout = x\n");
  const RunConfig b = resolve("seed = 1\nout = y\n");
  const RunConfig c = resolve("seed = 2\nout = x\n");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
  EXPECT_TRUE(a.out_dir.is_absolute());
}

TEST(Config, IntList) {
  EXPECT_EQ(parse_int_list("3"), (std::vector<std::int64_t>{3}));
  EXPECT_EQ(parse_int_list("1,4, 9"), (std::vector<std::int64_t>{1, 4, 9}));
  EXPECT_EQ(parse_int_list("1:3"), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(parse_int_list("10:50:20"), (std::vector<std::int64_t>{10, 30, 50}));
  EXPECT_THROW(parse_int_list(""), std::invalid_argument);
  EXPECT_THROW(parse_int_list("1:5:0"), std::invalid_argument);
}

TEST(Config, Fnv1aKnownValue) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace dpsbcd
