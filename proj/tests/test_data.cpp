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

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "dpsbcd/data.hpp"
#include "dpsbcd/errors.hpp"

namespace dpsbcd {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

TEST(Generate, DefaultShapeAndBalance) {
  const Dataset ds = generate({}, 1);
  EXPECT_EQ(ds.size(), 6000u);
  EXPECT_EQ(ds.dims(), 20u);
  EXPECT_EQ(ds.classes, 5u);
  std::vector<int> hist(5, 0);
  for (int l : ds.labels) ++hist.at(static_cast<std::size_t>(l));
  for (int h : hist) EXPECT_EQ(h, 1200);
  EXPECT_EQ(ds.count(Split::kTrain), 4800u);
  EXPECT_EQ(ds.count(Split::kTest), 1200u);
}

TEST(Generate, RowsHaveUnitNorm) {
  const Dataset ds = generate({}, 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double s = 0.0;
    for (double v : ds.features.row(i)) s += v * v;
    worst = std::max(worst, std::sqrt(s));
  }
  EXPECT_LE(worst, 1.0 + 1e-12);
  EXPECT_NEAR(ds.X0, 1.0, 1e-12);
}

TEST(Generate, SeedDeterminism) {
  EXPECT_EQ(generate({}, 9), generate({}, 9));
  EXPECT_FALSE(generate({}, 9) == generate({}, 10));
}

TEST(Generate, RejectsIndivisibleCount) {
  GeneratorOptions o;
  o.n = 6001;
  EXPECT_THROW(generate(o, 1), std::invalid_argument);
  o = GeneratorOptions{};
  o.informative = 18;
  EXPECT_THROW(generate(o, 1), std::invalid_argument);
}

// Least-squares linear probe on one-hot targets, scored on the test split.
TEST(Generate, LinearProbeBeatsChance) {
  const Dataset ds = generate({}, 3);
  const std::size_t ntr = ds.count(Split::kTrain), d = ds.dims();
  Eigen::MatrixXd A(ntr, d + 1), Y = Eigen::MatrixXd::Zero(ntr, 5);
  std::size_t r = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.split[i] != Split::kTrain) continue;
    for (std::size_t f = 0; f < d; ++f) A(r, f) = ds.features(i, f);
    A(r, d) = 1.0;
    Y(r, ds.labels[i]) = 1.0;
    ++r;
  }
  const Eigen::MatrixXd W = A.colPivHouseholderQr().solve(Y);
  int correct = 0, total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.split[i] != Split::kTest) continue;
    Eigen::RowVectorXd x(d + 1);
    for (std::size_t f = 0; f < d; ++f) x(f) = ds.features(i, f);
    x(d) = 1.0;
    Eigen::Index best;
    (x * W).maxCoeff(&best);
    correct += best == ds.labels[i];
    ++total;
  }
  EXPECT_GT(static_cast<double>(correct) / total, 0.3);
}

TEST(Batching, SingleBatchWhenBEqualsTrain) {
  const Dataset ds = generate({}, 4);
  const BatchedData b = split_and_batch(ds, 4800, 1);
  EXPECT_EQ(b.batches.size(), 1u);
  EXPECT_EQ(b.batches[0].inputs.cols(), 4800u);
}

TEST(Batching, PartitionOfTrainSplit) {
  const Dataset ds = generate({}, 5);
  const BatchedData b = split_and_batch(ds, 960, 7);
  ASSERT_EQ(b.batches.size(), 5u);
  std::set<std::size_t> seen;
  for (const auto& batch : b.batches) {
    EXPECT_EQ(batch.inputs.cols(), 960u);
    EXPECT_EQ(batch.targets.rows(), 5u);
    for (std::size_t c = 0; c < batch.indices.size(); ++c) {
      const std::size_t i = batch.indices[c];
      EXPECT_EQ(ds.split[i], Split::kTrain);
      EXPECT_TRUE(seen.insert(i).second) << "row " << i << " in two batches";
      EXPECT_EQ(batch.inputs(3, c), ds.features(i, 3));
      EXPECT_EQ(batch.targets(static_cast<std::size_t>(ds.labels[i]), c), 1.0);
    }
  }
  EXPECT_EQ(seen.size(), 4800u);
  EXPECT_EQ(b.test_inputs.cols(), 1200u);
  EXPECT_EQ(b.train_labels.size(), 4800u);
}

TEST(Batching, SameSeedSameMembership) {
  const Dataset ds = generate({}, 6);
  const BatchedData a = split_and_batch(ds, 960, 3), b = split_and_batch(ds, 960, 3);
  for (std::size_t j = 0; j < a.batches.size(); ++j) {
    EXPECT_EQ(a.batches[j].indices, b.batches[j].indices);
  }
  EXPECT_NE(split_and_batch(ds, 960, 4).batches[0].indices, a.batches[0].indices);
}

TEST(Batching, IndivisibleSizeNamesRemainder) {
  const Dataset ds = generate({}, 6);
  try {
    split_and_batch(ds, 1000, 1);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("800"), std::string::npos) << e.what();
  }
}

TEST(Csv, RoundTrip) {
  GeneratorOptions o;
  o.n = 50;
  const Dataset ds = generate(o, 7);
  const auto path = temp_file("dpsbcd_roundtrip.csv");
  save_csv(ds, path, "# trailer");
  const Dataset back = load_csv(path);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.split, ds.split);
  EXPECT_EQ(back.classes, ds.classes);
  double worst = 0.0;
  for (std::size_t i = 0; i < ds.features.size(); ++i) {
    worst = std::max(worst, std::abs(back.features.values()[i] - ds.features.values()[i]));
  }
  EXPECT_LE(worst, 1e-15);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.substr(0, 9), "f0,f1,f2,");
  EXPECT_EQ(header.substr(header.size() - 15), "f19,label,split");
  fs::remove(path);
}

TEST(Csv, EmptyFileIsExplicitError) {
  const auto path = temp_file("dpsbcd_empty.csv");
  std::ofstream(path).close();
  try {
    load_csv(path);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("empty"), std::string::npos) << e.what();
  }
  std::ofstream(path) << "f0,label,split\n";
  EXPECT_THROW(load_csv(path), FormatError);
  fs::remove(path);
}

TEST(Csv, HeaderMismatchNamesColumn) {
  const auto path = temp_file("dpsbcd_badheader.csv");
  std::ofstream(path) << "f0,f1,label\n0.1,0.2,1\n";
  try {
    load_csv(path);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("missing column split"), std::string::npos) << e.what();
  }
  fs::remove(path);
}

TEST(Csv, BadValueCarriesLineNumber) {
  const auto path = temp_file("dpsbcd_badvalue.csv");
  std::ofstream(path) << "f0,label,split\n0.5,1,train\nabc,0,test\n";
  try {
    load_csv(path);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
  fs::remove(path);
}

}  // namespace
}  // namespace dpsbcd
