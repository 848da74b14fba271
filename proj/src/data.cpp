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

#include "dpsbcd/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string_view>

#include "dpsbcd/errors.hpp"
#include "dpsbcd/numerics.hpp"

namespace dpsbcd {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string line_error(const std::filesystem::path& path, std::size_t line, const std::string& m) {
  return path.string() + ":" + std::to_string(line) + ": " + m;
}

}  // namespace

std::size_t Dataset::count(Split s) const noexcept {
  return static_cast<std::size_t>(std::count(split.begin(), split.end(), s));
}

Dataset generate(const GeneratorOptions& o, std::uint64_t seed) {
  if (o.classes < 2) throw std::invalid_argument("generate: need at least 2 classes");
  if (o.n == 0 || o.n % o.classes != 0) {
    throw std::invalid_argument("generate: n = " + std::to_string(o.n) +
                                " is not a positive multiple of classes = " +
                                std::to_string(o.classes));
  }
  if (o.informative == 0 || o.informative > 30 || o.informative + o.redundant > o.dims) {
    throw std::invalid_argument("generate: need 0 < informative <= 30 and informative + "
                                "redundant <= dims");
  }
  if (o.clusters_per_class == 0 ||
      o.classes * o.clusters_per_class > (std::size_t{1} << o.informative)) {
    throw std::invalid_argument("generate: not enough hypercube vertices for " +
                                std::to_string(o.classes * o.clusters_per_class) + " clusters");
  }
  if (!(o.separation > 0.0) || !(o.train_frac > 0.0) || !(o.train_frac <= 1.0)) {
    throw std::invalid_argument("generate: separation must be > 0 and train_frac in (0, 1]");
  }

  numerics::Rng rng(numerics::derive_seed(seed, "generate"));
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> bit(0, 1);

  const std::size_t clusters = o.classes * o.clusters_per_class;
  std::set<std::vector<int>> seen;
  std::vector<std::vector<double>> centres;
  while (centres.size() < clusters) {
    std::vector<int> v(o.informative);
    for (int& s : v) s = 2 * bit(rng) - 1;
    if (!seen.insert(v).second) continue;
    std::vector<double> c(o.informative);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = o.separation * v[i];
    centres.push_back(std::move(c));
  }
  Matrix mix(o.informative, o.redundant);
  for (double& v : mix.values()) v = normal(rng);

  Dataset ds;
  ds.classes = o.classes;
  ds.features = Matrix(o.n, o.dims);
  ds.labels.resize(o.n);
  const std::size_t per_class = o.n / o.classes;
  for (std::size_t i = 0; i < o.n; ++i) {
    const std::size_t cls = i / per_class;
    const std::size_t cluster = cls * o.clusters_per_class + (i % per_class) % o.clusters_per_class;
    ds.labels[i] = static_cast<int>(cls);
    auto row = ds.features.row(i);
    for (std::size_t f = 0; f < o.informative; ++f) row[f] = centres[cluster][f] + normal(rng);
    for (std::size_t r = 0; r < o.redundant; ++r) {
      double s = 0.0;
      for (std::size_t f = 0; f < o.informative; ++f) s += row[f] * mix(f, r);
      row[o.informative + r] = s;
    }
    for (std::size_t f = o.informative + o.redundant; f < o.dims; ++f) row[f] = normal(rng);
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : row) v /= norm;
  }
  ds.X0 = max_column_norm_squared(ds.features.transposed());

  std::vector<std::size_t> order(o.n);
  std::iota(order.begin(), order.end(), 0);
  numerics::Rng split_rng(numerics::derive_seed(seed, "split"));
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_train = static_cast<std::size_t>(std::llround(o.train_frac * o.n));
  ds.split.assign(o.n, Split::kTest);
  for (std::size_t i = 0; i < n_train; ++i) ds.split[order[i]] = Split::kTrain;
  return ds;
}

BatchedData split_and_batch(const Dataset& ds, std::size_t b, std::uint64_t seed) {
  if (b == 0) throw std::invalid_argument("split_and_batch: batch size must be > 0");
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.split[i] == Split::kTrain ? train : test).push_back(i);
  }
  if (train.empty()) throw std::invalid_argument("split_and_batch: no training rows");
  if (train.size() % b != 0) {
    throw std::invalid_argument("split_and_batch: " + std::to_string(train.size()) +
                                " training rows are not divisible by batch size " +
                                std::to_string(b) + " (remainder " +
                                std::to_string(train.size() % b) + ")");
  }
  numerics::Rng rng(numerics::derive_seed(seed, "batches"));
  std::shuffle(train.begin(), train.end(), rng);

  const std::size_t dims = ds.dims();
  auto gather = [&](const std::vector<std::size_t>& rows, std::size_t first, std::size_t count,
                    Matrix& inputs, std::vector<int>& labels) {
    inputs = Matrix(dims, count);
    labels.resize(count);
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t r = rows[first + c];
      for (std::size_t f = 0; f < dims; ++f) inputs(f, c) = ds.features(r, f);
      labels[c] = ds.labels[r];
    }
  };

  BatchedData out;
  out.classes = ds.classes;
  gather(train, 0, train.size(), out.train_inputs, out.train_labels);
  gather(test, 0, test.size(), out.test_inputs, out.test_labels);
  for (std::size_t first = 0; first < train.size(); first += b) {
    LabeledBatch batch;
    std::vector<int> labels;
    gather(train, first, b, batch.inputs, labels);
    batch.targets = one_hot(labels, ds.classes);
    batch.indices.assign(train.begin() + static_cast<std::ptrdiff_t>(first),
                         train.begin() + static_cast<std::ptrdiff_t>(first + b));
    out.batches.push_back(std::move(batch));
  }
  return out;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path, const std::string& trailer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path.string());
  for (std::size_t f = 0; f < ds.dims(); ++f) out << 'f' << f << ',';
  out << "label,split\n";
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << ds.labels[i] << ',' << (ds.split[i] == Split::kTrain ? "train" : "test") << '\n';
  }
  if (!trailer.empty()) out << trailer << '\n';
  if (!out) throw std::runtime_error("save_csv: write failed for " + path.string());
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("load_csv: cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t dims = 0;
  std::vector<double> values;
  Dataset ds;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_commas(line);
    if (!have_header) {
      while (dims < cells.size() && cells[dims] == "f" + std::to_string(dims)) ++dims;
      if (dims == 0) throw FormatError(line_error(path, lineno, "missing column f0"));
      for (const char* name : {"label", "split"}) {
        if (std::find(cells.begin(), cells.end(), name) == cells.end()) {
          throw FormatError(line_error(path, lineno, std::string("missing column ") + name));
        }
      }
      if (cells.size() != dims + 2 || cells[dims] != "label" || cells[dims + 1] != "split") {
        throw FormatError(line_error(path, lineno,
                                     "missing column f" + std::to_string(dims) +
                                         " (header must be f0..fN,label,split)"));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != dims + 2) {
      throw FormatError(line_error(path, lineno, "expected " + std::to_string(dims + 2) +
                                                     " fields, found " +
                                                     std::to_string(cells.size())));
    }
    for (std::size_t f = 0; f < dims; ++f) {
      double v = 0.0;
      const auto s = cells[f];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw FormatError(line_error(path, lineno, "bad feature value '" + std::string(s) + "'"));
      }
      values.push_back(v);
    }
    int label = 0;
    const auto ls = cells[dims];
    const auto [lp, lec] = std::from_chars(ls.data(), ls.data() + ls.size(), label);
    if (lec != std::errc() || lp != ls.data() + ls.size() || label < 0) {
      throw FormatError(line_error(path, lineno, "bad label '" + std::string(ls) + "'"));
    }
    ds.labels.push_back(label);
    if (cells[dims + 1] == "train") {
      ds.split.push_back(Split::kTrain);
    } else if (cells[dims + 1] == "test") {
      ds.split.push_back(Split::kTest);
    } else {
      throw FormatError(line_error(path, lineno,
                                   "bad split tag '" + std::string(cells[dims + 1]) + "'"));
    }
  }
  if (!have_header) throw FormatError("load_csv: " + path.string() + " is empty (no header)");
  if (ds.labels.empty()) throw FormatError("load_csv: " + path.string() + " has no rows (empty dataset)");
  ds.features = Matrix(ds.labels.size(), dims, std::move(values));
  ds.classes = static_cast<std::size_t>(*std::max_element(ds.labels.begin(), ds.labels.end())) + 1;
  ds.X0 = max_column_norm_squared(ds.features.transposed());
  return ds;
}

}  // namespace dpsbcd
