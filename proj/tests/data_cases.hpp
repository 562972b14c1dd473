// Copyright 2026 The oesgnn Authors
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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oes/data.hpp"

namespace testutil {

/// IBM-layout CSV with integer-second timestamps drawn from a small range,
/// so ties are frequent and rows arrive out of time order.
inline std::string random_csv(std::mt19937_64& rng, std::size_t rows, std::size_t accounts = 30) {
  static const char* currencies[] = {"Euro", "US Dollar", "Yen"};
  static const char* formats[] = {"ACH", "Cash", "Wire", "Cheque"};
  std::string out =
      "Timestamp,From Bank,Account,To Bank,Account,Amount Received,Receiving Currency,"
      "Amount Paid,Payment Currency,Payment Format,Is Laundering\n";
  std::uniform_int_distribution<std::int64_t> when(1000, 1000 + static_cast<std::int64_t>(rows) / 2 + 1);
  std::uniform_int_distribution<std::size_t> who(0, accounts - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    std::size_t a = who(rng), b = who(rng);
    char amount[32];
    std::snprintf(amount, sizeof amount, "%.2f", std::exp(std::uniform_real_distribution<double>(0.0, 10.0)(rng)));
    const char* cur = currencies[rng() % 3];
    out += std::to_string(when(rng)) + "," + std::to_string(a % 3) + ",A" + std::to_string(a) + "," +
           std::to_string(b % 3) + ",A" + std::to_string(b) + "," + amount + "," + cur + "," + amount + "," +
           cur + "," + formats[rng() % 4] + "," + (rng() % 10 == 0 ? "1" : "0") + "\n";
  }
  return out;
}

/// Containment, window and size checks of one split; empty when all hold.
inline std::string split_violation(const oes::data::Transactions& tx, const oes::data::DatasetBundle& b) {
  const std::size_t n = tx.records.size();
  if (b.test_graph.edge_count() != n) return "test graph does not hold every transaction";
  if (b.train_count + b.valid_count + b.test_count != n) return "window sizes do not add up";
  auto near = [&](std::size_t got, double want) { return std::abs(static_cast<double>(got) - want) <= 1.0; };
  if (!near(b.train_count, 0.6 * static_cast<double>(n)) || !near(b.valid_count, 0.2 * static_cast<double>(n)) ||
      !near(b.test_count, 0.2 * static_cast<double>(n))) {
    return "window sizes off 60/20/20 by more than one record";
  }
  if (b.train_graph.edge_count() != b.train_count || b.valid_graph.edge_count() != b.train_count + b.valid_count) {
    return "graph sizes do not match windows";
  }
  // containment as transaction sets, keyed by source row
  auto rows_of = [&](std::size_t count) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < count; ++i) rows.push_back(b.ordered[i].row);
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  auto train = rows_of(b.train_count), valid = rows_of(b.train_count + b.valid_count), test = rows_of(n);
  if (!std::includes(valid.begin(), valid.end(), train.begin(), train.end())) return "train not inside valid";
  if (!std::includes(test.begin(), test.end(), valid.begin(), valid.end())) return "valid not inside test";
  for (std::size_t i = 0; i < b.valid_graph.edge_count(); ++i) {
    if (!(b.valid_graph.edge(i) == b.test_graph.edge(i))) return "valid edge differs from test edge";
    if (i < b.train_count && !(b.train_graph.edge(i) == b.valid_graph.edge(i))) return "train edge differs from valid edge";
  }
  // the sorted order is the (timestamp, row) order of the input
  auto sorted = tx.records;
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
    return x.timestamp != y.timestamp ? x.timestamp < y.timestamp : x.row < y.row;
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (sorted[i].row != b.ordered[i].row) return "ordering is not (timestamp, row)";
    const auto& e = b.test_graph.edge(i);
    if (e.src != sorted[i].src_node || e.dst != sorted[i].dst_node) return "edge endpoints do not follow the order";
  }
  // masks
  auto window = [&](const std::vector<std::size_t>& mask, std::size_t lo, std::size_t hi) {
    if (mask.size() != hi - lo) return false;
    for (std::size_t id : mask) {
      if (id < lo || id >= hi) return false;
      if (b.ordered[id].timestamp < b.ordered[lo == 0 ? 0 : lo - 1].timestamp) return false;
      if (hi < n && b.ordered[id].timestamp > b.ordered[hi].timestamp) return false;
    }
    return true;
  };
  if (!window(b.valid_eval_mask, b.train_count, b.train_count + b.valid_count)) return "valid mask leaves its window";
  if (!window(b.test_eval_mask, b.train_count + b.valid_count, n)) return "test mask leaves its window";
  for (std::size_t id : b.valid_eval_mask) {
    if (id >= b.valid_graph.edge_count()) return "valid mask id outside valid graph";
  }
  if (b.t1 != b.ordered[b.train_count].timestamp || b.t2 != b.ordered[b.train_count + b.valid_count].timestamp) {
    return "boundaries do not sit at the cut positions";
  }
  return {};
}

}  // namespace testutil
