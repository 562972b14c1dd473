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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oes/common.hpp"
#include "oes/multigraph.hpp"

namespace oes::data {

struct TransactionRecord {
  std::int64_t timestamp = 0;  // seconds since 1970-01-01 UTC
  std::string src_bank, src_account;
  std::string dst_bank, dst_account;
  double amount_received = 0.0;
  std::string receiving_currency;
  double amount = 0.0;  // amount paid
  std::string currency; // payment currency
  std::string payment_format;
  Label label = Label::negative;
  std::size_t src_node = 0;
  std::size_t dst_node = 0;
  std::size_t row = 0;  // 1-based data row in the source file

  friend bool operator==(const TransactionRecord&, const TransactionRecord&) = default;
};

struct Transactions {
  std::vector<TransactionRecord> records;
  std::vector<std::string> accounts;  // node id -> "bank/account"
};

/// Column names for each field; an empty name marks an absent column.
/// Repeated header names are disambiguated as "Name", "Name.1", ...
struct Schema {
  std::string timestamp = "Timestamp";
  std::string src_bank = "From Bank";
  std::string src_account = "Account";
  std::string dst_bank = "To Bank";
  std::string dst_account = "Account.1";
  std::string amount_received = "Amount Received";
  std::string receiving_currency = "Receiving Currency";
  std::string amount = "Amount Paid";
  std::string currency = "Payment Currency";
  std::string payment_format = "Payment Format";
  std::string label = "Is Laundering";

  /// Applies "field=Column" overrides.
  void set(const std::string& field, const std::string& column) {
    std::map<std::string, std::string*> fields{{"timestamp", &timestamp},
                                               {"src_bank", &src_bank},
                                               {"src_account", &src_account},
                                               {"dst_bank", &dst_bank},
                                               {"dst_account", &dst_account},
                                               {"amount_received", &amount_received},
                                               {"receiving_currency", &receiving_currency},
                                               {"amount", &amount},
                                               {"currency", &currency},
                                               {"payment_format", &payment_format},
                                               {"label", &label}};
    auto it = fields.find(field);
    if (it == fields.end()) throw ConfigError("unknown schema field '" + field + "'");
    *it->second = column;
  }
};

// ---------------------------------------------------------------------------
// Time helpers

/// Days since 1970-01-01 for a proleptic Gregorian date.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilTime {
  std::int64_t year;
  unsigned month, day, hour, minute, second;
};

constexpr CivilTime civil_from_seconds(std::int64_t t) {
  std::int64_t days = t >= 0 ? t / 86400 : -((-t + 86399) / 86400);
  std::int64_t secs = t - days * 86400;
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const auto doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d, static_cast<unsigned>(secs / 3600),
          static_cast<unsigned>(secs % 3600 / 60), static_cast<unsigned>(secs % 60)};
}

/// "YYYY/MM/DD HH:MM" (":SS" appended when nonzero).
inline std::string format_timestamp(std::int64_t t) {
  CivilTime c = civil_from_seconds(t);
  char buf[40];
  if (c.second == 0) {
    std::snprintf(buf, sizeof buf, "%04lld/%02u/%02u %02u:%02u", static_cast<long long>(c.year),
                  c.month, c.day, c.hour, c.minute);
  } else {
    std::snprintf(buf, sizeof buf, "%04lld/%02u/%02u %02u:%02u:%02u",
                  static_cast<long long>(c.year), c.month, c.day, c.hour, c.minute, c.second);
  }
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && std::isfinite(out);
}

/// Splits one CSV line; double quotes group fields and "" escapes a quote.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

}  // namespace detail

/// Accepts integer seconds, "YYYY/MM/DD HH:MM[:SS]" and ISO-8601
/// "YYYY-MM-DD[T ]HH:MM[:SS][Z]".
inline std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  text = detail::trim(text);
  if (text.empty()) return std::nullopt;
  std::int64_t seconds = 0;
  if (detail::parse_int(text, seconds)) return seconds;
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() < 16) return std::nullopt;
  char sep = text[4];
  if ((sep != '/' && sep != '-') || text[7] != sep || (text[10] != ' ' && text[10] != 'T') ||
      text[13] != ':') {
    return std::nullopt;
  }
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!detail::parse_int(text.substr(0, 4), y) || !detail::parse_int(text.substr(5, 2), mo) ||
      !detail::parse_int(text.substr(8, 2), d) || !detail::parse_int(text.substr(11, 2), h) ||
      !detail::parse_int(text.substr(14, 2), mi)) {
    return std::nullopt;
  }
  if (text.size() == 19) {
    if (text[16] != ':' || !detail::parse_int(text.substr(17, 2), s)) return std::nullopt;
  } else if (text.size() != 16) {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

/// One record per data row, accounts interned to node ids in first-seen
/// order. Row numbers in errors are 1-based data rows.
inline Transactions parse_transactions(std::string_view bytes, const Schema& schema = {}) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    lines.push_back(bytes.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("missing header row");

  std::vector<std::string> header = detail::split_csv_line(lines[0]);
  std::map<std::string, std::size_t> column;
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name(detail::trim(header[i]));
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name = name.substr(3);
    int k = seen[name]++;
    column[k == 0 ? name : name + "." + std::to_string(k)] = i;
  }
  auto require = [&](const std::string& name, const char* field) -> std::size_t {
    auto it = column.find(name);
    if (name.empty() || it == column.end()) {
      throw ParseError(std::string("schema error: required column '") + name + "' (" + field +
                       ") not found in header");
    }
    return it->second;
  };
  auto optional_col = [&](const std::string& name) -> std::optional<std::size_t> {
    if (name.empty()) return std::nullopt;
    auto it = column.find(name);
    if (it == column.end()) return std::nullopt;
    return it->second;
  };
  const std::size_t c_time = require(schema.timestamp, "timestamp");
  const std::size_t c_src = require(schema.src_account, "src_account");
  const std::size_t c_dst = require(schema.dst_account, "dst_account");
  const std::size_t c_amount = require(schema.amount, "amount");
  const std::size_t c_label = require(schema.label, "label");
  const auto c_src_bank = optional_col(schema.src_bank);
  const auto c_dst_bank = optional_col(schema.dst_bank);
  const auto c_recv = optional_col(schema.amount_received);
  const auto c_recv_cur = optional_col(schema.receiving_currency);
  const auto c_cur = optional_col(schema.currency);
  const auto c_fmt = optional_col(schema.payment_format);

  Transactions out;
  std::unordered_map<std::string, std::size_t> intern;
  auto node_of = [&](const std::string& bank, const std::string& account) {
    std::string key = bank + "/" + account;
    auto [it, inserted] = intern.emplace(key, out.accounts.size());
    if (inserted) out.accounts.push_back(key);
    return it->second;
  };

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    std::size_t row = li;
    auto fields = detail::split_csv_line(lines[li]);
    auto get = [&](std::size_t c) -> std::string {
      if (c >= fields.size()) {
        throw ParseError("row " + std::to_string(row) + ": expected at least " +
                         std::to_string(c + 1) + " fields, found " + std::to_string(fields.size()));
      }
      return std::string(detail::trim(fields[c]));
    };
    TransactionRecord r;
    r.row = row;
    auto ts = parse_timestamp(get(c_time));
    if (!ts) throw ParseError("row " + std::to_string(row) + ": malformed timestamp '" + get(c_time) + "'");
    r.timestamp = *ts;
    r.src_bank = c_src_bank ? get(*c_src_bank) : "";
    r.dst_bank = c_dst_bank ? get(*c_dst_bank) : "";
    r.src_account = get(c_src);
    r.dst_account = get(c_dst);
    if (!detail::parse_double(get(c_amount), r.amount) || r.amount < 0.0) {
      throw ParseError("row " + std::to_string(row) + ": malformed amount '" + get(c_amount) + "'");
    }
    r.amount_received = r.amount;
    if (c_recv && !detail::parse_double(get(*c_recv), r.amount_received)) {
      throw ParseError("row " + std::to_string(row) + ": malformed amount '" + get(*c_recv) + "'");
    }
    r.currency = c_cur ? get(*c_cur) : "";
    r.receiving_currency = c_recv_cur ? get(*c_recv_cur) : r.currency;
    r.payment_format = c_fmt ? get(*c_fmt) : "";
    std::string lab = get(c_label);
    if (lab == "1") {
      r.label = Label::positive;
    } else if (lab == "0") {
      r.label = Label::negative;
    } else {
      throw ParseError("row " + std::to_string(row) + ": label must be 0 or 1, got '" + lab + "'");
    }
    r.src_node = node_of(r.src_bank, r.src_account);
    r.dst_node = node_of(r.dst_bank, r.dst_account);
    out.records.push_back(std::move(r));
  }
  return out;
}

inline std::string format_amount(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Writes records in the default (IBM AML) column layout.
inline std::string serialize_transactions(const std::vector<TransactionRecord>& records) {
  std::string out =
      "Timestamp,From Bank,Account,To Bank,Account,Amount Received,Receiving Currency,"
      "Amount Paid,Payment Currency,Payment Format,Is Laundering\n";
  for (const auto& r : records) {
    out += format_timestamp(r.timestamp);
    for (const std::string* f : {&r.src_bank, &r.src_account, &r.dst_bank, &r.dst_account}) {
      out += ',';
      out += *f;
    }
    out += ',' + format_amount(r.amount_received) + ',' + r.receiving_currency + ',' +
           format_amount(r.amount) + ',' + r.currency + ',' + r.payment_format + ',' +
           (r.label == Label::positive ? "1" : "0") + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Temporal split

struct EncoderState {
  double amount_mean = 0.0, amount_std = 0.0;  // of log(1 + amount)
  std::int64_t time_min = 0, time_range = 0;
  std::vector<std::string> currencies;  // one-hot order; OTHER comes last
  std::vector<std::string> formats;
  double in_mean = 0.0, in_std = 0.0;   // of log(1 + in-degree)
  double out_mean = 0.0, out_std = 0.0; // of log(1 + out-degree)

  std::size_t edge_feature_width() const { return 2 + currencies.size() + 1 + formats.size() + 1; }
  static constexpr std::size_t node_feature_width() { return 3; }
};

/// Train, validation and test graphs of one split. Edge i of every graph is
/// the i-th transaction in (timestamp, row) order, so each graph's edges
/// are a prefix of the next one's.
struct DatasetBundle {
  DirectedMultigraph train_graph, valid_graph, test_graph;
  std::vector<std::size_t> valid_eval_mask, test_eval_mask;
  std::int64_t t1 = 0, t2 = 0;
  std::size_t train_count = 0, valid_count = 0, test_count = 0;  // window sizes
  EncoderState encoder;
  std::vector<TransactionRecord> ordered;  // test-graph edge order
  std::size_t node_count = 0;
};

struct SplitRatios {
  double train = 0.6, valid = 0.2, test = 0.2;
};

inline constexpr std::size_t kMinSplitRecords = 5;

/// Stable sort by (timestamp, row); windows cut at the 60% / 80% positions.
/// Features are left empty; see encode_features.
inline DatasetBundle temporal_split(const Transactions& tx, SplitRatios ratios = {}) {
  const std::size_t n = tx.records.size();
  if (n < kMinSplitRecords) {
    throw ConfigError("temporal_split needs at least " + std::to_string(kMinSplitRecords) +
                      " records, got " + std::to_string(n));
  }
  double total = ratios.train + ratios.valid + ratios.test;
  if (!(ratios.train > 0 && ratios.valid > 0 && ratios.test > 0)) {
    throw ConfigError("split ratios must be positive");
  }
  DatasetBundle b;
  b.ordered = tx.records;
  std::stable_sort(b.ordered.begin(), b.ordered.end(), [](const auto& a, const auto& c) {
    return a.timestamp < c.timestamp || (a.timestamp == c.timestamp && a.row < c.row);
  });
  auto cut1 = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.train / total));
  auto cut2 = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * (ratios.train + ratios.valid) / total));
  cut1 = std::clamp<std::size_t>(cut1, 1, n - 2);
  cut2 = std::clamp<std::size_t>(cut2, cut1 + 1, n - 1);
  b.train_count = cut1;
  b.valid_count = cut2 - cut1;
  b.test_count = n - cut2;
  b.t1 = b.ordered[cut1].timestamp;
  b.t2 = b.ordered[cut2].timestamp;
  b.node_count = tx.accounts.size();

  auto graph_prefix = [&](std::size_t count) {
    std::vector<Edge> edges;
    std::vector<Label> labels;
    edges.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      edges.push_back({b.ordered[i].src_node, b.ordered[i].dst_node});
      labels.push_back(b.ordered[i].label);
    }
    return DirectedMultigraph::build(b.node_count, std::move(edges), Matrix(), Matrix(), std::move(labels));
  };
  b.train_graph = graph_prefix(cut1);
  b.valid_graph = graph_prefix(cut2);
  b.test_graph = graph_prefix(n);
  for (std::size_t i = cut1; i < cut2; ++i) b.valid_eval_mask.push_back(i);
  for (std::size_t i = cut2; i < n; ++i) b.test_eval_mask.push_back(i);
  return b;
}

// ---------------------------------------------------------------------------
// Feature encoding

namespace detail {

inline void mean_std(const std::vector<double>& v, double& mean, double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) stddev += (x - mean) * (x - mean);
  stddev = std::sqrt(stddev / static_cast<double>(v.size()));
}

inline double zscore(double x, double mean, double stddev) {
  return stddev > 0.0 ? (x - mean) / stddev : 0.0;
}

inline std::size_t vocab_index(const std::vector<std::string>& vocab, const std::string& s) {
  auto it = std::lower_bound(vocab.begin(), vocab.end(), s);
  return it != vocab.end() && *it == s ? static_cast<std::size_t>(it - vocab.begin()) : vocab.size();
}

}  // namespace detail

/// Fits statistics and vocabularies on the training window only.
inline EncoderState fit_encoder(const DatasetBundle& b) {
  EncoderState st;
  std::vector<double> amounts;
  std::set<std::string> currencies, formats;
  std::int64_t tmin = b.ordered[0].timestamp, tmax = tmin;
  for (std::size_t i = 0; i < b.train_count; ++i) {
    const auto& r = b.ordered[i];
    amounts.push_back(std::log1p(r.amount));
    currencies.insert(r.currency);
    formats.insert(r.payment_format);
    tmin = std::min(tmin, r.timestamp);
    tmax = std::max(tmax, r.timestamp);
  }
  detail::mean_std(amounts, st.amount_mean, st.amount_std);
  st.time_min = tmin;
  st.time_range = tmax - tmin;
  st.currencies.assign(currencies.begin(), currencies.end());
  st.formats.assign(formats.begin(), formats.end());
  std::vector<double> in_deg, out_deg;
  for (std::size_t v = 0; v < b.train_graph.node_count(); ++v) {
    if (b.train_graph.in_degree(v) + b.train_graph.out_degree(v) == 0) continue;
    in_deg.push_back(std::log1p(static_cast<double>(b.train_graph.in_degree(v))));
    out_deg.push_back(std::log1p(static_cast<double>(b.train_graph.out_degree(v))));
  }
  detail::mean_std(in_deg, st.in_mean, st.in_std);
  detail::mean_std(out_deg, st.out_mean, st.out_std);
  return st;
}

/// [z(log1p amount), time offset / train span, currency one-hot + OTHER,
///  payment-format one-hot + OTHER]
inline Eigen::RowVectorXd encode_edge(const EncoderState& st, const TransactionRecord& r) {
  Eigen::RowVectorXd f = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(st.edge_feature_width()));
  f(0) = detail::zscore(std::log1p(r.amount), st.amount_mean, st.amount_std);
  f(1) = st.time_range > 0
             ? static_cast<double>(r.timestamp - st.time_min) / static_cast<double>(st.time_range)
             : 0.0;
  Eigen::Index at = 2;
  f(at + static_cast<Eigen::Index>(detail::vocab_index(st.currencies, r.currency))) = 1.0;
  at += static_cast<Eigen::Index>(st.currencies.size() + 1);
  f(at + static_cast<Eigen::Index>(detail::vocab_index(st.formats, r.payment_format))) = 1.0;
  return f;
}

/// Fits the encoder on the training window and attaches node and edge
/// features to all three graphs. Node features come from train-graph
/// degrees: [z(log1p in), z(log1p out), 1].
inline void encode_features(DatasetBundle& b) {
  b.encoder = fit_encoder(b);
  const EncoderState& st = b.encoder;
  Matrix nodes(static_cast<Eigen::Index>(b.node_count), 3);
  for (std::size_t v = 0; v < b.node_count; ++v) {
    auto i = static_cast<Eigen::Index>(v);
    nodes(i, 0) = detail::zscore(std::log1p(static_cast<double>(b.train_graph.in_degree(v))), st.in_mean, st.in_std);
    nodes(i, 1) = detail::zscore(std::log1p(static_cast<double>(b.train_graph.out_degree(v))), st.out_mean, st.out_std);
    nodes(i, 2) = 1.0;
  }
  Matrix edges(static_cast<Eigen::Index>(b.ordered.size()), static_cast<Eigen::Index>(st.edge_feature_width()));
  for (std::size_t e = 0; e < b.ordered.size(); ++e) {
    edges.row(static_cast<Eigen::Index>(e)) = encode_edge(st, b.ordered[e]);
  }
  auto prefix = [&](std::size_t count) { return Matrix(edges.topRows(static_cast<Eigen::Index>(count))); };
  b.train_graph = b.train_graph.with_features(nodes, prefix(b.train_graph.edge_count()));
  b.valid_graph = b.valid_graph.with_features(nodes, prefix(b.valid_graph.edge_count()));
  b.test_graph = b.test_graph.with_features(nodes, edges);
}

/// parse -> split -> encode.
inline DatasetBundle build_bundle(std::string_view csv, const Schema& schema = {},
                                  SplitRatios ratios = {}) {
  DatasetBundle b = temporal_split(parse_transactions(csv, schema), ratios);
  encode_features(b);
  return b;
}

// ---------------------------------------------------------------------------
// Synthetic laundering-pattern generator

struct PatternMix {
  double cycle = 1.0;
  double fan_in = 1.0;
  double fan_out = 1.0;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t accounts = 2000;
  std::size_t transactions = 20000;
  double illicit_ratio = 0.05;
  PatternMix mix;
  std::size_t cycle_min = 3, cycle_max = 8;
  std::size_t fan_min = 3, fan_max = 8;
  std::size_t days = 10;
};

namespace detail {

inline std::string account_bank(std::size_t i) { return std::to_string(1 + (i * 37) % 211); }

inline std::string account_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "80%08X",
                static_cast<unsigned>((static_cast<std::uint64_t>(i) * 2654435761ULL) & 0xFFFFFFFFULL));
  return buf;
}

template <typename Rng>
std::size_t pick_weighted(Rng& rng, const std::vector<double>& weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double x = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (x < weights[i]) return i;
    x -= weights[i];
  }
  return weights.size() - 1;
}

struct Draft {
  std::int64_t minute;
  std::size_t src, dst;
  double amount;
  std::size_t currency, format;
  bool illicit;
};

}  // namespace detail

/// Background transfers plus planted cycles, fan-ins and fan-outs (all
/// labeled positive), time-ordered, in the default CSV layout. Same config,
/// same bytes.
inline std::string synthesize_dataset(const SynthConfig& cfg) {
  if (!(cfg.illicit_ratio >= 0.0 && cfg.illicit_ratio <= 1.0)) {
    throw ConfigError("illicit_ratio must lie in [0, 1]");
  }
  if (cfg.accounts < 2) throw ConfigError("synthetic data needs at least 2 accounts");
  if (cfg.days == 0) throw ConfigError("synthetic data needs a positive day span");
  const auto illicit = static_cast<std::size_t>(std::llround(cfg.illicit_ratio * static_cast<double>(cfg.transactions)));
  const double mix_total = cfg.mix.cycle + cfg.mix.fan_in + cfg.mix.fan_out;
  if (illicit > 0) {
    if (!(mix_total > 0.0) || cfg.mix.cycle < 0 || cfg.mix.fan_in < 0 || cfg.mix.fan_out < 0) {
      throw ConfigError("pattern mix weights must be non-negative with a positive sum");
    }
    if (cfg.cycle_min < 2 || cfg.cycle_min > cfg.cycle_max || cfg.fan_min < 1 || cfg.fan_min > cfg.fan_max) {
      throw ConfigError("invalid pattern size range");
    }
    std::size_t need = std::max(cfg.mix.cycle > 0 ? cfg.cycle_max : 0, cfg.fan_max + 1);
    if (need > cfg.accounts) {
      throw ConfigError("infeasible patterns: need " + std::to_string(need) +
                        " distinct accounts, have " + std::to_string(cfg.accounts));
    }
  }

  const std::vector<std::string> currencies{"Euro", "UK Pound", "US Dollar", "Yen", "Yuan"};
  const std::vector<double> currency_w{0.2, 0.1, 0.5, 0.1, 0.1};
  const std::vector<std::string> formats{"ACH", "Bitcoin", "Cash", "Cheque", "Credit Card", "Reinvestment", "Wire"};
  const std::vector<double> background_fmt_w{0.15, 0.01, 0.15, 0.25, 0.30, 0.04, 0.10};
  const std::vector<double> illicit_fmt_w{0.50, 0.15, 0.10, 0.05, 0.0, 0.0, 0.20};
  const std::int64_t span = static_cast<std::int64_t>(cfg.days) * 1440;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> any_account(0, cfg.accounts - 1);
  std::vector<detail::Draft> drafts;
  drafts.reserve(cfg.transactions);

  auto distinct_accounts = [&](std::size_t k) {
    std::vector<std::size_t> picked;
    std::set<std::size_t> used;
    while (picked.size() < k) {
      std::size_t a = any_account(rng);
      if (used.insert(a).second) picked.push_back(a);
    }
    return picked;
  };

  std::size_t remaining = illicit;
  const std::vector<double> mix_w{cfg.mix.cycle, cfg.mix.fan_in, cfg.mix.fan_out};
  while (remaining > 0) {
    std::size_t kind = detail::pick_weighted(rng, mix_w);
    std::size_t lo = kind == 0 ? cfg.cycle_min : cfg.fan_min;
    std::size_t hi = kind == 0 ? cfg.cycle_max : cfg.fan_max;
    std::size_t size = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    if (size > remaining) size = remaining;
    if (kind == 0 && size < 2) kind = 2;  // too small for a cycle; plant a 1-edge fan-out

    double base = std::exp(std::uniform_real_distribution<double>(std::log(5000.0), std::log(50000.0))(rng));
    std::size_t currency = detail::pick_weighted(rng, currency_w);
    std::int64_t t = std::uniform_int_distribution<std::int64_t>(0, std::max<std::int64_t>(0, span - 1440))(rng);
    auto step = [&] { return std::uniform_int_distribution<std::int64_t>(5, 180)(rng); };
    auto fmt = [&] { return detail::pick_weighted(rng, illicit_fmt_w); };

    if (kind == 0) {
      auto ring = distinct_accounts(size);
      double amount = base;
      for (std::size_t i = 0; i < size; ++i) {
        drafts.push_back({t, ring[i], ring[(i + 1) % size], amount, currency, fmt(), true});
        amount *= std::uniform_real_distribution<double>(0.93, 0.99)(rng);
        t += step();
      }
    } else {
      auto group = distinct_accounts(size + 1);
      for (std::size_t i = 1; i <= size; ++i) {
        double amount = base / static_cast<double>(size) * std::uniform_real_distribution<double>(0.9, 1.1)(rng);
        std::size_t src = kind == 1 ? group[i] : group[0];
        std::size_t dst = kind == 1 ? group[0] : group[i];
        drafts.push_back({t, src, dst, amount, currency, fmt(), true});
        t += step();
      }
    }
    remaining -= size;
  }

  std::lognormal_distribution<double> background_amount(6.0, 1.5);
  std::uniform_int_distribution<std::int64_t> any_minute(0, span - 1);
  for (std::size_t i = illicit; i < cfg.transactions; ++i) {
    std::size_t src = any_account(rng);
    std::size_t fmt = detail::pick_weighted(rng, background_fmt_w);
    std::size_t dst = src;
    if (formats[fmt] != "Reinvestment") {
      while (dst == src) dst = any_account(rng);
    }
    drafts.push_back({any_minute(rng), src, dst, background_amount(rng),
                      detail::pick_weighted(rng, currency_w), fmt, false});
  }

  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const auto& a, const auto& b) { return a.minute < b.minute; });
  const std::int64_t epoch0 = days_from_civil(2022, 9, 1) * 86400;
  std::vector<TransactionRecord> records;
  records.reserve(drafts.size());
  for (const auto& d : drafts) {
    TransactionRecord r;
    r.timestamp = epoch0 + d.minute * 60;
    r.src_bank = detail::account_bank(d.src);
    r.src_account = detail::account_id(d.src);
    r.dst_bank = detail::account_bank(d.dst);
    r.dst_account = detail::account_id(d.dst);
    r.amount = r.amount_received = std::round(d.amount * 100.0) / 100.0;
    r.currency = r.receiving_currency = currencies[d.currency];
    r.payment_format = formats[d.format];
    r.label = d.illicit ? Label::positive : Label::negative;
    records.push_back(std::move(r));
  }
  return serialize_transactions(records);
}

}  // namespace oes::data
