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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oes/experiment.hpp"

namespace oes {

namespace detail {

inline nlohmann::json scores_to_json(const Scores& s) {
  return {{"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}, {"tn", s.tn},
          {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

inline Scores scores_from_json(const nlohmann::json& j) {
  Scores s;
  s.tp = j.at("tp");
  s.fp = j.at("fp");
  s.fn = j.at("fn");
  s.tn = j.at("tn");
  s.precision = j.at("precision");
  s.recall = j.at("recall");
  s.f1 = j.at("f1");
  return s;
}

inline nlohmann::json aggregate_to_json(const Aggregate& a) { return {{"mean", a.mean}, {"std", a.stddev}}; }

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
  if (!os) throw ConfigError("write failed for " + path.string());
}

}  // namespace detail

/// Deterministic part of the reports: everything except wall times.
inline nlohmann::json reports_to_json(const std::vector<MetricsReport>& reports) {
  nlohmann::json out = {{"format", "oesgnn-report"}, {"version", 1}, {"reports", nlohmann::json::array()}};
  for (const auto& r : reports) {
    nlohmann::json jr = {{"label", r.label}, {"config", r.config}, {"epochs_total", r.epochs_total},
                         {"variants", nlohmann::json::array()}};
    for (const auto& v : r.variants) {
      nlohmann::json jv = {{"name", v.name},
                           {"oes", v.oes},
                           {"f1", detail::aggregate_to_json(v.f1())},
                           {"precision", detail::aggregate_to_json(v.precision())},
                           {"recall", detail::aggregate_to_json(v.recall())},
                           {"seeds", nlohmann::json::array()}};
      for (const auto& s : v.seeds) {
        jv["seeds"].push_back({{"seed", s.seed},
                               {"valid", detail::scores_to_json(s.valid)},
                               {"test", detail::scores_to_json(s.test)},
                               {"train_loss", s.train_loss},
                               {"test_loss", s.test_loss},
                               {"edges_used", s.edges_used},
                               {"dropped", s.dropped},
                               {"eligible", s.eligible},
                               {"threshold", s.thresholds},
                               {"expected_drop", s.expected_drop}});
      }
      jr["variants"].push_back(std::move(jv));
    }
    out["reports"].push_back(std::move(jr));
  }
  return out;
}

/// Wall-time part of the reports.
inline nlohmann::json timings_to_json(const std::vector<MetricsReport>& reports) {
  nlohmann::json out = {{"format", "oesgnn-timings"}, {"version", 1}, {"reports", nlohmann::json::array()}};
  for (const auto& r : reports) {
    nlohmann::json jr = {{"label", r.label}, {"variants", nlohmann::json::array()}};
    for (const auto& v : r.variants) {
      nlohmann::json jv = {{"name", v.name},
                           {"minutes", detail::aggregate_to_json(v.minutes())},
                           {"seeds", nlohmann::json::array()}};
      for (const auto& s : v.seeds) {
        jv["seeds"].push_back({{"seed", s.seed}, {"total_minutes", s.total_minutes}, {"epoch_seconds", s.epoch_seconds}});
      }
      jr["variants"].push_back(std::move(jv));
    }
    out["reports"].push_back(std::move(jr));
  }
  return out;
}

/// Inverse of reports_to_json, with timings merged in when given.
inline std::vector<MetricsReport> reports_from_json(const nlohmann::json& j,
                                                    const nlohmann::json* timings = nullptr) {
  if (j.value("format", "") != "oesgnn-report") throw ParseError("not an oesgnn report");
  std::vector<MetricsReport> out;
  for (const auto& jr : j.at("reports")) {
    MetricsReport r;
    r.label = jr.at("label");
    r.config = jr.at("config");
    r.epochs_total = jr.at("epochs_total");
    for (const auto& jv : jr.at("variants")) {
      VariantReport v;
      v.name = jv.at("name");
      v.oes = jv.at("oes");
      for (const auto& js : jv.at("seeds")) {
        SeedResult s;
        s.seed = js.at("seed");
        s.valid = detail::scores_from_json(js.at("valid"));
        s.test = detail::scores_from_json(js.at("test"));
        s.train_loss = js.at("train_loss").get<std::vector<double>>();
        s.test_loss = js.at("test_loss").get<std::vector<double>>();
        s.edges_used = js.at("edges_used").get<std::vector<std::size_t>>();
        s.dropped = js.at("dropped").get<std::vector<std::size_t>>();
        s.eligible = js.at("eligible").get<std::vector<std::size_t>>();
        s.thresholds = js.at("threshold").get<std::vector<double>>();
        s.expected_drop = js.at("expected_drop").get<std::vector<double>>();
        v.seeds.push_back(std::move(s));
      }
      r.variants.push_back(std::move(v));
    }
    out.push_back(std::move(r));
  }
  if (timings) {
    const auto& tr = timings->at("reports");
    if (tr.size() != out.size()) throw ParseError("timings do not match the report");
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& tv = tr[i].at("variants");
      if (tv.size() != out[i].variants.size()) throw ParseError("timings do not match the report");
      for (std::size_t k = 0; k < tv.size(); ++k) {
        auto& seeds = out[i].variants[k].seeds;
        const auto& ts = tv[k].at("seeds");
        if (ts.size() != seeds.size()) throw ParseError("timings do not match the report");
        for (std::size_t s = 0; s < seeds.size(); ++s) {
          seeds[s].total_minutes = ts[s].at("total_minutes");
          seeds[s].epoch_seconds = ts[s].at("epoch_seconds").get<std::vector<double>>();
        }
      }
    }
  }
  return out;
}

/// One row per (report, variant, seed).
/// Columns: label,variant,seed,test_precision,test_recall,test_f1,
/// valid_precision,valid_recall,valid_f1,final_train_loss,final_test_loss,final_edges
inline std::string reports_to_csv(const std::vector<MetricsReport>& reports) {
  std::string out =
      "label,variant,seed,test_precision,test_recall,test_f1,valid_precision,valid_recall,valid_f1,"
      "final_train_loss,final_test_loss,final_edges\n";
  using detail::num;
  for (const auto& r : reports) {
    for (const auto& v : r.variants) {
      for (const auto& s : v.seeds) {
        out += r.label + ',' + v.name + ',' + std::to_string(s.seed) + ',' + num(s.test.precision) + ',' +
               num(s.test.recall) + ',' + num(s.test.f1) + ',' + num(s.valid.precision) + ',' +
               num(s.valid.recall) + ',' + num(s.valid.f1) + ',' +
               (s.train_loss.empty() ? "" : num(s.train_loss.back())) + ',' +
               (s.test_loss.empty() ? "" : num(s.test_loss.back())) + ',' +
               (s.edges_used.empty() ? "" : std::to_string(s.edges_used.back())) + '\n';
      }
    }
  }
  return out;
}

/// Columns: label,variant,seed,epoch,train_loss,test_loss,edges_used,
/// dropped,eligible,threshold,expected_drop
inline std::string curves_to_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "label,variant,seed,epoch,train_loss,test_loss,edges_used,dropped,eligible,threshold,expected_drop\n";
  using detail::num;
  for (const auto& r : reports) {
    for (const auto& v : r.variants) {
      for (const auto& s : v.seeds) {
        for (std::size_t e = 0; e < s.train_loss.size(); ++e) {
          out += r.label + ',' + v.name + ',' + std::to_string(s.seed) + ',' + std::to_string(e + 1) + ',' +
                 num(s.train_loss[e]) + ',' + num(s.test_loss[e]) + ',' + std::to_string(s.edges_used[e]) +
                 ',' + std::to_string(s.dropped[e]) + ',' + std::to_string(s.eligible[e]) + ',' +
                 num(s.thresholds[e]) + ',' + num(s.expected_drop[e]) + '\n';
        }
      }
    }
  }
  return out;
}

/// Columns: label,variant,seeds,f1_mean,f1_std,precision_mean,precision_std,
/// recall_mean,recall_std
inline std::string summary_to_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "label,variant,seeds,f1_mean,f1_std,precision_mean,precision_std,recall_mean,recall_std\n";
  using detail::num;
  for (const auto& r : reports) {
    for (const auto& v : r.variants) {
      auto f = v.f1(), p = v.precision(), rc = v.recall();
      out += r.label + ',' + v.name + ',' + std::to_string(v.seeds.size()) + ',' + num(f.mean) + ',' +
             num(f.stddev) + ',' + num(p.mean) + ',' + num(p.stddev) + ',' + num(rc.mean) + ',' +
             num(rc.stddev) + '\n';
    }
  }
  return out;
}

/// Writes report.json, report.csv, summary.csv and curves.csv (all
/// deterministic) plus timings.json (wall times) into `dir`.
inline void emit_report(const std::vector<MetricsReport>& reports, const std::filesystem::path& dir) {
  if (reports.empty()) throw ConfigError("emit_report: no reports");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
  detail::write_text(dir / "report.json", reports_to_json(reports).dump(2) + "\n");
  detail::write_text(dir / "report.csv", reports_to_csv(reports));
  detail::write_text(dir / "summary.csv", summary_to_csv(reports));
  detail::write_text(dir / "curves.csv", curves_to_csv(reports));
  detail::write_text(dir / "timings.json", timings_to_json(reports).dump(2) + "\n");
}

inline std::vector<MetricsReport> load_reports(const std::filesystem::path& dir) {
  auto read = [&](const char* name, bool required) -> std::optional<nlohmann::json> {
    std::ifstream is(dir / name);
    if (!is) {
      if (required) throw ConfigError("cannot open " + (dir / name).string());
      return std::nullopt;
    }
    try {
      return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError((dir / name).string() + ": " + e.what());
    }
  };
  auto report = read("report.json", true);
  auto timings = read("timings.json", false);
  return reports_from_json(*report, timings ? &*timings : nullptr);
}

}  // namespace oes
