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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oes/bundle_io.hpp"
#include "oes/config.hpp"
#include "oes/data.hpp"
#include "oes/diagnose.hpp"
#include "oes/experiment.hpp"
#include "oes/nn.hpp"
#include "oes/report.hpp"

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<bool> oes;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw oes::ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

oes::RunConfig resolve_config(const Options& o) {
  oes::RunConfig cfg;
  if (!o.config_path.empty()) cfg = oes::parse_config(read_file(o.config_path));
  for (const auto& kv : o.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw oes::ConfigError("--set expects key=value, got '" + kv + "'");
    oes::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.oes) {
    if (*o.oes && !cfg.oes) cfg.oes = oes::OesConfig{};
    if (!*o.oes) cfg.oes.reset();
    cfg.compare_oes = false;
  }
  cfg.validate();
  return cfg;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw oes::ConfigError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const oes::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const oes::ParseError*>(&e)) return "parse";
  if (dynamic_cast<const oes::GraphError*>(&e)) return "graph";
  if (dynamic_cast<const oes::ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const oes::NonFiniteError*>(&e)) return "non_finite";
  if (dynamic_cast<const oes::RunError*>(&e)) return "run";
  if (dynamic_cast<const oes::IndexError*>(&e)) return "index";
  return "internal";
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "key = value run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "extra key=value settings, applied after --config");
  cmd->add_option("--seed", o.seed, "run a single seed");
  cmd->add_flag("--oes,!--no-oes", o.oes, "enable or disable one-side edge sampling");
  cmd->add_option("--out", o.out, "output path")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-side edge sampling for GNN edge classification"};
  app.require_subcommand(1);

  Options o;
  oes::data::SynthConfig synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic transaction CSV");
  synth_cmd->add_option("--out", o.out, "CSV file to write")->required();
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--accounts", synth.accounts, "number of accounts");
  synth_cmd->add_option("--transactions", synth.transactions, "number of transactions");
  synth_cmd->add_option("--illicit-ratio", synth.illicit_ratio, "fraction of laundering transactions");
  synth_cmd->add_option("--days", synth.days, "time span in days");

  std::string input;
  std::vector<std::string> schema_overrides;
  auto* ingest_cmd = app.add_subcommand("ingest", "parse, split and encode a CSV into a bundle directory");
  ingest_cmd->add_option("--input", input, "transaction CSV")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--schema", schema_overrides, "field=Column header overrides");
  ingest_cmd->add_option("--out", o.out, "bundle directory")->required();

  bool compare = false;
  auto* train_cmd = app.add_subcommand("train", "train and evaluate over the configured seeds");
  add_common(train_cmd, o);
  train_cmd->add_flag("--compare", compare, "run with and without OES for every seed");

  std::string axis;
  std::vector<double> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "one run per value of a single axis");
  add_common(sweep_cmd, o);
  sweep_cmd->add_option("--axis", axis, "depth, percentile, ratio (percent) or epochs")->required();
  sweep_cmd->add_option("--values", values, "axis values")->required()->delimiter(',');
  sweep_cmd->add_flag("--compare", compare, "run with and without OES for every point");

  std::vector<std::size_t> depths{2, 4, 8, 16};
  double epsilon = 1e-3;
  auto* diag_cmd = app.add_subcommand("diagnose", "spectral report of the training graph per depth");
  add_common(diag_cmd, o);
  diag_cmd->add_option("--depths", depths, "model depths")->delimiter(',');
  diag_cmd->add_option("--epsilon", epsilon, "smoothing tolerance");
  std::size_t train_epochs = 0;
  diag_cmd->add_option("--train-epochs", train_epochs, "also report the graph after this many OES epochs");

  std::vector<std::string> inputs;
  auto* report_cmd = app.add_subcommand("report", "merge report directories and re-emit");
  report_cmd->add_option("--in", inputs, "report directories")->required();
  report_cmd->add_option("--out", o.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*synth_cmd) {
      std::string csv = oes::data::synthesize_dataset(synth);
      std::ofstream os(o.out, std::ios::binary);
      if (!os) throw oes::ConfigError("cannot write " + o.out);
      os << csv;
    } else if (*ingest_cmd) {
      oes::data::Schema schema;
      for (const auto& kv : schema_overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw oes::ConfigError("--schema expects field=Column, got '" + kv + "'");
        schema.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      auto bundle = oes::data::build_bundle(read_file(input), schema);
      oes::data::save_bundle(bundle, o.out);
      std::cout << nlohmann::json{{"nodes", bundle.node_count},
                                  {"train", bundle.train_count},
                                  {"valid", bundle.valid_count},
                                  {"test", bundle.test_count}}
                       .dump()
                << std::endl;
    } else if (*train_cmd) {
      oes::RunConfig cfg = resolve_config(o);
      if (compare) cfg.compare_oes = true;
      auto bundle = oes::load_dataset(cfg.data);
      auto report = oes::run_experiment(cfg, bundle);
      oes::emit_report({report}, o.out);
      std::cout << oes::summary_to_csv({report});
    } else if (*sweep_cmd) {
      oes::RunConfig cfg = resolve_config(o);
      if (compare) cfg.compare_oes = true;
      auto bundle = oes::load_dataset(cfg.data);
      auto reports = oes::sweep(cfg, oes::parse_sweep_axis(axis), values, bundle);
      oes::emit_report(reports, o.out);
      std::cout << oes::summary_to_csv(reports);
    } else if (*diag_cmd) {
      oes::RunConfig cfg = resolve_config(o);
      auto bundle = oes::load_dataset(cfg.data);
      auto rows = oes::diagnose_over_training(cfg, bundle.train_graph, depths, epsilon, cfg.seeds.front(),
                                              train_epochs);
      nlohmann::json j = nlohmann::json::array();
      for (const auto& d : rows) j.push_back(oes::diagnosis_to_json(d));
      write_json(fs::path(o.out) / "diagnose.json", j);
      std::ofstream(fs::path(o.out) / "diagnose.csv") << oes::diagnoses_to_csv(rows);
      std::cout << oes::diagnoses_to_csv(rows);
    } else if (*report_cmd) {
      std::vector<oes::MetricsReport> merged;
      for (const auto& dir : inputs) {
        auto part = oes::load_reports(dir);
        merged.insert(merged.end(), part.begin(), part.end());
      }
      oes::emit_report(merged, o.out);
      std::cout << oes::summary_to_csv(merged);
    }
  } catch (const std::exception& e) {
    return fail(error_kind(e), e.what(), 1);
  }
  return 0;
}
