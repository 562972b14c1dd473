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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. `acceptance 3 7` runs only criteria 3 and 7.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "data_cases.hpp"
#include "layer_cases.hpp"
#include "oes/experiment.hpp"
#include "oes/report.hpp"
#include "oracles.hpp"
#include "sampler_cases.hpp"
#include "spectral_cases.hpp"

using namespace oes;
using clock_type = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string details;
};

double seconds_since(clock_type::time_point t) {
  return std::chrono::duration<double>(clock_type::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Verdict oes_exactness() {
  std::mt19937_64 rng(101);
  auto start = clock_type::now();
  std::size_t bad = 0, dropped = 0;
  std::string first;
  for (int i = 0; i < 500; ++i) {
    auto inst = testutil::random_sampler_instance(rng);
    auto out = apply_oes(inst.graph, inst.logits, inst.labels, inst.config, inst.epoch);
    dropped += out.dropped_ids.size();
    auto why = testutil::sampler_violation(inst, out);
    if (!why.empty() && bad++ == 0) first = "instance " + std::to_string(i) + ": " + why;
  }
  double secs = seconds_since(start);
  return {bad == 0 && secs < 10.0, "500 instances, " + std::to_string(dropped) + " edges dropped, " +
                                        std::to_string(bad) + " violations, " + fmt("%.2f s", secs) +
                                        (first.empty() ? "" : "; " + first)};
}

Verdict drop_rate() {
  const std::size_t m = 10000;
  std::vector<Edge> list;
  for (std::size_t e = 0; e < m; ++e) list.push_back({e % 97, (e * 31 + 5) % 97});
  auto g = DirectedMultigraph::from_edges(97, list);
  Matrix logits = Matrix::Zero(static_cast<Eigen::Index>(m), 2);
  for (std::size_t e = 0; e < m; ++e) logits(static_cast<Eigen::Index>(e), 1) = 1e-3 * static_cast<double>(e);
  std::vector<Label> labels(m, Label::positive);
  OesConfig cfg;
  cfg.percentile = 99.0;
  cfg.sample_ratio = 0.10;
  auto out = apply_oes(g, logits, labels, cfg, 1);
  bool all_correct = true;
  for (auto e : out.eligible_ids) all_correct = all_correct && logits(static_cast<Eigen::Index>(e), 1) > logits(static_cast<Eigen::Index>(e), 0);
  double rate = static_cast<double>(m - out.retained_graph.edge_count()) / static_cast<double>(m);
  return {all_correct && rate == 0.001,
          "|E| = 10000, |E'| = " + std::to_string(out.eligible_ids.size()) + ", |D| = " +
              std::to_string(out.dropped_ids.size()) + ", rate " + fmt("%.17g", rate) + ", closed form " +
              fmt("%.6g", closed_form_edge_count(cfg, m) / static_cast<double>(m))};
}

Verdict percentile_oracle() {
  std::mt19937_64 rng(103);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::size_t n = 1 + rng() % 200;
    std::vector<double> c(n);
    bool coarse = rng() % 2;
    for (auto& v : c) v = coarse ? static_cast<double>(rng() % 12) / 11.0 : std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    double p = rng() % 5 == 0 ? static_cast<double>(rng() % 101) : std::uniform_real_distribution<double>(0.0, 100.0)(rng);
    bad += percentile_threshold(c, p) != oracle::percentile(c, p);
  }
  return {bad == 0, "1000 multisets, " + std::to_string(bad) + " mismatches"};
}

Verdict gradients() {
  std::mt19937_64 rng(104);
  auto start = clock_type::now();
  struct Family {
    std::string name;
    std::function<testutil::GradCheck()> run;
  };
  std::vector<Family> families{
      {"gin", [&] { return testutil::gin_gradient_case(rng, false); }},
      {"gin(learnable eps)", [&] { return testutil::gin_gradient_case(rng, true); }},
      {"ego(exact)", [&] { return testutil::ego_gradient_case(rng, true); }},
      {"ego(self-centered)", [&] { return testutil::ego_gradient_case(rng, false); }},
      {"gn_block", [&] { return testutil::gn_gradient_case(rng); }},
      {"readout", [&] { return testutil::readout_gradient_case(rng); }},
  };
  double worst = 0.0;
  std::string detail;
  for (auto& f : families) {
    double family_worst = 0.0;
    for (int i = 0; i < 20; ++i) family_worst = std::max(family_worst, f.run().max_rel);
    worst = std::max(worst, family_worst);
    detail += f.name + " " + fmt("%.2e", family_worst) + ", ";
  }
  double secs = seconds_since(start);
  return {worst <= 1e-4 && secs < 120.0, detail + "20 instances each, " + fmt("%.1f s", secs)};
}

Verdict lemma1() {
  std::mt19937_64 rng(105);
  auto s = testutil::lemma_sweep(rng, 100);
  return {s.violations == 0 && s.max_lambda_error <= 1e-9 && s.max_resistance_error <= 1e-9,
          std::to_string(s.graphs) + " graphs, " + std::to_string(s.pairs) + " pairs, " +
              std::to_string(s.violations) + " violations, min slack " + fmt("%.3g", s.min_slack) +
              ", library vs oracle lambda " + fmt("%.1e", s.max_lambda_error) + ", R " +
              fmt("%.1e", s.max_resistance_error)};
}

Verdict theorem() {
  std::mt19937_64 rng(106);
  auto s = testutil::theorem_sweep(rng, 100);
  bool a = s.resistance_violations == 0, b = s.component_violations == 0, c = s.bound_violations == 0;
  return {a && b && c && s.verifier_disagreements == 0,
          std::to_string(s.graphs) + " graphs, " + std::to_string(s.steps) + " removal steps, " +
              std::to_string(s.tracked_pairs) + " tracked pair-steps; (a) resistance decreases " +
              std::to_string(s.resistance_violations) + "; (b) component decreases " +
              std::to_string(s.component_violations) + "; (c) Lemma-1 bound increases " +
              std::to_string(s.bound_violations) + " (max rise " + fmt("%.3g", s.max_bound_rise) +
              "), decreases " + std::to_string(s.bound_drops) + ", fixed-degree bound decreases " +
              std::to_string(s.fixed_degree_bound_drops) + "; lambda rose in " + std::to_string(s.lambda_rises) +
              " steps (reported only); verifier disagreements " + std::to_string(s.verifier_disagreements)};
}

Verdict contraction() {
  std::mt19937_64 rng(107);
  auto s = testutil::contraction_sweep(rng, 20);
  return {s.violations == 0 && s.max_library_error <= 1e-9,
          std::to_string(s.graphs) + " graphs, " + std::to_string(s.checks) + " (graph, k) checks, " +
              std::to_string(s.violations) + " violations on " + std::to_string(s.violating_graphs) +
              " graphs (max excess " + fmt("%.3g", s.max_excess) + "); graphs with |lambda_min| > lambda_2: " +
              std::to_string(s.negative_dominated) + ", of which violating " +
              std::to_string(s.violating_negative_dominated)};
}

Verdict expressivity() {
  double worst_spread = 0.0, smallest_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto p = testutil::expressivity_probe(seed);
    for (double s : p.gin_spread) worst_spread = std::max(worst_spread, s);
    smallest_gap = std::min(smallest_gap, p.ego_gap);
  }
  return {worst_spread <= 1e-9 && smallest_gap > 1e-9,
          "5 seeds; GIN depth 1-4 max node spread " + fmt("%.1e", worst_spread) + ", exact ego min center gap " +
              fmt("%.3g", smallest_gap)};
}

Verdict split_invariants() {
  std::mt19937_64 rng(109);
  std::size_t bad = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    std::size_t rows = 5 + rng() % 400;
    auto tx = data::parse_transactions(testutil::random_csv(rng, rows));
    auto b = data::temporal_split(tx);
    auto why = testutil::split_violation(tx, b);
    if (!why.empty() && bad++ == 0) first = "set " + std::to_string(i) + ": " + why;
  }
  return {bad == 0, "200 record sets, " + std::to_string(bad) + " violations" + (first.empty() ? "" : "; " + first)};
}

Verdict f1_oracle() {
  std::mt19937_64 rng(110);
  std::size_t bad = 0, zero_tp = 0;
  std::normal_distribution<double> z;
  for (int i = 0; i < 1000; ++i) {
    std::size_t n = 1 + rng() % 80;
    Matrix logits(static_cast<Eigen::Index>(n), 2);
    std::vector<Label> labels(n);
    std::vector<std::size_t> mask(n);
    std::vector<int> p(n), a(n);
    int regime = static_cast<int>(rng() % 4);  // 0: no predicted positives, 1: no actual positives
    for (std::size_t k = 0; k < n; ++k) {
      auto r = static_cast<Eigen::Index>(k);
      logits(r, 0) = z(rng);
      logits(r, 1) = regime == 0 ? logits(r, 0) - 1.0 : z(rng);
      labels[k] = regime != 1 && rng() % 3 == 0 ? Label::positive : Label::negative;
      mask[k] = k;
      p[k] = logits(r, 1) > logits(r, 0);
      a[k] = labels[k] == Label::positive;
    }
    auto got = evaluate_logits(logits, labels, mask);
    auto want = oracle::confusion(p, a);
    zero_tp += want.tp == 0;
    bad += got.tp != want.tp || got.fp != want.fp || got.fn != want.fn || got.tn != want.tn ||
           got.precision != want.precision || got.recall != want.recall || got.f1 != want.f1 ||
           (want.tp == 0 && got.f1 != 0.0);
  }
  return {bad == 0, "1000 vectors (" + std::to_string(zero_tp) + " with TP = 0), " + std::to_string(bad) + " mismatches"};
}

Verdict desk_scale() {
  RunConfig cfg;
  cfg.model.depth = 16;
  cfg.epochs_total = 60;
  cfg.oes = OesConfig{};
  cfg.compare_oes = true;
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.data.synth.accounts = 2000;
  cfg.data.synth.transactions = 20000;
  cfg.data.synth.illicit_ratio = 0.05;
  auto start = clock_type::now();
  auto bundle = load_dataset(cfg.data);
  auto rep = run_experiment(cfg, bundle);
  double minutes = seconds_since(start) / 60.0;
  const auto& base = rep.variants.at(0);
  const auto& with = rep.variants.at(1);
  const std::size_t n = cfg.oes->active_epochs;
  auto window_mean = [&](const VariantReport& v, std::size_t from, std::size_t to) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : v.seeds)
      for (std::size_t e = from; e <= to; ++e) sum += s.epoch_seconds[e - 1], ++count;
    return sum / static_cast<double>(count);
  };
  auto gap = [](const VariantReport& v) {
    double sum = 0.0;
    for (const auto& s : v.seeds) sum += s.test_loss.back() - s.train_loss.back();
    return sum / static_cast<double>(v.seeds.size());
  };
  double f1_off = base.f1().mean, f1_on = with.f1().mean;
  double t_on = window_mean(with, 2, n), t_off = window_mean(base, 2, n);
  double t_off_all = window_mean(base, 1, cfg.epochs_total);
  double gap_on = gap(with), gap_off = gap(base);
  bool a = f1_on >= f1_off - 0.01, b = t_on < t_off, c = gap_on <= gap_off;
  std::string d = std::string("(a) ") + (a ? "ok" : "FAIL") + " F1 with " + fmt("%.4f", f1_on) + " +- " +
                  fmt("%.4f", with.f1().stddev) + " vs without " + fmt("%.4f", f1_off) + " +- " +
                  fmt("%.4f", base.f1().stddev) + "; (b) " + (b ? "ok" : "FAIL") + " epochs 2-" +
                  std::to_string(n) + " mean " + fmt("%.4f s", t_on) + " vs " + fmt("%.4f s", t_off) +
                  " (no-OES mean over all epochs " + fmt("%.4f s", t_off_all) + "); (c) " + (c ? "ok" : "FAIL") +
                  " final gap " + fmt("%.4f", gap_on) + " vs " + fmt("%.4f", gap_off) + "; edges after epoch " +
                  std::to_string(n) + " " + std::to_string(with.seeds[0].edges_used[n - 1]) + " of " +
                  std::to_string(bundle.train_graph.edge_count()) + "; " + fmt("%.1f min", minutes);
  return {a && b && c && minutes < 30.0, d};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Verdict determinism() {
  RunConfig cfg;
  cfg.model.kind = ModelKind::gin_ego;
  cfg.model.depth = 3;
  cfg.model.hidden = 16;
  cfg.epochs_total = 8;
  cfg.oes = OesConfig{};
  cfg.oes->percentile = 80.0;
  cfg.oes->sample_ratio = 0.3;
  cfg.oes->active_epochs = 5;
  cfg.compare_oes = true;
  cfg.seeds = {0, 1, 2};
  cfg.data.synth.accounts = 300;
  cfg.data.synth.transactions = 3000;
  auto root = std::filesystem::temp_directory_path() / "oesgnn_acceptance_determinism";
  std::filesystem::remove_all(root);
  emit_report({run_experiment(cfg)}, root / "a");
  emit_report({run_experiment(cfg)}, root / "b");
  std::size_t same = 0;
  const char* files[] = {"report.json", "report.csv", "summary.csv", "curves.csv"};
  for (const char* f : files) same += slurp(root / "a" / f) == slurp(root / "b" / f);
  bool nonempty = !slurp(root / "a" / "report.json").empty();
  std::filesystem::remove_all(root);
  return {nonempty && same == 4, std::to_string(same) + " of 4 report files byte-identical across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
  };
  const Criterion all[] = {
      {1, "OES exactness", oes_exactness},
      {2, "drop-rate identity", drop_rate},
      {3, "percentile oracle", percentile_oracle},
      {4, "gradient correctness", gradients},
      {5, "Lemma-1 bound", lemma1},
      {6, "edge-removal monotonicity", theorem},
      {7, "smoothing contraction", contraction},
      {8, "expressivity", expressivity},
      {9, "split invariants", split_invariants},
      {10, "F1 oracle", f1_oracle},
      {11, "desk-scale end to end", desk_scale},
      {12, "determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("[%d] %s %s %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.details.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
