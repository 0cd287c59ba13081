//
// Copyright 2026 The tabverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// tabverify: command-line driver for the table entailment pipeline.
//
//   validate         check a dataset file
//   synth-neutrals   artificial neutral statements (random pairing / column removal)
//   stage1-trainset  balanced neutral vs non-neutral training set
//   score            built-in scorer logits for one stage
//   predict          ensemble + cascade decisions
//   evaluate         per-table micro-F1, confusion matrices, run spread
//   slices           keyword-group accuracy / error-rate breakdown
//   sweep            metrics over a grid of thresholds

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tabverify.hpp"

namespace fs = std::filesystem;
using namespace tabverify;

namespace {

constexpr std::string_view kBuiltinPrefix = "builtin:";

// A logits argument is a *.logits path or builtin:{overlap,majority,majority-neg}.
ScorerSpec parse_scorer_arg(const std::string& arg, Stage stage) {
  ScorerSpec spec;
  spec.stage = stage;
  if (arg.rfind(kBuiltinPrefix, 0) == 0) {
    auto name = arg.substr(kBuiltinPrefix.size());
    if (name == "overlap") {
      spec.kind = ScorerKind::LexicalOverlap;
    } else if (name == "majority" || name == "majority-neg") {
      spec.kind = ScorerKind::Majority;
      spec.positive = name == "majority";
    } else {
      throw config_error("unknown builtin scorer '" + name + "'");
    }
    return spec;
  }
  spec.kind = ScorerKind::ExternalFile;
  spec.path = arg;
  return spec;
}

StageScores gather_scores(const std::vector<std::string>& stage1,
                          const std::vector<std::string>& stage2,
                          const Dataset& d) {
  std::vector<ScorerSpec> specs;
  for (const auto& a : stage1) specs.push_back(parse_scorer_arg(a, Stage::Stage1));
  for (const auto& a : stage2) specs.push_back(parse_scorer_arg(a, Stage::Stage2));
  return collect_scores(specs, d);
}

Aggregation parse_agg(const std::string& s) {
  return s == "global" ? Aggregation::Global : Aggregation::PerTableMean;
}

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::string_view rest = csv;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    auto tok = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view()
                                           : rest.substr(comma + 1);
    auto v = parse_double(tok);
    if (!v || !std::isfinite(*v))
      throw config_error(std::string("bad number '") + std::string(tok) +
                         "' in " + what);
    out.push_back(*v);
  }
  if (out.empty()) throw config_error(std::string(what) + " is empty");
  return out;
}

// "t1,t2;t1,t2;..."
std::vector<CascadeConfig> parse_grid(const std::string& text) {
  std::vector<CascadeConfig> grid;
  std::string_view rest = text;
  while (!rest.empty()) {
    auto semi = rest.find(';');
    auto pair = std::string(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view()
                                          : rest.substr(semi + 1);
    if (pair.empty()) continue;
    auto v = parse_doubles(pair, "--grid");
    if (v.size() != 2) throw config_error("--grid entries must be 'tau1,tau2'");
    grid.push_back({v[0], v[1]});
  }
  if (grid.empty()) throw config_error("--grid is empty");
  return grid;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw config_error(std::string(flag) + " is required");
  if (!fs::exists(path))
    throw config_error(std::string(flag) + ": '" + path + "' does not exist");
}

struct Options {
  std::string dataset;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::string> stage1_logits;
  std::vector<std::string> stage2_logits;
  double tau1 = 4.0;
  double tau2 = 4.0;
  std::string agg = "per-table";
  std::string predictions;
  std::string keywords;
  std::vector<std::string> probes;
  std::vector<std::string> evidence;
  std::string pool;
  bool drop_neutral = false;
  std::string kind = "random";
  std::size_t count = 0;
  int stage = 1;
  std::string scorer = "overlap";
  std::string model_id;
  std::string grid;
  std::string tau1_values;
  std::string tau2_values;
};

void add_logit_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--stage1-logits", o.stage1_logits,
                  "Stage-1 logit files or builtin:{overlap,majority,majority-neg}");
  cmd->add_option("--stage2-logits", o.stage2_logits,
                  "Stage-2 logit files or builtin:{overlap,majority,majority-neg}");
}

void add_tau_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--tau1", o.tau1, "Stage-1 threshold (strict >)")
      ->capture_default_str();
  cmd->add_option("--tau2", o.tau2, "Stage-2 threshold (strict >)")
      ->capture_default_str();
}

void add_agg_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("--agg", o.agg, "Cross-table aggregation")
      ->check(CLI::IsMember({"per-table", "global"}))
      ->capture_default_str();
}

// --predictions, or predictions computed from logits and thresholds.
std::vector<Prediction> obtain_predictions(const Options& o, const Dataset& d) {
  if (!o.predictions.empty()) {
    require_file(o.predictions, "--predictions");
    return load_predictions(o.predictions);
  }
  if (o.stage1_logits.empty() || o.stage2_logits.empty())
    throw config_error(
        "need --predictions or both --stage1-logits and --stage2-logits");
  auto scores = gather_scores(o.stage1_logits, o.stage2_logits, d);
  return predict_all(scores.stage1, scores.stage2, {o.tau1, o.tau2}, d);
}

int cmd_validate(const Options& o) {
  require_file(o.dataset, "--dataset");
  auto load = read_dataset(read_file(o.dataset));
  for (const auto& e : load.errors) std::cout << "parse-error\t" << e << "\n";
  auto violations = validate_dataset(load.dataset);
  for (const auto& v : violations)
    std::cout << "violation\t" << v.rule << "\t" << v.id << "\t" << v.message
              << "\n";
  std::cout << "records\t" << load.records << "\taccepted\t" << load.accepted
            << "\trejected\t" << load.errors.size() << "\n";
  std::cout << "tables\t" << load.dataset.tables.size() << "\tstatements\t"
            << load.dataset.statements.size() << "\n";
  if (!load.errors.empty() || !violations.empty()) {
    std::cerr << "error[data]: " << o.dataset << " is invalid\n";
    return 3;
  }
  std::cout << "ok\n";
  return 0;
}

std::vector<EvidencePrediction> load_all_evidence(const Options& o,
                                                  const Dataset& d) {
  std::vector<EvidencePrediction> all;
  for (const auto& path : o.evidence) {
    require_file(path, "--evidence");
    auto preds = load_evidence_predictions(path, d);
    all.insert(all.end(), preds.begin(), preds.end());
  }
  return all;
}

int cmd_synth(const Options& o) {
  require_file(o.dataset, "--dataset");
  if (o.out.empty()) throw config_error("--out is required");
  auto d = load_dataset(o.dataset);
  std::vector<NeutralExample> examples;
  if (o.kind == "random") {
    examples = pair_random_neutrals(d, o.count, o.seed);
  } else {
    if (o.evidence.empty())
      throw config_error("--kind column-removal needs --evidence");
    examples = gen_column_removal_neutrals(d, load_all_evidence(o, d));
  }
  write_dataset(neutrals_to_dataset(d, examples), o.out);
  std::cout << o.kind << "\t" << examples.size() << "\t" << o.out << "\n";
  return 0;
}

int cmd_trainset(const Options& o) {
  require_file(o.dataset, "--dataset");
  if (o.out.empty()) throw config_error("--out is required");
  auto d = load_dataset(o.dataset);
  if (o.drop_neutral)
    std::erase_if(d.statements, [](const Statement& s) {
      return !s.gold || *s.gold == Label::Neutral;
    });
  std::vector<NeutralExample> pool;
  if (!o.pool.empty()) {
    require_file(o.pool, "--pool");
    pool = removal_pool_from_dataset(load_dataset(o.pool));
  } else if (!o.evidence.empty()) {
    pool = gen_column_removal_neutrals(d, load_all_evidence(o, d));
  } else {
    throw config_error("need --pool or --evidence");
  }
  auto train = build_stage1_trainset(d, pool, o.seed);
  write_dataset(train, o.out);
  std::size_t neutral = 0;
  for (const auto& s : train.statements) neutral += s.gold == Label::Neutral;
  std::cout << "statements\t" << train.statements.size() << "\tnon-neutral\t"
            << train.statements.size() - neutral << "\tneutral\t" << neutral
            << "\tpool\t" << pool.size() << "\n";
  return 0;
}

int cmd_score(const Options& o) {
  require_file(o.dataset, "--dataset");
  if (o.out.empty()) throw config_error("--out is required");
  auto d = load_dataset(o.dataset);
  auto spec = parse_scorer_arg(std::string(kBuiltinPrefix) + o.scorer,
                               o.stage == 1 ? Stage::Stage1 : Stage::Stage2);
  spec.model_id = o.model_id;
  auto set = run_scorer(spec, d);
  std::vector<std::string> order;
  for (const auto& s : d.statements) order.push_back(s.id);
  atomic_write(o.out, serialize_scoreset(set, order));
  std::cout << to_string(set.stage) << "\t" << set.model_id << "\t"
            << set.size() << "\t" << o.out << "\n";
  return 0;
}

int cmd_predict(const Options& o) {
  require_file(o.dataset, "--dataset");
  if (o.out.empty()) throw config_error("--out is required");
  auto d = load_dataset(o.dataset);
  auto scores = gather_scores(o.stage1_logits, o.stage2_logits, d);
  auto preds = predict_all(scores.stage1, scores.stage2, {o.tau1, o.tau2}, d);
  atomic_write(o.out, serialize_predictions(preds));
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& p : preds) ++counts[static_cast<int>(p.label)];
  std::cout << "entailed\t" << counts[0] << "\trefuted\t" << counts[1]
            << "\tneutral\t" << counts[2] << "\n";
  return 0;
}

std::vector<Label> gold_labels(const Dataset& d) {
  std::vector<Label> out;
  for (const auto& s : d.statements) {
    if (!s.gold) throw data_error("statement '" + s.id + "' has no gold label");
    out.push_back(*s.gold);
  }
  return out;
}

std::vector<Label> predicted_labels(const Dataset& d,
                                    const std::vector<Prediction>& preds) {
  std::map<std::string, Label> m;
  for (const auto& p : preds) m.emplace(p.statement_id, p.label);
  std::vector<Label> out;
  for (const auto& s : d.statements) {
    auto it = m.find(s.id);
    if (it == m.end()) throw data_error("no prediction for '" + s.id + "'");
    out.push_back(it->second);
  }
  return out;
}

int cmd_evaluate(const Options& o) {
  require_file(o.dataset, "--dataset");
  auto d = load_dataset(o.dataset);
  const auto agg = parse_agg(o.agg);
  auto preds = obtain_predictions(o, d);
  auto report = evaluate(d, preds, agg);

  auto gold = gold_labels(d);
  auto pred = predicted_labels(d, preds);
  std::string confusion_text = "# stage1\n" +
                               render_confusion(stage1_confusion(gold, pred)) +
                               "# stage2\n" +
                               render_confusion(stage2_confusion(gold, pred));

  // Run-level spread: run i pairs stage-1 model i with stage-2 model i.
  std::string runs_text;
  if (o.predictions.empty() && o.stage1_logits.size() == o.stage2_logits.size() &&
      o.stage1_logits.size() >= 2) {
    auto scores = gather_scores(o.stage1_logits, o.stage2_logits, d);
    std::vector<double> f2, f3;
    for (std::size_t i = 0; i < scores.stage1.size(); ++i) {
      auto run = evaluate(
          d,
          predict_all(std::span(&scores.stage1[i], 1),
                      std::span(&scores.stage2[i], 1), {o.tau1, o.tau2}, d),
          agg);
      f2.push_back(100.0 * run.aggregate_2way);
      f3.push_back(100.0 * run.aggregate_3way);
    }
    auto s2 = summarize_runs(f2);
    auto s3 = summarize_runs(f3);
    runs_text = "metric\tmedian\tiqr_half\tensemble\n";
    runs_text += "f1_2way\t" + format_half_up(s2.median, 2) + "\t" +
                 format_half_up(s2.margin, 2) + "\t" +
                 percent2(report.aggregate_2way) + "\n";
    runs_text += "f1_3way\t" + format_half_up(s3.median, 2) + "\t" +
                 format_half_up(s3.margin, 2) + "\t" +
                 percent2(report.aggregate_3way) + "\n";
  }

  std::cout << render_eval_tsv(report) << confusion_text << runs_text;
  if (!o.out.empty()) {
    fs::path dir(o.out);
    atomic_write(dir / "eval.tsv", render_eval_tsv(report));
    atomic_write(dir / "eval.jsonl", render_eval_jsonl(report));
    atomic_write(dir / "confusion.tsv", confusion_text);
    if (!runs_text.empty()) atomic_write(dir / "runs.tsv", runs_text);
  }
  return 0;
}

int cmd_slices(const Options& o) {
  require_file(o.dataset, "--dataset");
  auto d = load_dataset(o.dataset);
  KeywordGroups kg = default_keyword_groups();
  if (!o.keywords.empty()) {
    require_file(o.keywords, "--keywords");
    kg = load_keyword_groups(o.keywords);
  }
  auto preds = obtain_predictions(o, d);
  auto views = stage_slice_views(d, preds, kg);
  auto overall = render_slices_tsv(views.overall);
  auto stage1 = render_slices_tsv(views.stage1);
  auto stage2 = render_slices_tsv(views.stage2);
  std::string probes;
  if (!o.probes.empty()) {
    probes = "word\tcount\tsize\tacc\ter\n";
    for (const auto& w : o.probes) {
      auto r = keyword_probe(d, preds, w);
      probes += w + "\t" + std::to_string(r.count) + "\t" +
                format_half_up(r.size_pct, 1) + "\t" +
                format_half_up(r.acc_pct, 1) + "\t" +
                format_half_up(r.er_pct, 1) + "\n";
    }
  }
  std::cout << "# overall\n" << overall << "# stage1\n" << stage1
            << "# stage2\n" << stage2;
  if (!probes.empty()) std::cout << "# probes\n" << probes;
  if (!o.out.empty()) {
    fs::path dir(o.out);
    atomic_write(dir / "slices_overall.tsv", overall);
    atomic_write(dir / "slices_stage1.tsv", stage1);
    atomic_write(dir / "slices_stage2.tsv", stage2);
    if (!probes.empty()) atomic_write(dir / "probes.tsv", probes);
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  require_file(o.dataset, "--dataset");
  auto d = load_dataset(o.dataset);
  std::vector<CascadeConfig> grid;
  if (!o.grid.empty()) {
    grid = parse_grid(o.grid);
  } else if (!o.tau1_values.empty() && !o.tau2_values.empty()) {
    grid = threshold_grid(parse_doubles(o.tau1_values, "--tau1-values"),
                          parse_doubles(o.tau2_values, "--tau2-values"));
  } else {
    throw config_error("need --grid or both --tau1-values and --tau2-values");
  }
  auto scores = gather_scores(o.stage1_logits, o.stage2_logits, d);
  auto rows = sweep(scores.stage1, scores.stage2, d, grid, parse_agg(o.agg));
  auto text = render_sweep_tsv(rows);
  std::cout << text;
  if (!o.out.empty()) atomic_write(o.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage table entailment pipeline: synthesis, cascade, "
               "evaluation"};
  app.set_config("--config", "", "INI/TOML run config; flags override it");
  app.require_subcommand(1);
  Options o;

  auto dataset_flag = [&o](CLI::App* cmd) {
    cmd->add_option("--dataset", o.dataset, "Dataset file (*.tvd)");
  };

  auto* validate = app.add_subcommand("validate", "Check a dataset file");
  dataset_flag(validate);

  auto* synth = app.add_subcommand("synth-neutrals",
                                   "Generate artificial neutral statements");
  dataset_flag(synth);
  synth->add_option("--kind", o.kind, "random | column-removal")
      ->check(CLI::IsMember({"random", "column-removal"}))
      ->capture_default_str();
  synth->add_option("--count", o.count, "Number of random pairings");
  synth->add_option("--evidence", o.evidence, "Evidence prediction files (*.evd)");
  synth->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  synth->add_option("--out", o.out, "Output dataset (*.tvd)");

  auto* trainset = app.add_subcommand(
      "stage1-trainset", "Balanced neutral vs non-neutral training set");
  dataset_flag(trainset);
  trainset->add_option("--pool", o.pool, "Column-removal pool (*.tvd)");
  trainset->add_option("--evidence", o.evidence,
                       "Evidence files to build the pool from");
  trainset->add_flag("--drop-neutral", o.drop_neutral,
                     "Ignore statements without an entailed/refuted gold label");
  trainset->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  trainset->add_option("--out", o.out, "Output dataset (*.tvd)");

  auto* score = app.add_subcommand("score", "Write built-in scorer logits");
  dataset_flag(score);
  score->add_option("--stage", o.stage, "1 or 2")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  score->add_option("--scorer", o.scorer, "overlap | majority | majority-neg")
      ->check(CLI::IsMember({"overlap", "majority", "majority-neg"}))
      ->capture_default_str();
  score->add_option("--model-id", o.model_id, "Model id recorded for the set");
  score->add_option("--out", o.out, "Output file (*.logits)");

  auto* predict = app.add_subcommand("predict", "Ensemble and cascade decisions");
  dataset_flag(predict);
  add_logit_flags(predict, o);
  add_tau_flags(predict, o);
  predict->add_option("--out", o.out, "Output file (*.pred)");

  auto* eval = app.add_subcommand("evaluate", "Per-table micro-F1 report");
  dataset_flag(eval);
  eval->add_option("--predictions", o.predictions, "Prediction file (*.pred)");
  add_logit_flags(eval, o);
  add_tau_flags(eval, o);
  add_agg_flag(eval, o);
  eval->add_option("--out", o.out, "Output directory");

  auto* slices = app.add_subcommand("slices", "Keyword-group error analysis");
  dataset_flag(slices);
  slices->add_option("--predictions", o.predictions, "Prediction file (*.pred)");
  add_logit_flags(slices, o);
  add_tau_flags(slices, o);
  slices->add_option("--keywords", o.keywords, "Keyword groups (groups.kw)");
  slices->add_option("--probe", o.probes, "Single-word probes");
  slices->add_option("--out", o.out, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Metrics over a threshold grid");
  dataset_flag(sweep_cmd);
  add_logit_flags(sweep_cmd, o);
  add_agg_flag(sweep_cmd, o);
  sweep_cmd->add_option("--grid", o.grid, "Explicit grid 't1,t2;t1,t2;...'");
  sweep_cmd->add_option("--tau1-values", o.tau1_values, "Comma list for tau1");
  sweep_cmd->add_option("--tau2-values", o.tau2_values, "Comma list for tau2");
  sweep_cmd->add_option("--out", o.out, "Output file (TSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*synth) return cmd_synth(o);
    if (*trainset) return cmd_trainset(o);
    if (*score) return cmd_score(o);
    if (*predict) return cmd_predict(o);
    if (*eval) return cmd_evaluate(o);
    if (*slices) return cmd_slices(o);
    if (*sweep_cmd) return cmd_sweep(o);
  } catch (const Error& e) {
    std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Config: return 2;
      case ErrorKind::Data: return 3;
      case ErrorKind::Io: return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "error[data]: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
