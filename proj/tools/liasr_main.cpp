// Copyright 2026 liasr Authors.
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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liasr/checkpoint.hpp"
#include "liasr/config.hpp"
#include "liasr/harness.hpp"
#include "liasr/report_json.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitRegression = 3;

// Common flags shared by the experiment subcommands; values are applied on
// top of the config file only when actually passed.
struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::vector<std::string> heads;
  std::vector<std::string> subsets;
  std::string decode;
  std::size_t beam_width = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "Experiment config file (flat key = value lines)");
  cmd->add_option("--seed", flags.seed,
                  "Training seed (initialization and batch order)");
  cmd->add_option("--out", flags.out_dir, "Output directory");
  cmd->add_option("--heads", flags.heads, "Head kinds to run (ff,li)")
      ->delimiter(',');
  cmd->add_option("--subsets", flags.subsets, "Subsets to run (s,m,l,xl,xxl)")
      ->delimiter(',');
  cmd->add_option("--decode", flags.decode, "Decoding mode: greedy or beam");
  cmd->add_option("--beam-width", flags.beam_width, "Beam width for beam decoding");
  cmd->add_option("--alpha", flags.alpha, "LM weight for shallow fusion");
  cmd->add_option("--beta", flags.beta, "Length bonus for beam decoding");
}

liasr::ExperimentConfig resolve_config(const CLI::App* cmd,
                                       const CommonFlags& flags) {
  liasr::ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    std::ifstream is(flags.config_path);
    if (!is) {
      throw liasr::ConfigError("cannot open config file: " + flags.config_path);
    }
    cfg = liasr::parse_config(is);
  }
  if (cmd->count("--seed") > 0) cfg.seed = flags.seed;
  if (cmd->count("--out") > 0) cfg.out_dir = flags.out_dir;
  if (cmd->count("--heads") > 0) {
    cfg.heads.clear();
    for (const auto& h : flags.heads) {
      if (h == "ff") cfg.heads.push_back(liasr::HeadKind::kFF);
      else if (h == "li") cfg.heads.push_back(liasr::HeadKind::kLI);
      else throw liasr::ConfigError("unknown head kind '" + h + "'");
    }
  }
  if (cmd->count("--subsets") > 0) cfg.subsets = flags.subsets;
  if (cmd->count("--decode") > 0) {
    if (flags.decode == "greedy") cfg.decode.mode = liasr::DecodeMode::kGreedy;
    else if (flags.decode == "beam") cfg.decode.mode = liasr::DecodeMode::kBeam;
    else throw liasr::ConfigError("decode must be greedy or beam");
  }
  if (cmd->count("--beam-width") > 0) cfg.decode.beam_width = flags.beam_width;
  if (cmd->count("--alpha") > 0) cfg.decode.alpha = flags.alpha;
  if (cmd->count("--beta") > 0) cfg.decode.beta = flags.beta;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string checkpoint_name(const std::string& subset, liasr::HeadKind kind) {
  return subset + "_" + liasr::head_kind_name(kind) + ".ckpt";
}

int run_gen(const CLI::App* cmd, const CommonFlags& flags, bool dump_frames) {
  const auto cfg = resolve_config(cmd, flags);
  liasr::Corpus corpus(cfg.corpus, cfg.alphabet(), cfg.master_seed);
  fs::create_directories(cfg.out_dir);

  const auto write_split = [&](const std::string& name,
                               const std::vector<std::size_t>& ids) {
    std::ostringstream text;
    for (std::size_t id : ids) {
      const liasr::Utterance utt = corpus.make_utterance(id);
      text << id << "\t" << utt.frames.rows << "\t" << utt.transcript << "\n";
    }
    write_file(fs::path(cfg.out_dir) / ("corpus_" + name + ".tsv"), text.str());
    if (dump_frames) {
      std::ofstream os(fs::path(cfg.out_dir) / ("frames_" + name + ".bin"),
                       std::ios::binary | std::ios::trunc);
      for (std::size_t id : ids) {
        const liasr::Utterance utt = corpus.make_utterance(id);
        liasr::ckpt_detail::put_u64(os, id);
        liasr::ckpt_detail::put_matrix(os, utt.frames);
      }
      if (!os) throw std::runtime_error("frame dump failed for " + name);
    }
  };

  for (const auto& name : cfg.subsets) write_split(name, corpus.subset_ids(name));
  write_split("test", corpus.test_ids());

  std::cout << "corpus master_seed=" << cfg.master_seed
            << " pool=" << corpus.pool_size()
            << " lexicon=" << corpus.lexicon().size()
            << " d=" << cfg.corpus.d << "\n";
  for (const auto& name : cfg.subsets) {
    std::cout << "subset " << name << ": " << corpus.subset_ids(name).size()
              << " utterances\n";
  }
  std::cout << "test: " << corpus.test_ids().size() << " utterances\n";
  std::cout << "wrote " << cfg.out_dir << "\n";
  return kExitOk;
}

int run_train(const CLI::App* cmd, const CommonFlags& flags) {
  const auto cfg = resolve_config(cmd, flags);
  const liasr::RunOutput out = liasr::run_experiment(cfg);

  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "config.txt", liasr::render_config(cfg));
  write_file(fs::path(cfg.out_dir) / "report.json",
             liasr::report_to_json_string(out.report));
  for (const auto& model : out.models) {
    liasr::save_checkpoint_file(
        (fs::path(cfg.out_dir) / checkpoint_name(model.subset, model.kind))
            .string(),
        model.checkpoint);
  }
  if (!out.report.improvements.empty()) {
    write_file(fs::path(cfg.out_dir) / "compare.tsv",
               liasr::compare_heads(out.report));
  }
  liasr::print_report(out.report, std::cout);
  std::cout << "wrote " << cfg.out_dir << "\n";
  return kExitOk;
}

int run_eval(const CLI::App* cmd, const CommonFlags& flags) {
  const auto cfg = resolve_config(cmd, flags);
  liasr::Corpus corpus(cfg.corpus, cfg.alphabet(), cfg.master_seed);

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::cout << "subset  head  test_wer%   test_cer%\n";
  for (const auto& subset : cfg.subsets) {
    std::optional<liasr::CharNGramLM> lm;
    if (cfg.decode.mode == liasr::DecodeMode::kBeam) {
      lm = liasr::train_subset_lm(corpus, subset, cfg.decode.lm_order);
    }
    for (auto kind : cfg.heads) {
      const fs::path path =
          fs::path(cfg.out_dir) / checkpoint_name(subset, kind);
      const liasr::Checkpoint ckpt = liasr::load_checkpoint_file(path.string());
      if (ckpt.head.kind != kind) {
        throw std::runtime_error("checkpoint head kind mismatch: " +
                                 path.string());
      }
      if (ckpt.head.dim() != cfg.corpus.d ||
          ckpt.head.vocab() != cfg.alphabet().size()) {
        throw std::runtime_error("checkpoint shape does not match config: " +
                                 path.string());
      }
      const liasr::EvalResult eval = liasr::evaluate_on_test(
          corpus, ckpt.head, cfg.decode, lm ? &*lm : nullptr);
      std::cout << std::left << std::setw(8) << subset << std::setw(6)
                << liasr::head_kind_name(kind) << std::right << std::setw(10)
                << liasr::harness_detail::fmt(eval.wer) << std::setw(12)
                << liasr::harness_detail::fmt(eval.cer) << "\n";
      nlohmann::ordered_json r;
      r["subset"] = subset;
      r["head"] = liasr::head_kind_name(kind);
      r["test_wer"] = eval.wer;
      r["test_cer"] = eval.cer;
      rows.push_back(std::move(r));
    }
    corpus.drop_cache();
  }
  nlohmann::ordered_json j;
  j["decode"] = cfg.decode.mode == liasr::DecodeMode::kGreedy ? "greedy" : "beam";
  j["rows"] = std::move(rows);
  write_file(fs::path(cfg.out_dir) / "eval.json", j.dump(2) + "\n");
  return kExitOk;
}

int run_paper_aggregates(const std::string& table_path,
                         const std::string& out_dir) {
  const liasr::ImprovementReport report =
      liasr::reproduce_paper_aggregates(table_path);

  std::cout << liasr::render_improvement_report(report);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "improvements.tsv",
               liasr::render_improvement_report(report));
  }

  // Regression gate: the published per-corpus and overall averages, each
  // within +/- 0.05.
  const auto corpus_value = [&](const std::string& corpus,
                                bool wer) -> double {
    for (const auto& ci : report.per_corpus) {
      if (ci.corpus == corpus) return wer ? ci.wer : ci.cer;
    }
    throw std::runtime_error("paper aggregates: corpus " + corpus +
                             " missing from table");
  };
  struct Expect {
    const char* name;
    double actual;
    double expected;
  };
  const Expect expectations[] = {
      {"rsc wer", corpus_value("rsc", true), 17.8},
      {"rsc cer", corpus_value("rsc", false), 16.1},
      {"ssc cer", corpus_value("ssc", false), 11.4},
      {"rtasc wer", corpus_value("rtasc", true), 9.0},
      {"overall wer", report.overall_wer, 12.5},
      {"overall cer", report.overall_cer, 13.1},
  };
  bool ok = true;
  for (const auto& e : expectations) {
    if (std::abs(e.actual - e.expected) > 0.05) {
      std::cerr << "regression: " << e.name << " = " << e.actual
                << ", expected " << e.expected << " +/- 0.05\n";
      ok = false;
    }
  }
  return ok ? kExitOk : kExitRegression;
}

int run_compare(const CLI::App* cmd, const CommonFlags& flags) {
  const auto cfg = resolve_config(cmd, flags);
  const fs::path report_path = fs::path(cfg.out_dir) / "report.json";
  std::ifstream is(report_path);
  if (!is) {
    throw std::runtime_error("cannot open " + report_path.string() +
                             " (run `train` first)");
  }
  const nlohmann::json j = nlohmann::json::parse(is);

  liasr::RunReport report;
  report.config = cfg;
  report.config.subsets.clear();
  for (const auto& row : j.at("rows")) {
    liasr::RunRow r;
    r.subset = row.at("subset").get<std::string>();
    r.kind = row.at("head").get<std::string>() == "li" ? liasr::HeadKind::kLI
                                                       : liasr::HeadKind::kFF;
    r.test_wer = row.at("test_wer").get<double>();
    r.test_cer = row.at("test_cer").get<double>();
    report.rows.push_back(std::move(r));
    if (std::find(report.config.subsets.begin(), report.config.subsets.end(),
                  r.subset) == report.config.subsets.end()) {
      report.config.subsets.push_back(r.subset);
    }
  }
  const std::string table = liasr::compare_heads(report);
  std::cout << table;
  write_file(fs::path(cfg.out_dir) / "compare.tsv", table);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lateral-inhibition CTC head: training and evaluation harness"};
  app.require_subcommand(1);

  CommonFlags gen_flags, train_flags, eval_flags, compare_flags;
  bool dump_frames = false;

  CLI::App* gen = app.add_subcommand("gen", "Generate the synthetic corpus");
  add_common_flags(gen, gen_flags);
  gen->add_flag("--frames", dump_frames, "Also dump frame matrices (binary)");

  CLI::App* train = app.add_subcommand(
      "train", "Train and evaluate heads on the requested subsets");
  add_common_flags(train, train_flags);

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Re-evaluate checkpoints from --out");
  add_common_flags(eval_cmd, eval_flags);

  std::string table_path = "data/reference_results.tsv";
  std::string aggregates_out;
  CLI::App* aggregates = app.add_subcommand(
      "paper-aggregates",
      "Recompute the published relative-improvement averages");
  aggregates->add_option("table", table_path,
                         "Reference results table (system/subset/corpus/wer/cer)");
  aggregates->add_option("--out", aggregates_out,
                         "Directory for improvements.tsv");

  CLI::App* compare = app.add_subcommand(
      "compare", "Rebuild the ff-vs-li comparison table from report.json");
  add_common_flags(compare, compare_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (gen->parsed()) return run_gen(gen, gen_flags, dump_frames);
    if (train->parsed()) return run_train(train, train_flags);
    if (eval_cmd->parsed()) return run_eval(eval_cmd, eval_flags);
    if (aggregates->parsed()) {
      return run_paper_aggregates(table_path, aggregates_out);
    }
    if (compare->parsed()) return run_compare(compare, compare_flags);
  } catch (const liasr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitConfigError;
}
