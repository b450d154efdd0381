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

#ifndef LIASR_HARNESS_HPP_
#define LIASR_HARNESS_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liasr/checkpoint.hpp"
#include "liasr/config.hpp"
#include "liasr/ctc.hpp"
#include "liasr/head.hpp"
#include "liasr/metrics.hpp"
#include "liasr/ngram_lm.hpp"
#include "liasr/optim.hpp"
#include "liasr/synth.hpp"

namespace liasr {

// Experiment runner: trains FF and LI heads on each requested subset,
// evaluates on the shared held-out test set, and assembles the comparison
// report.  Identical (config, seed) pairs produce identical reports and
// checkpoints, bit for bit, timing fields aside.

namespace harness_streams {
constexpr std::uint64_t kInit = 101;
constexpr std::uint64_t kOrder = 102;
}  // namespace harness_streams

// ceil(epochs * subset_size / virtual_batch), floored at min_steps.
inline std::size_t step_budget(double epochs, std::size_t subset_size,
                               const AdamConfig& adam, std::size_t min_steps) {
  if (epochs <= 0) throw std::invalid_argument("step_budget: epochs must be > 0");
  if (subset_size == 0) {
    throw std::invalid_argument("step_budget: empty subset");
  }
  const double virtual_batch =
      static_cast<double>(adam.batch_size * adam.accumulation_steps);
  const auto steps = static_cast<std::size_t>(
      std::ceil(epochs * static_cast<double>(subset_size) / virtual_batch));
  return std::max(steps, min_steps);
}

// Cycles through the subset in epoch-wise shuffled order.
class UtteranceStream {
 public:
  UtteranceStream(std::vector<std::size_t> ids, std::uint64_t seed)
      : ids_(std::move(ids)), rng_(seed) {
    if (ids_.empty()) {
      throw std::invalid_argument("UtteranceStream: empty id list");
    }
    rng_.shuffle(ids_);
  }

  std::size_t next() {
    if (pos_ == ids_.size()) {
      rng_.shuffle(ids_);
      pos_ = 0;
    }
    return ids_[pos_++];
  }

 private:
  std::vector<std::size_t> ids_;
  Rng rng_;
  std::size_t pos_ = 0;
};

struct TrainResult {
  AcousticHead head;
  AdamState adam;
  double final_loss = 0.0;  // mean CTC loss over the last virtual batch
  std::size_t steps = 0;
};

// Deterministic stream id for a (subset, head) pair within one experiment.
inline std::uint64_t model_stream(const std::string& subset_name,
                                  HeadKind kind) {
  std::uint64_t h = 0x100001B3ULL;
  for (char c : subset_name) {
    h = splitmix64(h ^ static_cast<unsigned char>(c));
  }
  return splitmix64(h ^ (kind == HeadKind::kLI ? 2u : 1u));
}

inline TrainResult train_on_subset(Corpus& corpus,
                                   const std::string& subset_name,
                                   HeadKind kind,
                                   const ExperimentConfig& cfg) {
  const Alphabet& alphabet = corpus.alphabet();
  const std::uint64_t stream = model_stream(subset_name, kind);
  Rng init_rng(derive_seed(derive_seed(cfg.seed, harness_streams::kInit), stream));

  TrainResult out;
  out.head = make_head(kind, cfg.corpus.d, alphabet.size(), cfg.k, init_rng);
  auto slots = trainable_params(out.head);
  out.adam = AdamState::zeros_like(slots);

  const auto ids = corpus.subset_ids(subset_name);
  corpus.materialize(ids);
  UtteranceStream stream_ids(
      ids, derive_seed(derive_seed(cfg.seed, harness_streams::kOrder), stream));

  out.steps = step_budget(cfg.epochs, ids.size(), cfg.adam, cfg.min_steps);
  const std::size_t micro = cfg.adam.batch_size;
  const std::size_t virtual_batch = micro * cfg.adam.accumulation_steps;
  const double inv_micro = 1.0 / static_cast<double>(micro);

  for (std::size_t step = 0; step < out.steps; ++step) {
    GradAccumulator acc;
    double loss_sum = 0.0;
    for (std::size_t a = 0; a < cfg.adam.accumulation_steps; ++a) {
      GradSet micro_grads;
      for (std::size_t b = 0; b < micro; ++b) {
        const Utterance& utt = corpus.at(stream_ids.next());
        auto [log_probs, cache] = head_forward(utt.frames, out.head);
        const CtcResult res = ctc_loss(log_probs, alphabet.encode(utt.transcript));
        loss_sum += res.loss;
        GradSet g = grads_as_set(
            head_backward(cache, out.head, res.grad), kind);
        if (micro_grads.empty()) {
          micro_grads = std::move(g);
        } else {
          for (std::size_t p = 0; p < g.size(); ++p) {
            for (std::size_t i = 0; i < g[p].size(); ++i) {
              micro_grads[p][i] += g[p][i];
            }
          }
        }
      }
      for (auto& g : micro_grads) {
        for (double& x : g) x *= inv_micro;
      }
      acc.add(micro_grads);
    }
    GradSet grads = acc.finalize(cfg.adam.accumulation_steps);
    clip_global_norm(grads, cfg.adam.clip_norm);
    adam_step(slots, grads, out.adam, cfg.adam);
    out.final_loss = loss_sum / static_cast<double>(virtual_batch);
  }
  return out;
}

struct EvalResult {
  double wer = 0.0;  // percent, corpus-level
  double cer = 0.0;  // percent
};

inline EvalResult evaluate_on_test(Corpus& corpus, const AcousticHead& head,
                                   const DecodeConfig& decode,
                                   const CharNGramLM* lm) {
  if (decode.mode == DecodeMode::kBeam && lm == nullptr) {
    throw std::invalid_argument("evaluate_on_test: beam decoding needs an LM");
  }
  std::vector<std::string> refs;
  std::vector<std::string> hyps;
  refs.reserve(corpus.test_ids().size());
  hyps.reserve(corpus.test_ids().size());
  for (std::size_t id : corpus.test_ids()) {
    const Utterance& utt = corpus.at(id);
    auto [log_probs, cache] = head_forward(utt.frames, head);
    (void)cache;
    std::string hyp;
    if (decode.mode == DecodeMode::kGreedy) {
      hyp = greedy_decode(log_probs, corpus.alphabet());
    } else {
      hyp = beam_decode(log_probs, corpus.alphabet(), *lm, decode.beam_width,
                        decode.alpha, decode.beta);
    }
    refs.push_back(utt.transcript);
    hyps.push_back(std::move(hyp));
  }
  return {100.0 * corpus_wer(refs, hyps), 100.0 * corpus_cer(refs, hyps)};
}

// Character LM for shallow fusion, trained on the transcripts the model was
// trained on (the "textual part" of the training subset).
inline CharNGramLM train_subset_lm(Corpus& corpus,
                                   const std::string& subset_name,
                                   std::size_t order) {
  std::vector<std::string> texts;
  for (std::size_t id : corpus.subset_ids(subset_name)) {
    texts.push_back(corpus.at(id).transcript);
  }
  CharNGramLM lm = CharNGramLM::train_corpus(texts, order);
  lm.add_vocab(corpus.alphabet().symbols());
  return lm;
}

struct RunRow {
  std::string subset;
  HeadKind kind = HeadKind::kFF;
  double final_loss = 0.0;
  double test_wer = 0.0;  // percent
  double test_cer = 0.0;  // percent
  std::size_t steps = 0;
  double wall_clock_sec = 0.0;  // excluded from determinism comparisons
};

struct SubsetImprovement {
  std::string subset;
  // Relative improvements are undefined when the baseline error is 0; such
  // entries are absent and skipped by the averages.
  std::optional<double> wer;
  std::optional<double> cer;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<RunRow> rows;
  std::vector<SubsetImprovement> improvements;  // present iff both heads ran
  std::optional<double> avg_wer_improvement;
  std::optional<double> avg_cer_improvement;
};

struct TrainedModel {
  std::string subset;
  HeadKind kind = HeadKind::kFF;
  Checkpoint checkpoint;
};

struct RunOutput {
  RunReport report;
  std::vector<TrainedModel> models;
};

inline const RunRow& find_row(const RunReport& report,
                              const std::string& subset, HeadKind kind) {
  for (const auto& row : report.rows) {
    if (row.subset == subset && row.kind == kind) return row;
  }
  throw std::invalid_argument("run report: missing row for subset " + subset +
                              ", head " + head_kind_name(kind));
}

inline void fill_improvements(RunReport& report) {
  bool has_ff = false;
  bool has_li = false;
  for (auto kind : report.config.heads) {
    has_ff |= kind == HeadKind::kFF;
    has_li |= kind == HeadKind::kLI;
  }
  if (!has_ff || !has_li) return;

  double wer_sum = 0.0, cer_sum = 0.0;
  std::size_t wer_n = 0, cer_n = 0;
  for (const auto& subset : report.config.subsets) {
    const RunRow& ff = find_row(report, subset, HeadKind::kFF);
    const RunRow& li = find_row(report, subset, HeadKind::kLI);
    SubsetImprovement imp;
    imp.subset = subset;
    if (ff.test_wer > 0.0) {
      imp.wer = relative_improvement(ff.test_wer, li.test_wer);
      wer_sum += *imp.wer;
      ++wer_n;
    }
    if (ff.test_cer > 0.0) {
      imp.cer = relative_improvement(ff.test_cer, li.test_cer);
      cer_sum += *imp.cer;
      ++cer_n;
    }
    report.improvements.push_back(std::move(imp));
  }
  if (wer_n > 0) report.avg_wer_improvement = wer_sum / static_cast<double>(wer_n);
  if (cer_n > 0) report.avg_cer_improvement = cer_sum / static_cast<double>(cer_n);
}

inline RunOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Corpus corpus(cfg.corpus, cfg.alphabet(), cfg.master_seed);

  RunOutput out;
  out.report.config = cfg;
  for (const auto& subset : cfg.subsets) {
    std::optional<CharNGramLM> lm;
    if (cfg.decode.mode == DecodeMode::kBeam) {
      lm = train_subset_lm(corpus, subset, cfg.decode.lm_order);
    }
    for (auto kind : cfg.heads) {
      const auto t0 = std::chrono::steady_clock::now();
      TrainResult trained = train_on_subset(corpus, subset, kind, cfg);
      const EvalResult eval = evaluate_on_test(
          corpus, trained.head, cfg.decode, lm ? &*lm : nullptr);
      const auto t1 = std::chrono::steady_clock::now();

      RunRow row;
      row.subset = subset;
      row.kind = kind;
      row.final_loss = trained.final_loss;
      row.test_wer = eval.wer;
      row.test_cer = eval.cer;
      row.steps = trained.steps;
      row.wall_clock_sec =
          std::chrono::duration<double>(t1 - t0).count();
      out.report.rows.push_back(std::move(row));

      TrainedModel model;
      model.subset = subset;
      model.kind = kind;
      model.checkpoint.head = std::move(trained.head);
      model.checkpoint.adam = std::move(trained.adam);
      out.models.push_back(std::move(model));
    }
    corpus.drop_cache();
  }
  fill_improvements(out.report);
  return out;
}

// ---------------------------------------------------------------------------
// Report rendering.

namespace harness_detail {

inline std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

}  // namespace harness_detail

// Human-readable result table.
inline void print_report(const RunReport& report, std::ostream& os) {
  os << "subset  head  steps   final_loss   test_wer%   test_cer%\n";
  for (const auto& row : report.rows) {
    os << std::left << std::setw(8) << row.subset << std::setw(6)
       << head_kind_name(row.kind) << std::right << std::setw(6) << row.steps
       << std::setw(13) << harness_detail::fmt(row.final_loss) << std::setw(12)
       << harness_detail::fmt(row.test_wer) << std::setw(12)
       << harness_detail::fmt(row.test_cer) << "\n";
  }
  if (!report.improvements.empty()) {
    os << "\nrelative improvement (ff -> li), percent:\n";
    os << "subset  wer      cer\n";
    for (const auto& imp : report.improvements) {
      os << std::left << std::setw(8) << imp.subset << std::right;
      os << std::setw(7) << (imp.wer ? harness_detail::fmt(*imp.wer, 2) : "n/a");
      os << std::setw(9) << (imp.cer ? harness_detail::fmt(*imp.cer, 2) : "n/a");
      os << "\n";
    }
    os << "average: wer "
       << (report.avg_wer_improvement
               ? harness_detail::fmt(*report.avg_wer_improvement, 2)
               : "n/a")
       << ", cer "
       << (report.avg_cer_improvement
               ? harness_detail::fmt(*report.avg_cer_improvement, 2)
               : "n/a")
       << "\n";
  }
}

// Fixed-format comparison table: one WER row and one CER row per subset.
inline std::string compare_heads(const RunReport& report) {
  std::ostringstream os;
  os << "subset\tmetric\tff\tli\trel_improvement\n";
  os.precision(17);
  for (const auto& subset : report.config.subsets) {
    const RunRow& ff = find_row(report, subset, HeadKind::kFF);
    const RunRow& li = find_row(report, subset, HeadKind::kLI);
    const auto emit = [&](const char* metric, double f, double l) {
      os << subset << "\t" << metric << "\t" << f << "\t" << l << "\t";
      if (f > 0.0) {
        os << relative_improvement(f, l);
      } else {
        os << "n/a";
      }
      os << "\n";
    };
    emit("wer", ff.test_wer, li.test_wer);
    emit("cer", ff.test_cer, li.test_cer);
  }
  return os.str();
}

// Machine-readable improvement report (one record per row).
inline std::string render_improvement_report(const ImprovementReport& report) {
  std::ostringstream os;
  os << "corpus\tmetric\taverage_improvement\n";
  os.precision(17);
  for (const auto& ci : report.per_corpus) {
    os << ci.corpus << "\twer\t" << ci.wer << "\n";
    os << ci.corpus << "\tcer\t" << ci.cer << "\n";
  }
  os << "overall\twer\t" << report.overall_wer << "\n";
  os << "overall\tcer\t" << report.overall_cer << "\n";
  return os.str();
}

inline ImprovementReport reproduce_paper_aggregates(const std::string& table_path) {
  std::ifstream is(table_path);
  if (!is) {
    throw std::runtime_error("paper aggregates: cannot open " + table_path);
  }
  const auto records = parse_eval_records(is);
  return aggregate_improvements(records);
}

}  // namespace liasr

#endif  // LIASR_HARNESS_HPP_
