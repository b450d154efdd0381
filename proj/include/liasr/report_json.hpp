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

#ifndef LIASR_REPORT_JSON_HPP_
#define LIASR_REPORT_JSON_HPP_

// Requires the vendored nlohmann/json single header on the include path.

#include <string>

#include "json.hpp"
#include "liasr/harness.hpp"

namespace liasr {

// Machine-readable run report.  Key order is fixed so that identical runs
// serialize to identical bytes; `wall_clock_sec` is the only field allowed
// to differ between reruns of the same (config, seed).
inline nlohmann::ordered_json report_to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.config.seed;
  j["master_seed"] = report.config.master_seed;
  j["config"] = render_config(report.config);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["subset"] = row.subset;
    r["head"] = head_kind_name(row.kind);
    r["steps"] = row.steps;
    r["final_loss"] = row.final_loss;
    r["test_wer"] = row.test_wer;
    r["test_cer"] = row.test_cer;
    r["wall_clock_sec"] = row.wall_clock_sec;
    j["rows"].push_back(std::move(r));
  }
  j["improvements"] = nlohmann::ordered_json::array();
  for (const auto& imp : report.improvements) {
    nlohmann::ordered_json r;
    r["subset"] = imp.subset;
    if (imp.wer) r["wer"] = *imp.wer; else r["wer"] = nullptr;
    if (imp.cer) r["cer"] = *imp.cer; else r["cer"] = nullptr;
    j["improvements"].push_back(std::move(r));
  }
  if (report.avg_wer_improvement) {
    j["avg_wer_improvement"] = *report.avg_wer_improvement;
  } else {
    j["avg_wer_improvement"] = nullptr;
  }
  if (report.avg_cer_improvement) {
    j["avg_cer_improvement"] = *report.avg_cer_improvement;
  } else {
    j["avg_cer_improvement"] = nullptr;
  }
  return j;
}

inline std::string report_to_json_string(const RunReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

// Strips the timing fields; what remains must be bitwise reproducible.
inline nlohmann::ordered_json strip_timing(nlohmann::ordered_json j) {
  if (j.contains("rows")) {
    for (auto& row : j["rows"]) row.erase("wall_clock_sec");
  }
  return j;
}

}  // namespace liasr

#endif  // LIASR_REPORT_JSON_HPP_
