// Copyright 2026 The tsrank Authors.
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

#include "tsrank/prompts.hpp"

#include <fstream>
#include <initializer_list>
#include <iterator>

#include "embedded_templates.hpp"
#include "tsrank/error.hpp"

namespace tsrank {
namespace {

struct Slot {
  std::string_view name;
  std::string_view value;
};

std::string fill_slots(std::string_view body, std::initializer_list<Slot> slots) {
  for (const Slot& slot : slots) {
    const std::string marker = "{{" + std::string(slot.name) + "}}";
    if (body.find(marker) == std::string_view::npos) {
      throw Error(ErrorCode::template_error, "template is missing slot " + marker);
    }
  }
  std::string out;
  out.reserve(body.size() + 256);
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t open = body.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(body.substr(pos));
      break;
    }
    const std::size_t close = body.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::template_error, "unterminated '{{' in template");
    }
    out.append(body.substr(pos, open - pos));
    const std::string_view name = body.substr(open + 2, close - open - 2);
    const Slot* match = nullptr;
    for (const Slot& slot : slots) {
      if (slot.name == name) match = &slot;
    }
    if (match == nullptr) {
      throw Error(ErrorCode::template_error, "unknown template slot {{" + std::string(name) + "}}");
    }
    out.append(match->value);
    pos = close + 2;
  }
  return out;
}

std::string compose(const PromptTemplate& tmpl, std::string_view rendered_body) {
  std::string out = tmpl.system;
  if (!out.empty()) {
    if (out.back() != '\n') out.push_back('\n');
    out.push_back('\n');
  }
  out.append(rendered_body);
  return out;
}

std::string_view patient_text(const std::optional<std::string>& patient) {
  return patient ? std::string_view(*patient) : kEmptyPatientMarker;
}

std::string more_marker(std::size_t dropped, bool after_entry) {
  return std::string(after_entry ? "; " : "") + "...(+" + std::to_string(dropped) + " more)";
}

PromptTemplate default_template(std::string_view system, std::string_view user) {
  return {std::string(detail::embedded_template(system)),
          std::string(detail::embedded_template(user))};
}

std::string read_or(const std::filesystem::path& path, std::string_view fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::string(fallback);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TemplateSet TemplateSet::defaults() {
  return {default_template("fast_system", "fast_user"),
          default_template("slow_system", "slow_user"),
          default_template("train_system", "train_user"),
          default_template("judge_system", "judge_user")};
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::invalid_argument,
                "template directory '" + dir.string() + "' does not exist");
  }
  const auto load_one = [&dir](std::string_view stem) {
    const std::string system = std::string(stem) + "_system";
    const std::string user = std::string(stem) + "_user";
    return PromptTemplate{read_or(dir / (system + ".txt"), detail::embedded_template(system)),
                          read_or(dir / (user + ".txt"), detail::embedded_template(user))};
  };
  return {load_one("fast"), load_one("slow"), load_one("train"), load_one("judge")};
}

std::string render_other_candidates(const CandidateList& list, std::size_t target_index,
                                    std::size_t budget) {
  std::vector<std::string_view> entries;
  entries.reserve(list.candidates.size());
  for (std::size_t i = 0; i < list.candidates.size(); ++i) {
    if (i != target_index) entries.push_back(list.candidates[i].text);
  }

  std::string joined;
  std::vector<std::size_t> prefix_end;  // joined length after each entry
  for (std::string_view entry : entries) {
    if (!joined.empty()) joined.append("; ");
    joined.append(entry);
    prefix_end.push_back(joined.size());
  }
  if (joined.size() <= budget) return joined;

  // Keep the longest prefix whose text plus marker fits.
  std::size_t kept = entries.size();
  while (kept > 0) {
    --kept;
    const std::size_t length = kept == 0 ? 0 : prefix_end[kept - 1];
    if (length + more_marker(entries.size() - kept, kept > 0).size() <= budget) break;
  }
  std::string out = kept == 0 ? std::string() : joined.substr(0, prefix_end[kept - 1]);
  out.append(more_marker(entries.size() - kept, kept > 0));
  return out;
}

std::string render_pointwise_prompt(const CandidateList& list, std::size_t target_index,
                                    const PromptTemplate& tmpl, const RenderOptions& options) {
  if (target_index >= list.candidates.size()) {
    throw Error(ErrorCode::invalid_argument, "target index out of range");
  }
  const std::string others =
      render_other_candidates(list, target_index, options.other_candidates_budget);
  return compose(tmpl, fill_slots(tmpl.body, {{"CONTEXT", list.context},
                                              {"PATIENT", patient_text(list.patient)},
                                              {"CandidateOrder", list.candidates[target_index].text},
                                              {"OtherCandidates", others}}));
}

std::string render_listwise_prompt(const CandidateList& list, const PromptTemplate& tmpl) {
  std::string lines;
  for (const auto& c : list.candidates) {
    if (!lines.empty()) lines.push_back('\n');
    lines.append(c.id).append(": ").append(c.text);
  }
  return compose(tmpl, fill_slots(tmpl.body, {{"CONTEXT", list.context},
                                              {"PATIENT", patient_text(list.patient)},
                                              {"CANDIDATES", lines}}));
}

std::string render_judge_prompt(const JudgeInput& input, const PromptTemplate& tmpl) {
  return compose(tmpl, fill_slots(tmpl.body, {{"CONTEXT", input.context},
                                              {"PATIENT", patient_text(input.patient)},
                                              {"CANDIDATE_ORDER", input.candidate_order},
                                              {"REFERENCE_LABEL", input.reference_positive ? "1" : "0"},
                                              {"COMPLETION", input.completion}}));
}

std::vector<PointwiseInstance> build_pointwise_instances(const CandidateList& list,
                                                         const PromptTemplate& tmpl,
                                                         const RenderOptions& options) {
  validate(list);
  std::vector<PointwiseInstance> out;
  out.reserve(list.candidates.size());
  for (std::size_t j = 0; j < list.candidates.size(); ++j) {
    const bool positive = list.relevant_id && list.candidates[j].id == *list.relevant_id;
    out.push_back({list.query_id, j, positive ? Label::positive : Label::negative,
                   render_pointwise_prompt(list, j, tmpl, options)});
  }
  return out;
}

}  // namespace tsrank
