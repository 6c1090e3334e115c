#include "planminer/plan_extract.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <unordered_set>

#include "json.hpp"
#include "planminer/rng.hpp"
#include "planminer/rules_data.hpp"
#include "planminer/util.hpp"

namespace planminer::plan_extract {

using nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// byte length of an ASCII '-' or UTF-8 en/em dash at text[i], 0 otherwise
std::size_t dash_len(std::string_view text, std::size_t i) {
  if (i < text.size() && text[i] == '-') return 1;
  if (i + 2 < text.size() && text[i] == '\xe2' && text[i + 1] == '\x80' &&
      (text[i + 2] == '\x93' || text[i + 2] == '\x94'))
    return 3;
  return 0;
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::blank_line: return "blank_line";
    case StopReason::new_disease_heading: return "new_disease_heading";
    case StopReason::new_section: return "new_section";
    case StopReason::end_of_list: return "end_of_list";
    case StopReason::end_of_note: return "end_of_note";
  }
  return "end_of_note";
}

const HeadingLexicon& HeadingLexicon::builtin() {
  static const HeadingLexicon lexicon = from_text(rules::kHeadingLexicon);
  return lexicon;
}

HeadingLexicon HeadingLexicon::from_text(std::string_view text) {
  HeadingLexicon lex;
  for (std::string_view raw : split_lines(text)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    std::string form = lower_copy(trim(tab == std::string_view::npos ? line : line.substr(0, tab)));
    bool abbrev = tab != std::string_view::npos &&
                  trim(line.substr(tab + 1)) == std::string_view("abbrev");
    lex.add(std::move(form), abbrev);
  }
  if (lex.empty()) throw InputError("heading lexicon is empty");
  return lex;
}

HeadingLexicon HeadingLexicon::load(const std::string& path) {
  return from_text(read_file(path));
}

void HeadingLexicon::add(std::string form, bool abbreviation) {
  for (const Entry& e : entries_)
    if (e.form == form) return;
  entries_.push_back({std::move(form), abbreviation});
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.form.size() != b.form.size()) return a.form.size() > b.form.size();
    return a.form < b.form;
  });
}

std::string HeadingLexicon::fingerprint() const {
  std::string joined;
  for (const Entry& e : entries_) {
    joined += e.form;
    joined += e.abbreviation ? "*" : "";
    joined += '\n';
  }
  return hex64(fnv1a64(joined));
}

std::optional<HeadingMatch> detect_plan_heading(std::string_view line,
                                                const HeadingLexicon& lexicon) {
  std::size_t off = textproc::list_marker_len(line);
  std::string_view rest = line.substr(off);
  for (const HeadingLexicon::Entry& entry : lexicon.entries()) {
    if (!starts_with_ci(rest, entry.form)) continue;
    std::size_t p = entry.form.size();
    if (p < rest.size() && is_alnum(rest[p])) continue;  // word continues
    while (p < rest.size() && rest[p] == ' ') ++p;
    std::size_t delim = 0;
    if (p < rest.size() && rest[p] == ':')
      delim = 1;
    else
      delim = dash_len(rest, p);
    if (delim == 0) continue;
    p += delim;
    while (p < rest.size() && is_space(rest[p])) ++p;
    HeadingMatch match;
    match.entry = entry.form;
    match.content_offset = off + p;
    return match;
  }
  return std::nullopt;
}

bool is_disease_heading(std::string_view line) {
  std::size_t off = textproc::list_marker_len(line);
  if (off == 0) return false;
  std::string_view rest = line.substr(off);
  if (rest.empty() || !is_upper(rest[0])) return false;
  constexpr std::size_t kWindow = 48;
  for (std::size_t i = 0; i < rest.size() && i < kWindow; ++i) {
    char c = rest[i];
    if (c == '.' || c == ';') return false;
    if (c == ':') {
      if (i + 1 >= rest.size() || is_space(rest[i + 1])) return true;
      continue;  // "14:30" style colon
    }
    std::size_t dl = dash_len(rest, i);
    if (dl > 0) {
      const bool space_before = i > 0 && rest[i - 1] == ' ';
      const bool space_after = i + dl >= rest.size() || rest[i + dl] == ' ';
      if (space_before || space_after) return true;
    }
  }
  return false;
}

PlanSection scope_plan_section(const corpus::ClinicalNote& note,
                               const sectioning::SectionedNote& sectioned,
                               std::size_t section_index, const HeadingMatch& heading,
                               const HeadingLexicon& lexicon,
                               const sectioning::SectionLabelLexicon& label_lexicon) {
  const sectioning::Section& section = sectioned.sections.at(section_index);
  if (section.label != sectioning::CanonicalLabel::secap)
    throw PipelineError("plan heading scoped outside a secAP section in note " + note.note_id);

  const std::vector<textproc::Line> lines = textproc::note_lines(note.text);
  auto line_text = [&](std::size_t index) {
    const textproc::Line& l = lines.at(index);
    return std::string_view(note.text.data() + l.start, l.end - l.start);
  };

  PlanSection plan;
  plan.heading = heading;
  plan.parent_section = section_index;

  const std::size_t content_abs = lines.at(heading.line_index).start + heading.content_offset;

  // first content sentence: starts at or after the heading's content
  std::size_t s = section.first_sentence;
  while (s < section.end_sentence && sectioned.spans[s].start < content_abs) ++s;
  plan.first_sentence = s;
  plan.end_sentence = s;

  bool list_formatted = false;
  bool have_content = false;
  std::size_t prev_line = heading.line_index;

  for (; s < section.end_sentence; ++s) {
    const textproc::SentenceSpan& span = sectioned.spans[s];
    if (span.line_index != prev_line) {
      // lines strictly between two spans carry no sentences, i.e. are blank
      if (span.line_index > prev_line + 1) {
        plan.stop_reason = StopReason::blank_line;
        return plan;
      }
      std::string_view text = line_text(span.line_index);
      if (is_disease_heading(text)) {
        plan.stop_reason = StopReason::new_disease_heading;
        return plan;
      }
      if (sectioning::detect_header_line(text, {}, label_lexicon) ||
          detect_plan_heading(text, lexicon)) {
        plan.stop_reason = StopReason::new_section;
        return plan;
      }
      const bool indented = !text.empty() && is_space(text.front());
      if (list_formatted && !span.is_list_item && !span.is_heading_prefix && !indented) {
        plan.stop_reason = StopReason::end_of_list;
        return plan;
      }
      prev_line = span.line_index;
    }
    if (!have_content) {
      list_formatted = span.is_list_item;
      have_content = true;
    }
    plan.end_sentence = s + 1;
  }

  plan.stop_reason = section.end_sentence == sectioned.spans.size() ? StopReason::end_of_note
                                                                    : StopReason::new_section;
  return plan;
}

std::vector<PlanSection> extract_plan_sections(
    const corpus::ClinicalNote& note, const sectioning::SectionedNote& sectioned,
    const HeadingLexicon& lexicon, const sectioning::SectionLabelLexicon& label_lexicon) {
  std::vector<PlanSection> plans;
  const std::vector<textproc::Line> lines = textproc::note_lines(note.text);

  for (std::size_t si = 0; si < sectioned.sections.size(); ++si) {
    const sectioning::Section& section = sectioned.sections[si];
    if (section.label != sectioning::CanonicalLabel::secap) continue;

    std::size_t prev_line = static_cast<std::size_t>(-1);
    for (std::size_t s = section.first_sentence; s < section.end_sentence; ++s) {
      const std::size_t li = sectioned.spans[s].line_index;
      if (li == prev_line) continue;
      prev_line = li;
      if (!plans.empty() && plans.back().parent_section == si &&
          s < plans.back().end_sentence)
        continue;  // line already inside the previous plan's scope
      const textproc::Line& line = lines.at(li);
      std::string_view text(note.text.data() + line.start, line.end - line.start);
      auto match = detect_plan_heading(text, lexicon);
      if (!match) continue;
      match->line_index = li;
      PlanSection plan = scope_plan_section(note, sectioned, si, *match, lexicon, label_lexicon);
      if (plan.end_sentence > plan.first_sentence) plans.push_back(std::move(plan));
    }
  }
  return plans;
}

std::string normalize_for_dedup(std::string_view text) {
  std::string_view t = trim(text);
  std::size_t marker = textproc::list_marker_len(t);
  t = t.substr(marker);
  return collapse_ws(lower_copy(t));
}

CorpusExtraction build_noisy_dataset(const std::vector<corpus::ClinicalNote>& notes,
                                     const std::vector<sectioning::SectionedNote>& sectioned,
                                     const HeadingLexicon& lexicon,
                                     const sectioning::SectionLabelLexicon& label_lexicon,
                                     const textproc::RuleTables& tables, std::uint64_t seed) {
  if (notes.size() != sectioned.size())
    throw PipelineError("build_noisy_dataset: notes and sectioned notes differ in length");

  CorpusExtraction result;
  result.dataset.seed = seed;
  result.dataset.config_hash = lexicon.fingerprint();
  result.plan_sections.resize(notes.size());

  std::vector<LabeledSentence> positives;
  std::vector<LabeledSentence> pool;
  std::unordered_set<std::string> seen_positive;
  std::unordered_set<std::string> seen_negative;

  auto make_example = [&tables](const corpus::ClinicalNote& note,
                                const sectioning::SectionedNote& sn, std::size_t span_index,
                                bool is_plan) {
    const textproc::SentenceSpan& span = sn.spans[span_index];
    LabeledSentence ex;
    ex.text = std::string(trim(std::string_view(note.text).substr(span.start, span.end - span.start)));
    ex.tokens = textproc::tokenize_lemmatize(ex.text, tables);
    ex.is_plan = is_plan;
    ex.note_id = note.note_id;
    ex.note_type = note.note_type;
    ex.note_category = note.note_category;
    ex.provider_type = note.provider_type;
    for (const sectioning::Section& sec : sn.sections) {
      if (span_index >= sec.first_sentence && span_index < sec.end_sentence) {
        ex.section_label = std::string(sectioning::to_string(sec.label));
        break;
      }
    }
    return ex;
  };

  for (std::size_t ni = 0; ni < notes.size(); ++ni) {
    const corpus::ClinicalNote& note = notes[ni];
    const sectioning::SectionedNote& sn = sectioned[ni];
    std::vector<PlanSection> plans = extract_plan_sections(note, sn, lexicon, label_lexicon);

    std::vector<bool> in_plan(sn.spans.size(), false);
    std::vector<bool> is_plan_heading(sn.spans.size(), false);
    for (const PlanSection& plan : plans) {
      for (std::size_t s = plan.first_sentence; s < plan.end_sentence; ++s) in_plan[s] = true;
      // the heading's own prefix span, when the segmenter produced one
      for (std::size_t s = 0; s < sn.spans.size(); ++s) {
        if (sn.spans[s].line_index == plan.heading.line_index && sn.spans[s].is_heading_prefix)
          is_plan_heading[s] = true;
      }
    }

    for (const PlanSection& plan : plans) {
      for (std::size_t s = plan.first_sentence; s < plan.end_sentence; ++s) {
        if (sn.spans[s].is_heading_prefix) continue;
        LabeledSentence ex = make_example(note, sn, s, true);
        std::string norm = normalize_for_dedup(ex.text);
        if (norm.empty() || !seen_positive.insert(norm).second) continue;
        positives.push_back(std::move(ex));
      }
    }

    for (std::size_t s = 0; s < sn.spans.size(); ++s) {
      if (in_plan[s] || is_plan_heading[s]) continue;
      LabeledSentence ex = make_example(note, sn, s, false);
      std::string norm = normalize_for_dedup(ex.text);
      if (norm.empty() || seen_positive.count(norm) || !seen_negative.insert(norm).second)
        continue;
      pool.push_back(std::move(ex));
    }

    result.plan_sections[ni] = std::move(plans);
  }

  // negatives could collide with positives extracted from a later note
  std::erase_if(pool, [&seen_positive](const LabeledSentence& ex) {
    return seen_positive.count(normalize_for_dedup(ex.text)) > 0;
  });

  result.positives = positives.size();
  if (positives.empty()) {
    result.zero_positives = true;
    std::cerr << "warning: no plan headings matched; dataset is empty\n";
    return result;
  }

  Rng rng(seed);
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const std::size_t n_neg = std::min(pool.size(), positives.size());
  if (n_neg < positives.size())
    std::cerr << "warning: only " << n_neg << " distinct non-plan sentences available for "
              << positives.size() << " positives\n";

  result.dataset.examples = std::move(positives);
  for (std::size_t i = 0; i < n_neg; ++i)
    result.dataset.examples.push_back(std::move(pool[order[i]]));
  result.negatives = n_neg;
  return result;
}

std::string serialize_dataset(const NoisyDataset& dataset) {
  std::string out;
  for (const LabeledSentence& ex : dataset.examples) {
    json rec;
    rec["text"] = ex.text;
    rec["label"] = ex.is_plan ? "plan" : "nonplan";
    rec["note_id"] = ex.note_id;
    rec["section_label"] = ex.section_label;
    rec["note_type"] = ex.note_type;
    rec["note_category"] = ex.note_category;
    rec["provider_type"] = ex.provider_type;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

NoisyDataset load_dataset(const std::string& path, const textproc::RuleTables& tables) {
  const std::string content = read_file(path);
  NoisyDataset dataset;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError("malformed dataset record at line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    LabeledSentence ex;
    for (const char* key : {"text", "label", "note_id"})
      if (!rec.contains(key))
        throw InputError("dataset record at line " + std::to_string(line_no) +
                         " is missing \"" + key + "\"");
    ex.text = rec["text"].get<std::string>();
    const std::string label = rec["label"].get<std::string>();
    if (label != "plan" && label != "nonplan")
      throw InputError("dataset record at line " + std::to_string(line_no) +
                       ": label must be \"plan\" or \"nonplan\"");
    ex.is_plan = label == "plan";
    ex.note_id = rec["note_id"].get<std::string>();
    ex.section_label = rec.value("section_label", "unknown");
    ex.note_type = rec.value("note_type", "unknown");
    ex.note_category = rec.value("note_category", "unknown");
    ex.provider_type = rec.value("provider_type", "unknown");
    ex.tokens = textproc::tokenize_lemmatize(ex.text, tables);
    dataset.examples.push_back(std::move(ex));
  }
  return dataset;
}

}  // namespace planminer::plan_extract
