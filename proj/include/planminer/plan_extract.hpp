#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planminer/corpus.hpp"
#include "planminer/sectioning.hpp"
#include "planminer/textproc.hpp"

namespace planminer::plan_extract {

// Surface forms that open a plan block ("Plan:", "P:", ...).
class HeadingLexicon {
 public:
  struct Entry {
    std::string form;  // case-normalized
    bool abbreviation = false;
  };

  static const HeadingLexicon& builtin();
  static HeadingLexicon from_text(std::string_view text);
  static HeadingLexicon load(const std::string& path);

  void add(std::string form, bool abbreviation = false);
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::string fingerprint() const;

 private:
  std::vector<Entry> entries_;  // sorted longest-first for greedy matching
};

enum class StopReason { blank_line, new_disease_heading, new_section, end_of_list, end_of_note };

std::string_view to_string(StopReason reason);

struct HeadingMatch {
  std::size_t line_index = 0;
  std::string entry;               // lexicon form that matched
  std::size_t content_offset = 0;  // byte offset of the content after the delimiter
};

struct PlanSection {
  HeadingMatch heading;
  std::size_t first_sentence = 0;  // content range into the note's sentence spans
  std::size_t end_sentence = 0;    // exclusive
  std::size_t parent_section = 0;  // index into SectionedNote::sections, must be secAP
  StopReason stop_reason = StopReason::end_of_note;
};

struct LabeledSentence {
  std::string text;
  std::vector<textproc::Token> tokens;
  bool is_plan = false;
  std::string note_id;
  std::string section_label = "unknown";
  std::string note_type = "unknown";
  std::string note_category = "unknown";
  std::string provider_type = "unknown";
};

struct NoisyDataset {
  std::vector<LabeledSentence> examples;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Matches a plan heading at the start of a line (after optional list
// numbering), case-insensitively, requiring ':' or '-' after the entry.
std::optional<HeadingMatch> detect_plan_heading(std::string_view line,
                                                const HeadingLexicon& lexicon);

// "2. Smoking – ..." style line: numbering, capitalized term, then a dash or
// colon within the first 48 bytes.
bool is_disease_heading(std::string_view line);

// Scopes the sentences of one plan section from the heading's content to the
// first stop condition. The returned range may be empty (caller drops it).
PlanSection scope_plan_section(const corpus::ClinicalNote& note,
                               const sectioning::SectionedNote& sectioned,
                               std::size_t section_index, const HeadingMatch& heading,
                               const HeadingLexicon& lexicon,
                               const sectioning::SectionLabelLexicon& label_lexicon);

// All non-empty plan sections of a note, scanning secAP sections only.
std::vector<PlanSection> extract_plan_sections(
    const corpus::ClinicalNote& note, const sectioning::SectionedNote& sectioned,
    const HeadingLexicon& lexicon, const sectioning::SectionLabelLexicon& label_lexicon);

// lowercase, collapsed whitespace, list markers stripped
std::string normalize_for_dedup(std::string_view text);

struct CorpusExtraction {
  NoisyDataset dataset;
  // per note, parallel to the input collection
  std::vector<std::vector<PlanSection>> plan_sections;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  bool zero_positives = false;
};

CorpusExtraction build_noisy_dataset(const std::vector<corpus::ClinicalNote>& notes,
                                     const std::vector<sectioning::SectionedNote>& sectioned,
                                     const HeadingLexicon& lexicon,
                                     const sectioning::SectionLabelLexicon& label_lexicon,
                                     const textproc::RuleTables& tables, std::uint64_t seed);

std::string serialize_dataset(const NoisyDataset& dataset);
NoisyDataset load_dataset(const std::string& path, const textproc::RuleTables& tables);

}  // namespace planminer::plan_extract
