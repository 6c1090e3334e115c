#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace planminer::corpus {

// One clinical document. Metadata fields default to "unknown" when a source
// record omits them.
struct ClinicalNote {
  std::string note_id;
  std::string patient_id = "unknown";
  std::string note_type = "unknown";
  std::string note_category = "unknown";
  std::string provider_type = "unknown";
  std::string text;
};

// Sentence-level ground truth: [start,end) byte offsets into the note text.
struct GroundTruthSpan {
  std::string note_id;
  std::size_t start = 0;
  std::size_t end = 0;
  bool is_plan = false;
};

// Lightweight references used by compute_stats so this module does not
// depend on the sectioning or extraction types.
struct SectionRef {
  std::string note_id;
  bool is_secap = false;
};

struct PlanSectionRef {
  std::string note_id;
  std::size_t section_index = 0;  // index into the SectionRef vector
  std::size_t sentence_count = 0;
};

struct CorpusStats {
  std::size_t notes_total = 0;
  std::size_t notes_with_secap = 0;
  std::size_t notes_with_plan_headings = 0;
  std::size_t secap_sections = 0;
  std::size_t secap_with_plan_headings = 0;
  std::size_t plan_sentences = 0;
  // child/parent fractions, 0 when the parent count is 0
  double secap_note_fraction = 0.0;
  double plan_headed_note_fraction = 0.0;
  double plan_headed_section_fraction = 0.0;
};

std::vector<ClinicalNote> load_corpus(const std::string& path);
std::string serialize_corpus(const std::vector<ClinicalNote>& notes);
void save_corpus(const std::vector<ClinicalNote>& notes, const std::string& path);

std::vector<GroundTruthSpan> load_ground_truth(const std::string& path);
std::string serialize_ground_truth(const std::vector<GroundTruthSpan>& spans);
void save_ground_truth(const std::vector<GroundTruthSpan>& spans, const std::string& path);

CorpusStats compute_stats(const std::vector<ClinicalNote>& notes,
                          const std::vector<SectionRef>& sections,
                          const std::vector<PlanSectionRef>& plan_sections);

std::string stats_markdown(const CorpusStats& stats);

}  // namespace planminer::corpus
