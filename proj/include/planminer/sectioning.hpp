#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "planminer/corpus.hpp"
#include "planminer/textproc.hpp"

namespace planminer::sectioning {

enum class CanonicalLabel { secap, hpi, meds, other, unknown };

std::string_view to_string(CanonicalLabel label);

struct SectionHeader {
  std::size_t line_index = 0;
  std::size_t start = 0;  // byte offsets of the header prefix
  std::size_t end = 0;
  std::string raw;  // normalized header text (lowercased, before the colon)
  CanonicalLabel label = CanonicalLabel::unknown;
  int score = 0;
};

struct Section {
  std::optional<SectionHeader> header;
  std::size_t first_sentence = 0;  // index range into the note's sentence spans
  std::size_t end_sentence = 0;    // exclusive
  CanonicalLabel label = CanonicalLabel::unknown;
};

struct HeaderContext {
  bool first_line = false;
  bool after_blank = false;
};

// Header pattern -> canonical label, loaded from a TSV file. Patterns that
// also start plan blocks (the plan heading lexicon) are vetoed so plan
// headings stay inside their parent section.
class SectionLabelLexicon {
 public:
  static const SectionLabelLexicon& builtin();
  static SectionLabelLexicon from_text(std::string_view tsv);
  static SectionLabelLexicon load(const std::string& path);

  void add(std::string pattern, CanonicalLabel label);
  void veto(std::string pattern);
  std::optional<CanonicalLabel> label_for(std::string_view normalized) const;
  bool contains(std::string_view normalized) const;
  bool vetoed(std::string_view normalized) const;

 private:
  std::unordered_map<std::string, CanonicalLabel> patterns_;
  std::unordered_set<std::string> vetoed_;
};

// Scored rule detector. Cues: lexicon match, all-caps prefix, terminal
// colon, short line, first-or-after-blank position. Threshold is 2.
std::optional<SectionHeader> detect_header_line(std::string_view line, HeaderContext context,
                                                const SectionLabelLexicon& lexicon);
int header_score(std::string_view line, HeaderContext context,
                 const SectionLabelLexicon& lexicon);

// All header lines of a note, in order.
std::vector<SectionHeader> detect_headers(const corpus::ClinicalNote& note,
                                          const SectionLabelLexicon& lexicon);

// Partitions the note's sentence spans into contiguous sections, one per
// header plus a leading unlabeled section when content precedes the first
// header. Notes without headers yield a single unknown section.
std::vector<Section> segment_and_label(const std::vector<textproc::SentenceSpan>& spans,
                                       const std::vector<SectionHeader>& headers);

struct SectionedNote {
  std::vector<textproc::SentenceSpan> spans;
  std::vector<SectionHeader> headers;
  std::vector<Section> sections;
};

SectionedNote sectionize(const corpus::ClinicalNote& note, const SectionLabelLexicon& lexicon);

}  // namespace planminer::sectioning
