#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "planminer/corpus.hpp"

namespace planminer::textproc {

struct SentenceSpan {
  std::string note_id;
  std::size_t start = 0;  // byte offsets into the note text, [start,end)
  std::size_t end = 0;
  std::size_t line_index = 0;  // first source line of the span
  bool is_list_item = false;   // span begins with an enumeration marker
  bool is_heading_prefix = false;  // "HPI:"-style line prefix split off as its own span
};

enum class CoarsePos { verb, modal, other };

struct Token {
  std::string surface;
  std::string lemma;
  std::size_t position = 0;
  CoarsePos coarse_pos = CoarsePos::other;
  // set when clause punctuation (, ; : . ! ?) separates this token from the next
  bool clause_break_after = false;
};

struct ConceptMatch {
  std::string concept_id;
  std::size_t begin_token = 0;
  std::size_t end_token = 0;  // exclusive
  std::string semantic_group;
};

struct VerbProfile {
  bool has_future = false;
  bool has_past = false;
  bool has_present = false;
  bool imperative_start = false;
  std::optional<std::string> head_verb_lemma;
};

enum class AssertionKind { negation, hypothetical };

struct TriggerSpan {
  AssertionKind kind = AssertionKind::negation;
  std::size_t begin_token = 0;
  std::size_t end_token = 0;  // exclusive
};

struct AssertionFlags {
  bool negated = false;
  bool hypothetical = false;
  std::vector<TriggerSpan> trigger_spans;
};

// Concept dictionary: lemma phrase -> (concept id, semantic group).
// Lookup is greedy longest-match, left to right, over token lemmas.
class ConceptDictionary {
 public:
  struct Entry {
    std::vector<std::string> lemmas;
    std::string concept_id;
    std::string semantic_group;
  };

  void add(const std::vector<std::string>& lemmas, std::string concept_id,
           std::string semantic_group);
  // longest entry starting with `first` that matches lemmas[pos..]; 0 if none
  const Entry* longest_match(const std::vector<Token>& tokens, std::size_t pos) const;
  bool empty() const { return by_first_.empty(); }
  std::size_t size() const;

 private:
  std::unordered_map<std::string, std::vector<Entry>> by_first_;
};

// Editable rule tables backing the pipeline: lemma exceptions, verb lexicon,
// assertion triggers and the concept dictionary. builtin() returns tables
// compiled in from the files under data/; load_dir() reads the same formats
// from disk so the tables can be changed without a rebuild.
class RuleTables {
 public:
  static const RuleTables& builtin();
  static RuleTables load_dir(const std::string& dir);
  static RuleTables from_text(std::string_view lemma_exceptions,
                              std::string_view verb_lexicon,
                              std::string_view negation_triggers,
                              std::string_view hypothetical_triggers,
                              std::string_view concept_dictionary);

  std::string lemma(std::string_view surface) const;
  bool is_verb_base(std::string_view lemma) const;
  bool is_past_form(std::string_view surface) const;
  bool is_modal(std::string_view surface) const;

  const std::vector<std::vector<std::string>>& negation_triggers() const {
    return negation_triggers_;
  }
  const std::vector<std::vector<std::string>>& hypothetical_triggers() const {
    return hypothetical_triggers_;
  }
  const ConceptDictionary& concepts() const { return concepts_; }

 private:
  std::unordered_map<std::string, std::string> lemma_exceptions_;
  std::unordered_set<std::string> verb_bases_;
  std::unordered_map<std::string, std::string> irregular_to_base_;
  std::unordered_set<std::string> past_forms_;
  std::vector<std::vector<std::string>> negation_triggers_;
  std::vector<std::vector<std::string>> hypothetical_triggers_;
  ConceptDictionary concepts_;
};

// Line structure helpers shared with sectioning and extraction.
struct Line {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive, excludes the newline
  std::size_t index = 0;
};

std::vector<Line> note_lines(std::string_view text);
bool line_is_blank(std::string_view line);
// length of a leading "1." / "1)" / "-" / "*" enumeration marker, 0 if none
std::size_t list_marker_len(std::string_view line);
// length of a leading "WORD:"/"Two Words:" heading prefix including the
// colon, 0 if none
std::size_t heading_prefix_len(std::string_view line);

std::vector<SentenceSpan> segment_text(std::string_view text, std::string_view note_id);
std::vector<SentenceSpan> segment_sentences(const corpus::ClinicalNote& note);

std::vector<Token> tokenize_lemmatize(std::string_view sentence, const RuleTables& tables);

std::vector<ConceptMatch> match_concepts(const std::vector<Token>& tokens,
                                         const ConceptDictionary& dictionary);

VerbProfile analyze_verbs(const std::vector<Token>& tokens, const RuleTables& tables);

AssertionFlags detect_assertions(const std::vector<Token>& tokens, const RuleTables& tables);

}  // namespace planminer::textproc
