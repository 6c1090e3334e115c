#include "planminer/textproc.hpp"

#include <algorithm>
#include <cctype>

#include "planminer/rules_data.hpp"
#include "planminer/util.hpp"

namespace planminer::textproc {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "vs", "etc", "fig", "rev"};
  return set;
}

const std::unordered_set<std::string>& modals() {
  static const std::unordered_set<std::string> set = {
      "will", "shall", "may", "might", "can", "could", "would", "should", "must"};
  return set;
}

// for-each over non-comment, non-blank lines of a rule file
template <class Fn>
void rule_lines(std::string_view text, Fn&& fn) {
  for (std::string_view raw : split_lines(text)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    fn(line);
  }
}

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      fields.emplace_back(trim(line.substr(pos)));
      break;
    }
    fields.emplace_back(trim(line.substr(pos, next - pos)));
    pos = next + 1;
  }
  return fields;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > b) words.emplace_back(lower_copy(text.substr(b, i - b)));
  }
  return words;
}

}  // namespace

// --- ConceptDictionary ------------------------------------------------------

void ConceptDictionary::add(const std::vector<std::string>& lemmas, std::string concept_id,
                            std::string semantic_group) {
  if (lemmas.empty()) return;
  Entry e{lemmas, std::move(concept_id), std::move(semantic_group)};
  auto& bucket = by_first_[lemmas.front()];
  bucket.push_back(std::move(e));
  std::sort(bucket.begin(), bucket.end(), [](const Entry& a, const Entry& b) {
    if (a.lemmas.size() != b.lemmas.size()) return a.lemmas.size() > b.lemmas.size();
    return a.lemmas < b.lemmas;
  });
}

const ConceptDictionary::Entry* ConceptDictionary::longest_match(
    const std::vector<Token>& tokens, std::size_t pos) const {
  auto it = by_first_.find(tokens[pos].lemma);
  if (it == by_first_.end()) return nullptr;
  for (const Entry& e : it->second) {
    if (pos + e.lemmas.size() > tokens.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < e.lemmas.size(); ++k) {
      if (tokens[pos + k].lemma != e.lemmas[k]) {
        ok = false;
        break;
      }
    }
    if (ok) return &e;
  }
  return nullptr;
}

std::size_t ConceptDictionary::size() const {
  std::size_t n = 0;
  for (const auto& [first, entries] : by_first_) n += entries.size();
  return n;
}

// --- RuleTables -------------------------------------------------------------

const RuleTables& RuleTables::builtin() {
  static const RuleTables tables = from_text(
      rules::kLemmaExceptions, rules::kVerbLexicon, rules::kNegationTriggers,
      rules::kHypotheticalTriggers, rules::kConceptDictionary);
  return tables;
}

RuleTables RuleTables::load_dir(const std::string& dir) {
  auto file = [&dir](const char* name) { return read_file(dir + "/" + name); };
  return from_text(file("lemma_exceptions.txt"), file("verb_lexicon.tsv"),
                   file("negation_triggers.txt"), file("hypothetical_triggers.txt"),
                   file("concept_dictionary.tsv"));
}

RuleTables RuleTables::from_text(std::string_view lemma_exceptions,
                                 std::string_view verb_lexicon,
                                 std::string_view negation_triggers,
                                 std::string_view hypothetical_triggers,
                                 std::string_view concept_dictionary) {
  RuleTables t;

  rule_lines(lemma_exceptions, [&t](std::string_view line) {
    std::size_t sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos)
      throw InputError("lemma exception line needs two fields: " + std::string(line));
    std::string word = lower_copy(trim(line.substr(0, sep)));
    std::string lemma = lower_copy(trim(line.substr(sep)));
    t.lemma_exceptions_[word] = lemma;
  });

  rule_lines(verb_lexicon, [&t](std::string_view line) {
    std::vector<std::string> fields = split_fields(line, '\t');
    const std::string base = lower_copy(fields[0]);
    t.verb_bases_.insert(base);
    auto add_forms = [&t, &base](const std::string& csv, bool past) {
      for (const std::string& form : split_fields(csv, ',')) {
        if (form.empty()) continue;
        const std::string lf = lower_copy(form);
        t.irregular_to_base_.emplace(lf, base);
        if (past) t.past_forms_.insert(lf);
      }
    };
    if (fields.size() > 1) add_forms(fields[1], true);
    if (fields.size() > 2) add_forms(fields[2], false);
  });

  auto load_triggers = [](std::string_view text, std::vector<std::vector<std::string>>& out) {
    rule_lines(text, [&out](std::string_view line) { out.push_back(split_words(line)); });
    // longest phrases first so trigger matching is greedy
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.size() != b.size()) return a.size() > b.size();
      return a < b;
    });
  };
  load_triggers(negation_triggers, t.negation_triggers_);
  load_triggers(hypothetical_triggers, t.hypothetical_triggers_);

  rule_lines(concept_dictionary, [&t](std::string_view line) {
    std::vector<std::string> fields = split_fields(line, '\t');
    if (fields.size() < 3)
      throw InputError("concept dictionary line needs 3 tab-separated fields: " +
                       std::string(line));
    std::vector<std::string> lemmas;
    for (const std::string& word : split_words(fields[0])) lemmas.push_back(t.lemma(word));
    t.concepts_.add(lemmas, fields[1], fields[2]);
  });

  return t;
}

bool RuleTables::is_verb_base(std::string_view lemma) const {
  return verb_bases_.count(std::string(lemma)) > 0;
}

bool RuleTables::is_past_form(std::string_view surface) const {
  return past_forms_.count(lower_copy(surface)) > 0;
}

bool RuleTables::is_modal(std::string_view surface) const {
  return modals().count(lower_copy(surface)) > 0;
}

std::string RuleTables::lemma(std::string_view surface) const {
  std::string w = lower_copy(surface);
  if (auto it = lemma_exceptions_.find(w); it != lemma_exceptions_.end()) return it->second;
  if (auto it = irregular_to_base_.find(w); it != irregular_to_base_.end()) return it->second;

  if (w.size() > 2 && w.ends_with("'s")) w.resize(w.size() - 2);

  auto ends = [&w](std::string_view suffix) { return w.ends_with(suffix); };
  // resolves an -ed/-ing stem against the verb lexicon: bare stem, restored
  // final e, or un-doubled final consonant
  auto resolve_stem = [this](std::string stem) {
    if (verb_bases_.count(stem)) return stem;
    if (verb_bases_.count(stem + "e")) return stem + "e";
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) {
      std::string undoubled = stem.substr(0, stem.size() - 1);
      if (verb_bases_.count(undoubled)) return undoubled;
      if (stem.back() != 'l' && stem.back() != 's') return undoubled;
    }
    return stem;
  };

  if (w.size() >= 4 && ends("ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() >= 5 && ends("sses")) return w.substr(0, w.size() - 2);
  if (w.size() >= 4 && ends("es")) {
    std::string_view stem(w.data(), w.size() - 2);
    if (stem.ends_with("x") || stem.ends_with("z") || stem.ends_with("ch") ||
        stem.ends_with("sh"))
      return std::string(stem);
  }
  if (w.size() >= 5 && ends("ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    if (stem.size() >= 3) return resolve_stem(std::move(stem));
    return w;
  }
  if (w.size() >= 4 && ends("ed") && !ends("eed")) {
    std::string stem = w.substr(0, w.size() - 2);
    if (stem.size() >= 2) return resolve_stem(std::move(stem));
    return w;
  }
  if (w.size() >= 3 && ends("s") && !ends("ss") && !ends("us") && !ends("is"))
    return w.substr(0, w.size() - 1);
  return w;
}

// --- Line helpers -----------------------------------------------------------

std::vector<Line> note_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  std::size_t index = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back({pos, end, index});
    ++index;
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

bool line_is_blank(std::string_view line) { return trim(line).empty(); }

std::size_t list_marker_len(std::string_view line) {
  std::size_t i = 0;
  if (i < line.size() && (line[i] == '-' || line[i] == '*')) {
    ++i;
  } else {
    std::size_t digits = 0;
    while (i < line.size() && is_digit(line[i]) && digits < 3) {
      ++i;
      ++digits;
    }
    if (digits == 0) return 0;
    if (i >= line.size() || (line[i] != '.' && line[i] != ')')) return 0;
    ++i;
  }
  if (i >= line.size() || !is_space(line[i])) return 0;
  while (i < line.size() && is_space(line[i])) ++i;
  return i;
}

std::size_t heading_prefix_len(std::string_view line) {
  constexpr std::size_t kMaxPrefix = 32;
  if (line.empty() || !std::isalpha(static_cast<unsigned char>(line[0]))) return 0;
  std::size_t i = 0;
  while (i < line.size() && i < kMaxPrefix) {
    char c = line[i];
    if (c == ':') {
      // colon must end the line or be followed by whitespace
      if (i + 1 < line.size() && !is_space(line[i + 1])) return 0;
      return i + 1;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == ' ' || c == '/' || c == '&' ||
        c == '\'') {
      ++i;
      continue;
    }
    return 0;
  }
  return 0;
}

// --- Sentence segmentation ---------------------------------------------------

namespace {

// last word (letters only) ending at text[end), lowercased
std::string word_before(std::string_view text, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && std::isalpha(static_cast<unsigned char>(text[b - 1]))) --b;
  return lower_copy(text.substr(b, end - b));
}

bool splits_sentence(std::string_view text, std::size_t punct_begin, std::size_t punct_end) {
  // require whitespace then an upper-case letter, digit or opening bracket
  std::size_t next = punct_end;
  if (next >= text.size() || !is_space(text[next])) return false;
  while (next < text.size() && is_space(text[next])) ++next;
  if (next >= text.size()) return false;
  char c = text[next];
  if (!is_upper(c) && !is_digit(c) && c != '(' && c != '"') return false;

  if (text[punct_begin] == '.') {
    std::string prev = word_before(text, punct_begin);
    if (prev.size() == 1 && is_upper(text[punct_begin - 1])) return false;  // initials
    if (abbreviations().count(prev)) return false;
  }
  return true;
}

}  // namespace

std::vector<SentenceSpan> segment_text(std::string_view text, std::string_view note_id) {
  std::vector<SentenceSpan> spans;
  for (const Line& line : note_lines(text)) {
    std::string_view raw(text.data() + line.start, line.end - line.start);
    if (line_is_blank(raw)) continue;

    std::size_t cur = 0;  // offset within raw
    while (cur < raw.size() && is_space(raw[cur])) ++cur;
    const bool indented = cur > 0;

    bool first_chunk_is_list = false;

    // peel off "HPI:" / "1. Plan:" style prefixes at the line start
    if (!indented) {
      std::size_t marker = list_marker_len(raw.substr(cur));
      std::size_t prefix = heading_prefix_len(raw.substr(cur));
      if (prefix > 0) {
        spans.push_back({std::string(note_id), line.start + cur, line.start + cur + prefix,
                         line.index, false, true});
        cur += prefix;
        while (cur < raw.size() && is_space(raw[cur])) ++cur;
        marker = list_marker_len(raw.substr(cur));
        if (marker > 0) first_chunk_is_list = true;
      } else if (marker > 0) {
        std::size_t inner_prefix = heading_prefix_len(raw.substr(cur + marker));
        if (inner_prefix > 0) {
          // numbered heading such as "1. Plan:" forms one prefix span
          spans.push_back({std::string(note_id), line.start + cur,
                           line.start + cur + marker + inner_prefix, line.index, true, true});
          cur += marker + inner_prefix;
          while (cur < raw.size() && is_space(raw[cur])) ++cur;
        } else {
          first_chunk_is_list = true;
        }
      }
    }

    const bool in_list_item = first_chunk_is_list;
    bool first_sentence_on_line = true;
    std::size_t sent_begin = cur;
    std::size_t i = cur;
    auto flush = [&](std::size_t end) {
      // trim the span to its non-whitespace extent
      std::size_t b = sent_begin;
      std::size_t e = end;
      while (b < e && is_space(raw[b])) ++b;
      while (e > b && is_space(raw[e - 1])) --e;
      if (b < e) {
        spans.push_back({std::string(note_id), line.start + b, line.start + e, line.index,
                         in_list_item && first_sentence_on_line, false});
        first_sentence_on_line = false;
      }
      sent_begin = end;
    };

    while (i < raw.size()) {
      char c = raw[i];
      if (c == '.' || c == '!' || c == '?') {
        std::size_t run_end = i;
        while (run_end < raw.size() &&
               (raw[run_end] == '.' || raw[run_end] == '!' || raw[run_end] == '?'))
          ++run_end;
        if (splits_sentence(raw, i, run_end)) {
          flush(run_end);
          i = run_end;
          continue;
        }
        i = run_end;
        continue;
      }
      if (c == ';' && !in_list_item) {
        flush(i + 1);
        ++i;
        continue;
      }
      ++i;
    }
    flush(raw.size());
  }
  return spans;
}

std::vector<SentenceSpan> segment_sentences(const corpus::ClinicalNote& note) {
  return segment_text(note.text, note.note_id);
}

// --- Tokenization ------------------------------------------------------------

std::vector<Token> tokenize_lemmatize(std::string_view sentence, const RuleTables& tables) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < sentence.size()) {
    if (!is_alnum(sentence[i])) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < sentence.size()) {
      char c = sentence[i];
      if (is_alnum(c)) {
        ++i;
        continue;
      }
      const bool joiner = c == '\'' || c == '-' || c == '/' ||
                          (c == '.' && i > b && is_digit(sentence[i - 1]));
      if (joiner && i + 1 < sentence.size() && is_alnum(sentence[i + 1]) &&
          (c != '.' || is_digit(sentence[i + 1]))) {
        ++i;
        continue;
      }
      break;
    }
    Token tok;
    tok.surface = std::string(sentence.substr(b, i - b));
    tok.lemma = tables.lemma(tok.surface);
    tok.position = tokens.size();
    if (tables.is_modal(tok.surface))
      tok.coarse_pos = CoarsePos::modal;
    else if (tables.is_verb_base(tok.lemma))
      tok.coarse_pos = CoarsePos::verb;
    tokens.push_back(std::move(tok));

    // scan the gap to the next token for clause punctuation
    while (i < sentence.size() && !is_alnum(sentence[i])) {
      char c = sentence[i];
      if (c == ',' || c == ';' || c == ':' || c == '.' || c == '!' || c == '?')
        tokens.back().clause_break_after = true;
      ++i;
    }
  }
  return tokens;
}

// --- Concept matching ---------------------------------------------------------

std::vector<ConceptMatch> match_concepts(const std::vector<Token>& tokens,
                                         const ConceptDictionary& dictionary) {
  std::vector<ConceptMatch> matches;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const ConceptDictionary::Entry* e = dictionary.longest_match(tokens, i);
    if (e == nullptr) {
      ++i;
      continue;
    }
    matches.push_back({e->concept_id, i, i + e->lemmas.size(), e->semantic_group});
    i += e->lemmas.size();
  }
  return matches;
}

// --- Verb analysis -------------------------------------------------------------

namespace {

bool is_base_verb(const Token& t) {
  return t.coarse_pos == CoarsePos::verb && lower_copy(t.surface) == t.lemma;
}

bool is_present_verb(const Token& t) {
  if (t.coarse_pos != CoarsePos::verb) return false;
  static const std::unordered_set<std::string> present_irregulars = {"is", "are", "am",
                                                                     "has", "does", "goes"};
  const std::string lw = lower_copy(t.surface);
  return lw == t.lemma || lw == t.lemma + "s" || lw == t.lemma + "es" ||
         present_irregulars.count(lw) > 0;
}

}  // namespace

VerbProfile analyze_verbs(const std::vector<Token>& tokens, const RuleTables& tables) {
  VerbProfile profile;
  if (tokens.empty()) return profile;

  profile.imperative_start = is_base_verb(tokens[0]);

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    const std::string lw = lower_copy(t.surface);

    if (lw == "will" || lw == "shall" || lw == "may") {
      for (std::size_t j = i + 1; j < tokens.size() && j <= i + 2; ++j) {
        if (is_base_verb(tokens[j])) {
          profile.has_future = true;
          break;
        }
      }
    }
    if (lw == "going" && i + 1 < tokens.size() && lower_copy(tokens[i + 1].surface) == "to")
      profile.has_future = true;

    if (tables.is_past_form(lw) ||
        (t.coarse_pos == CoarsePos::verb && lw.size() > 2 && lw.ends_with("ed") &&
         lw != t.lemma))
      profile.has_past = true;

    if (is_present_verb(t)) profile.has_present = true;

    if (!profile.head_verb_lemma && t.coarse_pos == CoarsePos::verb)
      profile.head_verb_lemma = t.lemma;
  }
  return profile;
}

// --- Assertion detection ---------------------------------------------------------

namespace {

// longest trigger phrase matching at tokens[pos..], 0 if none
std::size_t match_trigger(const std::vector<Token>& tokens, std::size_t pos,
                          const std::vector<std::vector<std::string>>& triggers) {
  for (const auto& phrase : triggers) {
    if (pos + phrase.size() > tokens.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) {
      if (lower_copy(tokens[pos + k].surface) != phrase[k]) {
        ok = false;
        break;
      }
    }
    if (ok) return phrase.size();
  }
  return 0;
}

}  // namespace

AssertionFlags detect_assertions(const std::vector<Token>& tokens, const RuleTables& tables) {
  AssertionFlags flags;
  constexpr std::size_t kScopeWindow = 5;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (std::size_t len = match_trigger(tokens, i, tables.negation_triggers()); len > 0) {
      // scope: up to 5 tokens after the trigger, stopped by "but" or a clause break
      bool scoped = false;
      std::size_t j = i + len;
      if (!tokens[i + len - 1].clause_break_after) {
        for (; j < tokens.size() && j < i + len + kScopeWindow; ++j) {
          if (lower_copy(tokens[j].surface) == "but") break;
          scoped = true;
          if (tokens[j].clause_break_after) break;
        }
      }
      if (scoped) {
        flags.negated = true;
        flags.trigger_spans.push_back({AssertionKind::negation, i, i + len});
      }
    }
    if (std::size_t len = match_trigger(tokens, i, tables.hypothetical_triggers()); len > 0) {
      flags.hypothetical = true;
      flags.trigger_spans.push_back({AssertionKind::hypothetical, i, i + len});
    }
  }
  return flags;
}

}  // namespace planminer::textproc
