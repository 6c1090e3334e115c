#include "planminer/sectioning.hpp"

#include <cctype>

#include "planminer/rules_data.hpp"
#include "planminer/util.hpp"

namespace planminer::sectioning {

namespace {

CanonicalLabel parse_label(std::string_view name) {
  if (name == "secap") return CanonicalLabel::secap;
  if (name == "hpi") return CanonicalLabel::hpi;
  if (name == "meds") return CanonicalLabel::meds;
  if (name == "other") return CanonicalLabel::other;
  if (name == "unknown") return CanonicalLabel::unknown;
  throw InputError("unknown section label \"" + std::string(name) + "\"");
}

// candidate header text: before the first colon, else the whole trimmed line
std::string_view header_candidate(std::string_view trimmed) {
  std::size_t colon = trimmed.find(':');
  if (colon != std::string_view::npos && colon <= 48) return trim(trimmed.substr(0, colon));
  return trimmed;
}

bool all_caps(std::string_view text) {
  std::size_t letters = 0;
  for (char c : text) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      if (!std::isupper(u)) return false;
      ++letters;
    } else if (c != ' ' && c != '/' && c != '&' && c != '\'') {
      return false;
    }
  }
  return letters >= 2;
}

}  // namespace

std::string_view to_string(CanonicalLabel label) {
  switch (label) {
    case CanonicalLabel::secap: return "secap";
    case CanonicalLabel::hpi: return "hpi";
    case CanonicalLabel::meds: return "meds";
    case CanonicalLabel::other: return "other";
    case CanonicalLabel::unknown: return "unknown";
  }
  return "unknown";
}

const SectionLabelLexicon& SectionLabelLexicon::builtin() {
  static const SectionLabelLexicon lexicon = [] {
    SectionLabelLexicon lex = from_text(rules::kSectionLabels);
    // plan headings are sub-section markers, not section boundaries
    for (std::string_view raw : split_lines(rules::kHeadingLexicon)) {
      std::string_view line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      std::size_t tab = line.find('\t');
      lex.veto(lower_copy(trim(tab == std::string_view::npos ? line : line.substr(0, tab))));
    }
    return lex;
  }();
  return lexicon;
}

SectionLabelLexicon SectionLabelLexicon::from_text(std::string_view tsv) {
  SectionLabelLexicon lex;
  for (std::string_view raw : split_lines(tsv)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw InputError("section label line needs two tab-separated fields: " +
                       std::string(line));
    lex.add(collapse_ws(lower_copy(trim(line.substr(0, tab)))),
            parse_label(trim(line.substr(tab + 1))));
  }
  return lex;
}

SectionLabelLexicon SectionLabelLexicon::load(const std::string& path) {
  return from_text(read_file(path));
}

void SectionLabelLexicon::add(std::string pattern, CanonicalLabel label) {
  patterns_[std::move(pattern)] = label;
}

void SectionLabelLexicon::veto(std::string pattern) { vetoed_.insert(std::move(pattern)); }

std::optional<CanonicalLabel> SectionLabelLexicon::label_for(std::string_view normalized) const {
  auto it = patterns_.find(std::string(normalized));
  if (it == patterns_.end()) return std::nullopt;
  return it->second;
}

bool SectionLabelLexicon::contains(std::string_view normalized) const {
  return patterns_.count(std::string(normalized)) > 0;
}

bool SectionLabelLexicon::vetoed(std::string_view normalized) const {
  return vetoed_.count(std::string(normalized)) > 0;
}

int header_score(std::string_view line, HeaderContext context,
                 const SectionLabelLexicon& lexicon) {
  std::string_view trimmed = trim(line);
  if (trimmed.empty()) return 0;
  if (textproc::list_marker_len(trimmed) > 0) return 0;
  bool has_alpha = false;
  for (char c : trimmed)
    if (std::isalpha(static_cast<unsigned char>(c))) has_alpha = true;
  if (!has_alpha) return 0;

  std::string_view candidate = header_candidate(trimmed);
  if (candidate.empty() || candidate.size() > 48) return 0;
  const std::string normalized = collapse_ws(lower_copy(candidate));
  if (lexicon.vetoed(normalized)) return 0;

  int score = 0;
  if (lexicon.contains(normalized)) ++score;
  if (all_caps(candidate)) ++score;
  if (trimmed.back() == ':') ++score;
  if (trimmed.size() <= 40) ++score;
  if (context.first_line || context.after_blank) ++score;
  return score;
}

std::optional<SectionHeader> detect_header_line(std::string_view line, HeaderContext context,
                                                const SectionLabelLexicon& lexicon) {
  constexpr int kThreshold = 2;
  int score = header_score(line, context, lexicon);
  if (score < kThreshold) return std::nullopt;

  std::string_view trimmed = trim(line);
  std::string_view candidate = header_candidate(trimmed);
  SectionHeader header;
  header.raw = collapse_ws(lower_copy(candidate));
  header.label = lexicon.label_for(header.raw).value_or(CanonicalLabel::unknown);
  header.score = score;
  return header;
}

std::vector<SectionHeader> detect_headers(const corpus::ClinicalNote& note,
                                          const SectionLabelLexicon& lexicon) {
  std::vector<SectionHeader> headers;
  const std::vector<textproc::Line> lines = textproc::note_lines(note.text);
  bool prev_blank = true;
  for (const textproc::Line& line : lines) {
    std::string_view text(note.text.data() + line.start, line.end - line.start);
    if (textproc::line_is_blank(text)) {
      prev_blank = true;
      continue;
    }
    HeaderContext ctx{line.index == 0, prev_blank};
    prev_blank = false;
    auto header = detect_header_line(text, ctx, lexicon);
    if (!header) continue;
    header->line_index = line.index;
    std::string_view trimmed = trim(text);
    header->start = line.start + static_cast<std::size_t>(trimmed.data() - text.data());
    std::size_t colon = trimmed.find(':');
    std::size_t prefix_len = colon != std::string_view::npos && colon <= 48
                                 ? colon + 1
                                 : trimmed.size();
    header->end = header->start + prefix_len;
    headers.push_back(std::move(*header));
  }
  return headers;
}

std::vector<Section> segment_and_label(const std::vector<textproc::SentenceSpan>& spans,
                                       const std::vector<SectionHeader>& headers) {
  std::vector<Section> sections;
  if (spans.empty()) return sections;

  // sentence index at which each header's section begins (first span on the
  // header's line)
  std::vector<std::pair<std::size_t, const SectionHeader*>> starts;
  std::size_t h = 0;
  for (std::size_t s = 0; s < spans.size() && h < headers.size();) {
    if (spans[s].line_index < headers[h].line_index) {
      ++s;
    } else if (spans[s].line_index == headers[h].line_index) {
      starts.emplace_back(s, &headers[h]);
      ++h;
    } else {
      ++h;  // header line produced no spans; should not happen
    }
  }

  if (starts.empty() || starts.front().first > 0) {
    Section lead;
    lead.first_sentence = 0;
    lead.end_sentence = starts.empty() ? spans.size() : starts.front().first;
    lead.label = CanonicalLabel::unknown;
    sections.push_back(std::move(lead));
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Section sec;
    sec.header = *starts[i].second;
    sec.first_sentence = starts[i].first;
    sec.end_sentence = i + 1 < starts.size() ? starts[i + 1].first : spans.size();
    sec.label = starts[i].second->label;
    sections.push_back(std::move(sec));
  }
  return sections;
}

SectionedNote sectionize(const corpus::ClinicalNote& note, const SectionLabelLexicon& lexicon) {
  SectionedNote result;
  result.spans = textproc::segment_sentences(note);
  result.headers = detect_headers(note, lexicon);
  result.sections = segment_and_label(result.spans, result.headers);
  return result;
}

}  // namespace planminer::sectioning
