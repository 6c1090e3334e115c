#include "planminer/corpus.hpp"

#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "planminer/util.hpp"

namespace planminer::corpus {

using nlohmann::json;

namespace {

std::string get_string(const json& rec, const char* key, std::size_t line_no,
                       const char* fallback) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) {
    if (fallback) return fallback;
    throw InputError("corpus record at line " + std::to_string(line_no) +
                     " is missing required field \"" + key + "\"");
  }
  if (!it->is_string())
    throw InputError("corpus record at line " + std::to_string(line_no) +
                     ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace

std::vector<ClinicalNote> load_corpus(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<ClinicalNote> notes;
  std::unordered_set<std::string> seen_ids;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError("malformed corpus record at line " + std::to_string(line_no) +
                       ": " + e.what());
    }
    if (!rec.is_object())
      throw InputError("malformed corpus record at line " + std::to_string(line_no) +
                       ": expected a JSON object");
    ClinicalNote note;
    note.note_id = get_string(rec, "note_id", line_no, nullptr);
    note.text = get_string(rec, "text", line_no, nullptr);
    if (note.text.empty())
      throw InputError("corpus record at line " + std::to_string(line_no) +
                       ": \"text\" must be non-empty");
    note.patient_id = get_string(rec, "patient_id", line_no, "unknown");
    note.note_type = get_string(rec, "note_type", line_no, "unknown");
    note.note_category = get_string(rec, "note_category", line_no, "unknown");
    note.provider_type = get_string(rec, "provider_type", line_no, "unknown");
    if (!seen_ids.insert(note.note_id).second)
      throw InputError("duplicate note_id \"" + note.note_id + "\" at line " +
                       std::to_string(line_no));
    notes.push_back(std::move(note));
  }
  return notes;
}

std::string serialize_corpus(const std::vector<ClinicalNote>& notes) {
  std::string out;
  for (const ClinicalNote& n : notes) {
    json rec;
    rec["note_id"] = n.note_id;
    rec["patient_id"] = n.patient_id;
    rec["note_type"] = n.note_type;
    rec["note_category"] = n.note_category;
    rec["provider_type"] = n.provider_type;
    rec["text"] = n.text;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const std::vector<ClinicalNote>& notes, const std::string& path) {
  write_file_atomic(path, serialize_corpus(notes));
}

std::vector<GroundTruthSpan> load_ground_truth(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<GroundTruthSpan> spans;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError("malformed ground-truth record at line " +
                       std::to_string(line_no) + ": " + e.what());
    }
    GroundTruthSpan s;
    s.note_id = get_string(rec, "note_id", line_no, nullptr);
    if (!rec.contains("start") || !rec.contains("end") || !rec.contains("label"))
      throw InputError("ground-truth record at line " + std::to_string(line_no) +
                       " needs start, end and label");
    s.start = rec["start"].get<std::size_t>();
    s.end = rec["end"].get<std::size_t>();
    const std::string label = rec["label"].get<std::string>();
    if (label != "plan" && label != "nonplan")
      throw InputError("ground-truth record at line " + std::to_string(line_no) +
                       ": label must be \"plan\" or \"nonplan\"");
    s.is_plan = label == "plan";
    if (s.end <= s.start)
      throw InputError("ground-truth record at line " + std::to_string(line_no) +
                       ": empty span");
    spans.push_back(std::move(s));
  }
  return spans;
}

std::string serialize_ground_truth(const std::vector<GroundTruthSpan>& spans) {
  std::string out;
  for (const GroundTruthSpan& s : spans) {
    json rec;
    rec["note_id"] = s.note_id;
    rec["start"] = s.start;
    rec["end"] = s.end;
    rec["label"] = s.is_plan ? "plan" : "nonplan";
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void save_ground_truth(const std::vector<GroundTruthSpan>& spans, const std::string& path) {
  write_file_atomic(path, serialize_ground_truth(spans));
}

CorpusStats compute_stats(const std::vector<ClinicalNote>& notes,
                          const std::vector<SectionRef>& sections,
                          const std::vector<PlanSectionRef>& plan_sections) {
  std::unordered_set<std::string> note_ids;
  for (const ClinicalNote& n : notes) note_ids.insert(n.note_id);

  CorpusStats stats;
  stats.notes_total = notes.size();

  std::set<std::string> secap_notes;
  for (const SectionRef& s : sections) {
    if (!note_ids.count(s.note_id))
      throw InputError("section references unknown note_id \"" + s.note_id + "\"");
    if (s.is_secap) {
      ++stats.secap_sections;
      secap_notes.insert(s.note_id);
    }
  }
  stats.notes_with_secap = secap_notes.size();

  std::set<std::string> plan_notes;
  std::set<std::size_t> headed_sections;
  for (const PlanSectionRef& p : plan_sections) {
    if (!note_ids.count(p.note_id))
      throw InputError("plan section references unknown note_id \"" + p.note_id + "\"");
    if (p.section_index >= sections.size())
      throw InputError("plan section references unknown section index");
    plan_notes.insert(p.note_id);
    headed_sections.insert(p.section_index);
    stats.plan_sentences += p.sentence_count;
  }
  stats.notes_with_plan_headings = plan_notes.size();
  stats.secap_with_plan_headings = headed_sections.size();

  auto ratio = [](std::size_t child, std::size_t parent) {
    return parent == 0 ? 0.0 : static_cast<double>(child) / static_cast<double>(parent);
  };
  stats.secap_note_fraction = ratio(stats.notes_with_secap, stats.notes_total);
  stats.plan_headed_note_fraction = ratio(stats.notes_with_plan_headings, stats.notes_with_secap);
  stats.plan_headed_section_fraction = ratio(stats.secap_with_plan_headings, stats.secap_sections);
  return stats;
}

std::string stats_markdown(const CorpusStats& s) {
  std::ostringstream out;
  out << "| Description | Count |\n|---|---|\n";
  out << "| Clinical notes | " << s.notes_total << " |\n";
  out << "| Notes containing secAP sections | " << s.notes_with_secap << " |\n";
  out << "| Notes with one or more plan headings | " << s.notes_with_plan_headings
      << " (" << fmt_double(100.0 * s.plan_headed_note_fraction, 1) << "%) |\n";
  out << "| secAP sections | " << s.secap_sections << " |\n";
  out << "| secAP sections with plan headings | " << s.secap_with_plan_headings
      << " (" << fmt_double(100.0 * s.plan_headed_section_fraction, 1) << "%) |\n";
  out << "| Sentences in sections with plan headings | " << s.plan_sentences << " |\n";
  return out.str();
}

}  // namespace planminer::corpus
