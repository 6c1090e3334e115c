#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "planminer/corpus.hpp"

namespace planminer::synth {

// Parameters for the synthetic note generator. The defaults produce the
// 1000-note corpus used throughout the test suite.
struct SynthConfig {
  std::size_t n_patients = 250;
  std::size_t notes_per_patient_min = 4;
  std::size_t notes_per_patient_max = 4;
  // fraction of notes whose plan blocks carry a heading from the lexicon
  double plan_heading_rate = 0.13;
  std::uint64_t seed = 42;
  // weights for the office-visit, progress and discharge templates
  std::array<double, 3> template_mix = {0.5, 0.3, 0.2};

  void validate() const;  // throws InputError on bad values
};

struct SynthResult {
  std::vector<corpus::ClinicalNote> notes;
  // every sentence of every note, labeled plan or nonplan, non-overlapping
  std::vector<corpus::GroundTruthSpan> truth;
};

SynthResult generate_synthetic(const SynthConfig& cfg);

}  // namespace planminer::synth
