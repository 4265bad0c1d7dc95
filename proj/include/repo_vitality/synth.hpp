#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "repo_vitality/dataset.hpp"
#include "repo_vitality/snapshot.hpp"

namespace rv {

/// Shape of the generated corpus. Active projects follow stationary Poisson event rates; unmaintained
/// ones keep their rates until decay onset and then fall exponentially towards a residual floor.
struct DecayParams {
  int decay_windows{6};  // 3-month windows before the last activity over which rates decay
  double decay_strength{4.0};  // rate multiplier reaches floor + (1-floor)*exp(-strength) at the end
  double floor_min{0.0};  // residual fraction of the base rate, drawn per project
  double floor_max{0.1};
  int idle_days_max{700};  // unmaintained: as_of - last activity ~ U(0, idle_days_max)
};

struct SynthParams {
  std::size_t n_projects{500};
  double prevalence{0.22};  // fraction unmaintained
  DecayParams decay;
  int history_days_min{1100};
  int history_days_max{2500};
  Timestamp as_of{std::chrono::sys_days{std::chrono::year{2018} / 11 / 30}};
};

struct SynthCorpus {
  std::vector<ProjectSnapshot> snapshots;
  std::vector<LabeledProject> labels;  // same order as snapshots
};

/// Throws Error(invalid_params) for fewer than 10 projects.
SynthCorpus synth(const SynthParams& params, std::uint64_t seed);

/// Writes one snapshot file per project plus labels.csv into `dir`.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

void write_labels_csv(const std::vector<LabeledProject>& labels, const std::filesystem::path& path);
std::vector<LabeledProject> read_labels_csv(const std::filesystem::path& path);

}  // namespace rv
