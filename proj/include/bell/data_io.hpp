#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bell/event_sim.hpp"
#include "bell/model.hpp"

namespace bell {

inline constexpr int kFormatVersion = 1;

// Parse/consistency failure with a pointer to the offending location
// ("rounds[2][1].sA", "totals", line numbers for CSV, ...).
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string location, const std::string& message);
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// The four polarizer angles in degrees, indexed 1/2 per party.
struct SettingAngles {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;

  double alpha(int index) const;
  double beta(int index) const;
  static SettingAngles from_config(const ExperimentConfig& cfg);

  bool operator==(const SettingAngles&) const = default;
};

// Present when a dataset was produced by the simulator; enough to regenerate
// the identical stream.
struct SimInfo {
  ExperimentConfig config;
  std::uint64_t seed = 1;
  std::string rng = kRngAlgorithm;
};

struct DatasetMetadata {
  std::string source;
  double durationSeconds = 0.0;  // per measurement block
  std::array<SettingCombo, 4> sequence = kSequence;
  SettingAngles settings;
  std::optional<SimInfo> sim;
};

struct Dataset {
  DatasetMetadata metadata;
  std::vector<RoundData> rounds;
  std::optional<RoundData> totals;

  void validate() const;         // throws ValidationError
  RoundData accumulated() const; // sum over rounds; throws when empty
};

// JSON counts format, format_version 1.
Dataset load_dataset(const std::string& path);
Dataset load_dataset(std::istream& in, const std::string& name = "<stream>");
void save_dataset(const Dataset& dataset, const std::string& path);
void save_dataset(const Dataset& dataset, std::ostream& out);

// Canonical JSON form of the model parameters.
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

// Event CSV format: header `time_ns,party,block_id`, integer nanoseconds,
// blocks contiguous and time-sorted within each block.
std::vector<EventRecord> load_events(const std::string& path);
std::vector<EventRecord> load_events(std::istream& in,
                                     const std::string& name = "<stream>");
void save_events(const std::vector<EventRecord>& events,
                 const std::string& path);
void save_events(const std::vector<EventRecord>& events, std::ostream& out);

// One block's per-party streams, extracted from a flat event list.
std::pair<EventStream, EventStream> split_block(
    const std::vector<EventRecord>& events, std::uint32_t round,
    SettingCombo combo);

}  // namespace bell
