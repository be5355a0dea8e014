#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "droidmark/arff.hpp"
#include "droidmark/errors.hpp"
#include "droidmark/feature_extract.hpp"

namespace droidmark {

// Runtime monitoring simulator. Traces are CSV lines
//   timestamp_ms,process,signal[;signal...],screen_wake
// where signal names come from the monitored feature set below. Events for
// processes outside the suspect list are dropped (the monitor kills
// everything it is not watching), survivors are bucketed per
// (process, window) and OR-reduced into per-window instances.

const std::vector<std::string> &monitored_signals();    // 4 feature names
const std::vector<std::string> &canonical_processes();  // 8-value domain
const std::vector<std::string> &instance_attributes();  // 7 dataset columns

struct EventRecord {
    std::int64_t timestamp_ms = 0;
    std::string process;
    int boot_receiver = 0;
    int sms_receiver = 0;
    int alarm_receiver = 0;
    int sms_manager = 0;
    int screen_wake = 0;
};

enum class InstanceLabel { Regular, Malicious, Unknown };

struct MonitorInstance {
    std::string process;
    int boot_receiver = 0;
    int sms_receiver = 0;
    int alarm_receiver = 0;
    int sms_manager = 0;
    int screen_wake = 0;
    InstanceLabel label = InstanceLabel::Unknown;

    bool operator==(const MonitorInstance &) const = default;
};

struct MalformedTrace : Error {
    MalformedTrace(int line, const std::string &detail)
        : Error("malformed trace line " + std::to_string(line) + ": " + detail), line(line) {}
    int line;
};

struct NonMonotonicTimestamps : Error {
    explicit NonMonotonicTimestamps(int line)
        : Error("timestamps decrease at trace line " + std::to_string(line)), line(line) {}
    int line;
};

std::vector<EventRecord> parse_trace(const std::string &text);

std::vector<MonitorInstance> replay_trace(const std::string &trace_text,
                                          const SuspectList &suspects,
                                          std::int64_t window_ms);

// Ground-truth rule: an SMS send without the screen awake is malicious;
// everything else is regular.
InstanceLabel label_instance(const MonitorInstance &inst);

// Deterministic labeled mixture over the canonical processes, class balance
// floor(n/2) malicious.
Dataset generate_dataset(std::uint64_t seed, int n);

// Instances as a dataset over the 7 canonical attributes. The ProcessName
// domain is `process_domain`, or the canonical 8 names when empty and every
// observed process is canonical (otherwise the sorted observed names).
Dataset instances_to_dataset(const std::vector<MonitorInstance> &instances,
                             std::vector<std::string> process_domain = {});

std::vector<MonitorInstance> instances_from_dataset(const Dataset &ds);

} // namespace droidmark
