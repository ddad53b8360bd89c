#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ttf/error.hpp"

namespace ttf {

/// The three states a machine log records. RunOk is "running without alert"
/// (rate lambda1), RunAlert is "running with alert" (rate lambda2).
enum class EventType { RunOk, RunAlert, Fail };

std::string_view to_string(EventType type);

constexpr EventType opposite(EventType running)
{
    return running == EventType::RunOk ? EventType::RunAlert : EventType::RunOk;
}

struct Event {
    EventType kind = EventType::RunOk;
    double duration = 0.0;          // ignored for Fail
    std::vector<double> sensors;    // one reading per Dataset::sensor_names entry
};

/// Interval from restart after maintenance to the next failure. A complete
/// epoch ends with exactly one Fail event; an epoch without it is censored
/// (the log ended mid-epoch) and is skipped by every estimator.
struct Epoch {
    std::int64_t id = 0;
    std::vector<Event> events;

    bool censored() const;
    /// Number of running events r (the Fail terminator is not counted).
    int running_count() const;
    EventType first_kind() const;
    int count_of(EventType kind) const;
    double duration_of(EventType kind) const;
    /// Sum of all running durations; the realized time to failure.
    double total_duration() const;
};

struct Dataset {
    std::vector<Epoch> epochs;
    std::vector<std::string> sensor_names;

    std::size_t complete_count() const;
};

/// Likelihood case of an epoch: first event kind crossed with the parity of r.
///   S1: RunOk first, r odd    S2: RunOk first, r even
///   S3: RunAlert first, r odd S4: RunAlert first, r even
enum class Situation { S1 = 1, S2 = 2, S3 = 3, S4 = 4 };

/// Offset a such that the count of `kind` events in an epoch of situation `s`
/// with r running events is (r + a) / 2.
int count_offset(Situation s, EventType kind);

/// (RunOk count, RunAlert count) implied by the situation and r.
std::array<int, 2> implied_counts(Situation s, int running_count);

struct SituationPartition {
    std::vector<std::int64_t> epoch_ids;    // complete epochs, dataset order
    std::vector<Situation> assignment;      // aligned with epoch_ids
    std::array<int, 4> counts{};            // n1..n4

    int total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
    /// n1 + n2: epochs that start with RunOk.
    int starts_ok() const { return counts[0] + counts[1]; }
    int starts_alert() const { return counts[2] + counts[3]; }
};

struct ValidationIssue {
    ErrorKind kind;
    std::int64_t epoch_id;
    int event_index;        // -1 when the issue concerns the whole epoch
    std::string message;
};

class ValidationError : public Error {
  public:
    explicit ValidationError(std::vector<ValidationIssue> issues);

    const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

  private:
    std::vector<ValidationIssue> issues_;
};

/// Collects every invariant violation in `raw`; returns it unchanged when none.
/// Only the last epoch may lack its Fail terminator.
std::vector<ValidationIssue> find_issues(const Dataset& raw);

/// Throws ValidationError listing all issues.
const Dataset& validate_dataset(const Dataset& raw);

Situation classify_epoch(const Epoch& epoch);

/// Classifies every complete epoch.
SituationPartition partition(const Dataset& data);

} // namespace ttf
