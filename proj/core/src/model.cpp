#include "ttf/model.hpp"

#include <cmath>
#include <sstream>

namespace ttf {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::EmptyEpoch: return "EmptyEpoch";
    case ErrorKind::NonAlternating: return "NonAlternating";
    case ErrorKind::NonPositiveDuration: return "NonPositiveDuration";
    case ErrorKind::SensorArityMismatch: return "SensorArityMismatch";
    case ErrorKind::MisplacedFail: return "MisplacedFail";
    case ErrorKind::MissingFail: return "MissingFail";
    case ErrorKind::NonFiniteSensor: return "NonFiniteSensor";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegenerateInfo: return "DegenerateInfo";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::NoSensors: return "NoSensors";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::MissingCovariate: return "MissingCovariate";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateSeq: return "DuplicateSeq";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool is_numerical(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DomainError:
    case ErrorKind::DegenerateInfo:
    case ErrorKind::RankDeficient:
    case ErrorKind::NotConverged:
        return true;
    default:
        return false;
    }
}

std::string_view to_string(EventType type)
{
    switch (type) {
    case EventType::RunOk: return "RUN_OK";
    case EventType::RunAlert: return "RUN_ALERT";
    case EventType::Fail: return "FAIL";
    }
    return "?";
}

bool Epoch::censored() const
{
    return events.empty() || events.back().kind != EventType::Fail;
}

int Epoch::running_count() const
{
    int r = 0;
    for (const auto& e : events)
        if (e.kind != EventType::Fail)
            ++r;
    return r;
}

EventType Epoch::first_kind() const
{
    return events.empty() ? EventType::Fail : events.front().kind;
}

int Epoch::count_of(EventType kind) const
{
    int c = 0;
    for (const auto& e : events)
        if (e.kind == kind)
            ++c;
    return c;
}

double Epoch::duration_of(EventType kind) const
{
    double s = 0.0;
    for (const auto& e : events)
        if (e.kind == kind)
            s += e.duration;
    return s;
}

double Epoch::total_duration() const
{
    double s = 0.0;
    for (const auto& e : events)
        if (e.kind != EventType::Fail)
            s += e.duration;
    return s;
}

std::size_t Dataset::complete_count() const
{
    std::size_t n = 0;
    for (const auto& e : epochs)
        if (!e.censored())
            ++n;
    return n;
}

int count_offset(Situation s, EventType kind)
{
    const int sign = kind == EventType::RunOk ? 1 : -1;
    switch (s) {
    case Situation::S1: return sign;
    case Situation::S3: return -sign;
    default: return 0;
    }
}

std::array<int, 2> implied_counts(Situation s, int running_count)
{
    return {(running_count + count_offset(s, EventType::RunOk)) / 2,
            (running_count + count_offset(s, EventType::RunAlert)) / 2};
}

namespace {

std::string describe(ErrorKind kind, std::int64_t epoch, int index, std::string_view detail)
{
    std::ostringstream os;
    os << to_string(kind) << ": epoch " << epoch;
    if (index >= 0)
        os << ", event " << index + 1;
    if (!detail.empty())
        os << ": " << detail;
    return os.str();
}

std::string summarize(const std::vector<ValidationIssue>& issues)
{
    std::ostringstream os;
    os << issues.size() << " validation issue(s)";
    if (!issues.empty())
        os << "; first: " << issues.front().message;
    return os.str();
}

} // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : Error(issues.empty() ? ErrorKind::InvalidArgument : issues.front().kind, summarize(issues)),
      issues_(std::move(issues))
{
}

std::vector<ValidationIssue> find_issues(const Dataset& raw)
{
    std::vector<ValidationIssue> issues;
    const auto add = [&](ErrorKind k, std::int64_t epoch, int index, std::string_view detail) {
        issues.push_back({k, epoch, index, describe(k, epoch, index, detail)});
    };

    const std::size_t arity = raw.sensor_names.size();
    for (std::size_t ei = 0; ei < raw.epochs.size(); ++ei) {
        const Epoch& epoch = raw.epochs[ei];
        const bool last_epoch = ei + 1 == raw.epochs.size();
        int running = 0;
        EventType previous = EventType::Fail;

        for (std::size_t j = 0; j < epoch.events.size(); ++j) {
            const Event& ev = epoch.events[j];
            const int idx = static_cast<int>(j);
            if (ev.sensors.size() != arity)
                add(ErrorKind::SensorArityMismatch, epoch.id, idx,
                    "expected " + std::to_string(arity) + " readings, got " +
                        std::to_string(ev.sensors.size()));
            for (double v : ev.sensors)
                if (!std::isfinite(v)) {
                    add(ErrorKind::NonFiniteSensor, epoch.id, idx, "");
                    break;
                }

            if (ev.kind == EventType::Fail) {
                if (j + 1 != epoch.events.size())
                    add(ErrorKind::MisplacedFail, epoch.id, idx, "FAIL must be the last event");
                continue;
            }
            if (!(ev.duration > 0.0) || !std::isfinite(ev.duration))
                add(ErrorKind::NonPositiveDuration, epoch.id, idx, "");
            if (ev.kind == previous)
                add(ErrorKind::NonAlternating, epoch.id, idx,
                    std::string("two consecutive ") + std::string(to_string(ev.kind)) + " events");
            previous = ev.kind;
            ++running;
        }

        if (running == 0)
            add(ErrorKind::EmptyEpoch, epoch.id, -1, "no running event before FAIL");
        if (epoch.censored() && !last_epoch)
            add(ErrorKind::MissingFail, epoch.id, -1, "only the final epoch may lack FAIL");
    }
    return issues;
}

const Dataset& validate_dataset(const Dataset& raw)
{
    auto issues = find_issues(raw);
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    return raw;
}

Situation classify_epoch(const Epoch& epoch)
{
    const bool odd = epoch.running_count() % 2 == 1;
    if (epoch.first_kind() == EventType::RunOk)
        return odd ? Situation::S1 : Situation::S2;
    return odd ? Situation::S3 : Situation::S4;
}

SituationPartition partition(const Dataset& data)
{
    SituationPartition out;
    for (const auto& epoch : data.epochs) {
        if (epoch.censored())
            continue;
        const Situation s = classify_epoch(epoch);
        out.epoch_ids.push_back(epoch.id);
        out.assignment.push_back(s);
        ++out.counts[static_cast<int>(s) - 1];
    }
    return out;
}

} // namespace ttf
