#include "event_log.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "ttf/format.hpp"

namespace ttf::cli {

namespace {

constexpr std::string_view kFixedColumns[] = {"epoch_id", "seq", "state", "duration"};

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos)
            return cells;
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(ErrorKind kind, std::size_t line, const std::string& message)
{
    throw Error(kind, "line " + std::to_string(line) + ": " + message);
}

std::int64_t parse_int(std::string_view cell, std::size_t line, std::string_view column)
{
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
        fail(ErrorKind::ParseError, line, std::string(column) + " is not an integer: '" + std::string(cell) + "'");
    return v;
}

double parse_real(std::string_view cell, std::size_t line, std::string_view column)
{
    if (!cell.empty() && cell.front() == '+')
        cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
        fail(ErrorKind::ParseError, line, std::string(column) + " is not a number: '" + std::string(cell) + "'");
    return v;
}

EventType parse_state(std::string_view cell, std::size_t line)
{
    if (cell == "RUN_OK")
        return EventType::RunOk;
    if (cell == "RUN_ALERT")
        return EventType::RunAlert;
    if (cell == "FAIL")
        return EventType::Fail;
    fail(ErrorKind::ParseError, line, "state must be RUN_OK, RUN_ALERT or FAIL, got '" + std::string(cell) + "'");
}

} // namespace

IngestResult ingest(std::istream& in, const IngestOptions& options)
{
    IngestResult result;
    Dataset& data = result.data;
    std::string raw;
    std::size_t line_no = 0;

    // Skip blank lines before the header.
    while (std::getline(in, raw)) {
        ++line_no;
        if (!trim(raw).empty())
            break;
    }
    if (trim(raw).empty())
        throw Error(ErrorKind::ParseError, "empty event log: missing header");
    {
        const auto header = split(trim(raw));
        if (header.size() < 4)
            fail(ErrorKind::ParseError, line_no, "header must start with epoch_id,seq,state,duration");
        for (std::size_t k = 0; k < 4; ++k)
            if (trim(header[k]) != kFixedColumns[k])
                fail(ErrorKind::ParseError, line_no,
                     "header column " + std::to_string(k + 1) + " must be '" + std::string(kFixedColumns[k]) +
                         "', got '" + std::string(trim(header[k])) + "'");
        for (std::size_t k = 4; k < header.size(); ++k) {
            const std::string name(trim(header[k]));
            if (name.empty())
                fail(ErrorKind::ParseError, line_no, "empty sensor column name");
            for (const auto& seen : data.sensor_names)
                if (seen == name)
                    fail(ErrorKind::ParseError, line_no, "duplicate sensor column '" + name + "'");
            data.sensor_names.push_back(name);
        }
    }
    const std::size_t width = 4 + data.sensor_names.size();

    // (epoch index, event index) -> source line, to locate validation issues.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> lines;
    std::int64_t last_seq = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const auto text = trim(raw);
        if (text.empty())
            continue;
        const auto cells = split(text);
        if (cells.size() != width)
            fail(ErrorKind::ParseError, line_no,
                 "expected " + std::to_string(width) + " fields, got " + std::to_string(cells.size()));

        const auto epoch_id = parse_int(trim(cells[0]), line_no, "epoch_id");
        const auto seq = parse_int(trim(cells[1]), line_no, "seq");
        Event ev;
        ev.kind = parse_state(trim(cells[2]), line_no);
        const auto duration = trim(cells[3]);
        if (ev.kind == EventType::Fail) {
            if (!duration.empty())
                fail(ErrorKind::ParseError, line_no, "FAIL rows must leave duration empty");
        } else {
            ev.duration = parse_real(duration, line_no, "duration");
        }
        ev.sensors.reserve(data.sensor_names.size());
        for (std::size_t k = 0; k < data.sensor_names.size(); ++k)
            ev.sensors.push_back(parse_real(trim(cells[4 + k]), line_no, data.sensor_names[k]));

        if (data.epochs.empty() || epoch_id != data.epochs.back().id) {
            if (!data.epochs.empty() && epoch_id < data.epochs.back().id)
                fail(ErrorKind::ParseError, line_no,
                     "epoch_id " + std::to_string(epoch_id) + " after " + std::to_string(data.epochs.back().id) +
                         ": rows must be sorted by epoch_id");
            if (!data.epochs.empty() && data.epochs.back().events.back().kind != EventType::Fail)
                fail(ErrorKind::MissingFail, line_no,
                     "epoch " + std::to_string(data.epochs.back().id) + " ends without a FAIL row");
            if (seq != 1)
                fail(ErrorKind::ParseError, line_no,
                     "epoch " + std::to_string(epoch_id) + " must start at seq 1, got " + std::to_string(seq));
            data.epochs.push_back(Epoch{epoch_id, {}});
        } else if (seq == last_seq) {
            fail(ErrorKind::DuplicateSeq, line_no,
                 "duplicate seq " + std::to_string(seq) + " in epoch " + std::to_string(epoch_id));
        } else if (seq != last_seq + 1) {
            fail(ErrorKind::ParseError, line_no,
                 "seq " + std::to_string(seq) + " follows " + std::to_string(last_seq) + " in epoch " +
                     std::to_string(epoch_id) + ": seq must be contiguous from 1");
        }
        last_seq = seq;
        auto& epoch = data.epochs.back();
        if (!epoch.events.empty() && epoch.events.back().kind == EventType::Fail)
            fail(ErrorKind::MisplacedFail, line_no, "event after FAIL in epoch " + std::to_string(epoch_id));
        lines[{data.epochs.size() - 1, epoch.events.size()}] = line_no;
        epoch.events.push_back(std::move(ev));
    }

    if (data.epochs.empty())
        throw Error(ErrorKind::ParseError, "event log has a header but no rows");
    if (data.epochs.back().censored()) {
        if (!options.allow_censored)
            fail(ErrorKind::MissingFail, line_no,
                 "epoch " + std::to_string(data.epochs.back().id) +
                     " ends without a FAIL row (use --allow-censored to accept a censored final epoch)");
        result.censored_epochs.push_back(data.epochs.back().id);
    }

    auto issues = find_issues(data);
    if (!issues.empty()) {
        std::map<std::int64_t, std::size_t> epoch_index;
        for (std::size_t i = 0; i < data.epochs.size(); ++i)
            epoch_index[data.epochs[i].id] = i;
        for (auto& issue : issues) {
            const std::size_t ei = epoch_index.at(issue.epoch_id);
            const std::size_t ev = issue.event_index >= 0 ? static_cast<std::size_t>(issue.event_index) : 0;
            if (const auto it = lines.find({ei, ev}); it != lines.end())
                issue.message = "line " + std::to_string(it->second) + ": " + issue.message;
        }
        throw ValidationError(std::move(issues));
    }
    return result;
}

IngestResult ingest(const std::filesystem::path& path, const IngestOptions& options)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::ParseError, "cannot open event log '" + path.string() + "'");
    return ingest(in, options);
}

void write_event_log(std::ostream& os, const Dataset& data)
{
    os << "epoch_id,seq,state,duration";
    for (const auto& name : data.sensor_names)
        os << ',' << name;
    os << '\n';
    for (const auto& epoch : data.epochs) {
        std::int64_t seq = 0;
        for (const auto& ev : epoch.events) {
            os << epoch.id << ',' << ++seq << ',' << to_string(ev.kind) << ',';
            if (ev.kind != EventType::Fail)
                os << format_double(ev.duration);
            for (double v : ev.sensors)
                os << ',' << format_double(v);
            os << '\n';
        }
    }
}

} // namespace ttf::cli
