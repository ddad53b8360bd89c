#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "ttf/model.hpp"

namespace ttf::cli {

/// Event-log CSV. Header: epoch_id,seq,state,duration followed by sensor
/// columns. Rows are sorted by (epoch_id, seq) with seq contiguous from 1.
/// state is RUN_OK, RUN_ALERT or FAIL; duration is empty on FAIL rows.
struct IngestOptions {
    bool allow_censored = false;    // accept a final epoch with no FAIL row
};

struct IngestResult {
    Dataset data;
    std::vector<std::int64_t> censored_epochs;
};

/// Throws Error(ParseError) or Error(DuplicateSeq) with the offending line
/// number, or ValidationError whose issue messages carry line numbers.
IngestResult ingest(std::istream& in, const IngestOptions& options = {});
IngestResult ingest(const std::filesystem::path& path, const IngestOptions& options = {});

/// Inverse of ingest; numbers use the shortest round-trip form.
void write_event_log(std::ostream& os, const Dataset& data);

} // namespace ttf::cli
