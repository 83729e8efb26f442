#pragma once

#include "carets/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace carets {

// One hourly observation. `hours_since_epoch` is the timestamp reduced to
// whole hours since 1970-01-01T00:00:00 (no time zone).
struct SeriesRecord {
    std::int64_t hours_since_epoch = 0;
    int month = 0;    // 1..12
    int weekday = 0;  // 0..6, Monday = 0
    int hour = 0;     // 0..23
    double value = 0.0;
};

// Parses "YYYY-MM-DDThh:00:00". Throws DataError on malformed or
// non-hourly timestamps. `context` is prefixed to error messages.
SeriesRecord parse_record(const std::string& timestamp, double value,
                          const std::string& context);

std::string format_timestamp(std::int64_t hours_since_epoch);

// Loads a `timestamp,value` CSV. Records must be strictly increasing with a
// constant 1-hour step; gaps, duplicates and unparseable rows raise DataError
// naming the offending row.
std::vector<SeriesRecord> load_series(const std::string& path);

}  // namespace carets
