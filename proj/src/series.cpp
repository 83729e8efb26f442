#include "carets/series.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace carets {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

SeriesRecord parse_record(const std::string& timestamp, double value,
                          const std::string& context) {
    // YYYY-MM-DDThh:00:00
    if (timestamp.size() != 19 || timestamp[4] != '-' || timestamp[7] != '-' ||
        timestamp[10] != 'T' || timestamp[13] != ':' || timestamp[16] != ':')
        throw DataError(context + ": malformed timestamp '" + timestamp + "'");

    const std::string ys = timestamp.substr(0, 4), mos = timestamp.substr(5, 2),
                      ds = timestamp.substr(8, 2), hs = timestamp.substr(11, 2),
                      mins = timestamp.substr(14, 2), secs = timestamp.substr(17, 2);
    for (const auto* part : {&ys, &mos, &ds, &hs, &mins, &secs})
        if (!all_digits(*part))
            throw DataError(context + ": malformed timestamp '" + timestamp + "'");
    if (mins != "00" || secs != "00")
        throw DataError(context + ": timestamp '" + timestamp +
                        "' is not at hourly resolution");

    const int y = std::stoi(ys), mo = std::stoi(mos), d = std::stoi(ds),
              h = std::stoi(hs);

    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23)
        throw DataError(context + ": invalid calendar date '" + timestamp + "'");

    const sys_days days{ymd};
    SeriesRecord rec;
    rec.hours_since_epoch =
        static_cast<std::int64_t>(days.time_since_epoch().count()) * 24 + h;
    rec.month = mo;
    rec.weekday = static_cast<int>(weekday{days}.iso_encoding()) - 1;  // Mon = 0
    rec.hour = h;
    rec.value = value;
    if (!std::isfinite(value))
        throw DataError(context + ": non-finite value");
    return rec;
}

std::string format_timestamp(std::int64_t hours_since_epoch) {
    using namespace std::chrono;
    const auto days_count = hours_since_epoch / 24;
    const auto hour = hours_since_epoch - days_count * 24;
    const year_month_day ymd{sys_days{days{days_count}}};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:00:00",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(hour));
    return buf;
}

std::vector<SeriesRecord> load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open series file '" + path + "'");

    std::string line;
    long row = 0;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    row++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,value")
        throw DataError(path + ": row 1: expected header 'timestamp,value', got '" +
                        line + "'");

    std::vector<SeriesRecord> records;
    while (std::getline(in, line)) {
        row++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const std::string context = path + ": row " + std::to_string(row);
        if (comma == std::string::npos)
            throw DataError(context + ": expected 'timestamp,value'");
        const std::string ts = line.substr(0, comma);
        const double value = parse_double(line.substr(comma + 1), context);
        records.push_back(parse_record(ts, value, context));

        if (records.size() >= 2) {
            const auto& prev = records[records.size() - 2];
            const auto& cur = records.back();
            const auto step = cur.hours_since_epoch - prev.hours_since_epoch;
            if (step == 0)
                throw DataError(context + ": duplicate timestamp '" + ts + "'");
            if (step < 0)
                throw DataError(context + ": timestamps not increasing at '" + ts +
                                "'");
            if (step != 1)
                throw DataError(context + ": " + std::to_string(step - 1) +
                                "-hour gap before '" + ts + "'");
        }
    }
    if (records.empty()) throw DataError(path + ": no data rows");
    return records;
}

}  // namespace carets
