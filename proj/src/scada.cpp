#include "wpcurve/scada.hpp"

#include "wpcurve/csv.hpp"
#include "wpcurve/error.hpp"
#include "wpcurve/timestamp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace wpc {

const char* channelName(Channel c) {
    switch (c) {
        case Channel::Timestamp: return "timestamp";
        case Channel::WindSpeedAvg: return "wind_speed_avg";
        case Channel::WindSpeedStd: return "wind_speed_std";
        case Channel::WindSpeedMax: return "wind_speed_max";
        case Channel::WindSpeedAltAvg: return "wind_speed_alt_avg";
        case Channel::TemperatureAvg: return "temperature_avg";
        case Channel::DirectionAvg: return "direction_avg";
        case Channel::PitchAvg: return "pitch_avg";
        case Channel::NacelleAvg: return "nacelle_avg";
        case Channel::PowerAvg: return "power_avg";
        case Channel::TurbineName: return "turbine_name";
    }
    return "?";
}

void ColumnMapping::bind(Channel channel, std::string header) {
    bindings_[channel] = std::move(header);
}

const std::string& ColumnMapping::header(Channel channel) const {
    auto it = bindings_.find(channel);
    if (it == bindings_.end()) {
        throw ConfigError(std::string("column mapping has no binding for channel '") +
                          channelName(channel) + "'");
    }
    return it->second;
}

bool ColumnMapping::has(Channel channel) const { return bindings_.contains(channel); }

void ColumnMapping::validate(bool requirePower) const {
    static constexpr Channel kRequired[] = {
        Channel::Timestamp,      Channel::WindSpeedAvg, Channel::WindSpeedStd,
        Channel::WindSpeedMax,   Channel::WindSpeedAltAvg, Channel::TemperatureAvg,
        Channel::DirectionAvg,   Channel::PitchAvg,     Channel::NacelleAvg,
    };
    for (Channel c : kRequired) {
        if (!has(c)) {
            throw ConfigError(std::string("column mapping is missing channel '") +
                              channelName(c) + "'");
        }
    }
    if (requirePower && !has(Channel::PowerAvg)) {
        throw ConfigError("column mapping is missing channel 'power_avg'");
    }
    for (auto it = bindings_.begin(); it != bindings_.end(); ++it) {
        for (auto jt = std::next(it); jt != bindings_.end(); ++jt) {
            if (it->second == jt->second) {
                throw ConfigError("column mapping binds header '" + it->second +
                                  "' to both '" + channelName(it->first) + "' and '" +
                                  channelName(jt->first) + "'");
            }
        }
    }
}

ColumnMapping ColumnMapping::defaultLaHauteBorne() {
    ColumnMapping m;
    m.bind(Channel::Timestamp, "Date_time");
    m.bind(Channel::WindSpeedAvg, "Ws_avg");
    m.bind(Channel::WindSpeedStd, "Ws_std");
    m.bind(Channel::WindSpeedMax, "Ws_max");
    m.bind(Channel::WindSpeedAltAvg, "Ws2_avg");
    m.bind(Channel::TemperatureAvg, "Ot_avg");
    m.bind(Channel::DirectionAvg, "Wa_avg");
    m.bind(Channel::PitchAvg, "Ba_avg");
    m.bind(Channel::NacelleAvg, "Ya_avg");
    m.bind(Channel::PowerAvg, "P_avg");
    m.bind(Channel::TurbineName, "Wind_turbine_name");
    return m;
}

namespace {

constexpr Channel kDataChannels[] = {
    Channel::WindSpeedAvg, Channel::WindSpeedStd,  Channel::WindSpeedMax,
    Channel::WindSpeedAltAvg, Channel::TemperatureAvg, Channel::DirectionAvg,
    Channel::PitchAvg,     Channel::NacelleAvg,
};

double* fieldOf(ScadaRecord& rec, Channel c) {
    switch (c) {
        case Channel::WindSpeedAvg: return &rec.windSpeedAvg;
        case Channel::WindSpeedStd: return &rec.windSpeedStd;
        case Channel::WindSpeedMax: return &rec.windSpeedMax;
        case Channel::WindSpeedAltAvg: return &rec.windSpeedAlt;
        case Channel::TemperatureAvg: return &rec.temperature;
        case Channel::DirectionAvg: return &rec.direction;
        case Channel::PitchAvg: return &rec.pitch;
        case Channel::NacelleAvg: return &rec.nacelle;
        default: return nullptr;
    }
}

double fieldValue(const ScadaRecord& rec, Channel c) {
    ScadaRecord& mutableRec = const_cast<ScadaRecord&>(rec);
    const double* field = fieldOf(mutableRec, c);
    return field ? *field : rec.power;
}

std::optional<std::size_t> findHeader(const std::vector<std::string>& headers,
                                      const std::string& name) {
    auto it = std::find(headers.begin(), headers.end(), name);
    if (it == headers.end()) return std::nullopt;
    return static_cast<std::size_t>(it - headers.begin());
}

} // namespace

LoadResult loadScada(const std::string& path, const ColumnMapping& mapping,
                     const LoadOptions& options) {
    const bool partial = options.requiredData.has_value();
    if (!partial) mapping.validate(options.requirePower);

    std::ifstream in(path);
    if (!in) throw DataError("cannot open SCADA file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("SCADA file is empty: " + path);
    const auto headers = splitCsvLine(line, options.delimiter);

    auto isRequired = [&](Channel c) {
        if (!partial) return true;
        return std::find(options.requiredData->begin(), options.requiredData->end(), c) !=
               options.requiredData->end();
    };

    // Resolve column indices; collect every missing required channel so the
    // error names all of them at once.
    std::map<Channel, std::optional<std::size_t>> col;
    std::string missing;
    for (Channel c : kDataChannels) {
        if (mapping.has(c)) col[c] = findHeader(headers, mapping.header(c));
        if (isRequired(c) && (!mapping.has(c) || !col[c])) {
            if (!missing.empty()) missing += ", ";
            missing += channelName(c);
        }
    }
    const auto tsCol =
        mapping.has(Channel::Timestamp) ? findHeader(headers, mapping.header(Channel::Timestamp))
                                        : std::nullopt;
    if (!tsCol) {
        if (!missing.empty()) missing += ", ";
        missing += channelName(Channel::Timestamp);
    }
    std::optional<std::size_t> powerCol;
    if (mapping.has(Channel::PowerAvg)) {
        powerCol = findHeader(headers, mapping.header(Channel::PowerAvg));
    }
    if (options.requirePower && !powerCol) {
        if (!missing.empty()) missing += ", ";
        missing += channelName(Channel::PowerAvg);
    }
    if (!missing.empty()) {
        throw DataError("CSV file '" + path + "' is missing mapped columns for: " + missing);
    }

    std::optional<std::size_t> turbineCol;
    if (options.turbineFilter) {
        if (!mapping.has(Channel::TurbineName)) {
            throw ConfigError("turbine filter set but no turbine_name column is mapped");
        }
        turbineCol = findHeader(headers, mapping.header(Channel::TurbineName));
        if (!turbineCol) {
            throw DataError("CSV file '" + path + "' has no column '" +
                            mapping.header(Channel::TurbineName) + "'");
        }
    }

    LoadResult result;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = splitCsvLine(line, options.delimiter);

        if (turbineCol && (*turbineCol >= fields.size() ||
                           fields[*turbineCol] != *options.turbineFilter)) {
            continue;
        }

        ScadaRecord rec;
        rec.sourceRow = row;
        rec.power = std::numeric_limits<double>::quiet_NaN();

        if (*tsCol >= fields.size()) {
            result.rejects.push_back({row, "missing timestamp cell"});
            continue;
        }
        const auto ts = parseIso8601(fields[*tsCol]);
        if (!ts) {
            result.rejects.push_back(
                {row, "timestamp '" + fields[*tsCol] + "' is not ISO-8601"});
            continue;
        }
        rec.timestamp = *ts;

        if (options.fromTimestamp && rec.timestamp < *options.fromTimestamp) continue;
        if (options.toTimestamp && rec.timestamp >= *options.toTimestamp) continue;

        std::string reason;
        for (Channel c : kDataChannels) {
            double* field = fieldOf(rec, c);
            *field = std::numeric_limits<double>::quiet_NaN();
            const auto& idx = col[c];
            if (!idx) continue; // unmapped or absent optional channel
            const bool required = isRequired(c);
            if (*idx >= fields.size()) {
                if (required) reason = std::string("missing cell for ") + channelName(c);
            } else {
                const auto value = parseDouble(fields[*idx]);
                if (value) {
                    *field = *value;
                } else if (required) {
                    reason = std::string(channelName(c)) + " cell '" + fields[*idx] +
                             "' is not a number";
                }
            }
            if (!reason.empty()) break;
        }
        if (reason.empty() && powerCol) {
            if (*powerCol >= fields.size()) {
                if (options.requirePower) reason = "missing cell for power_avg";
            } else {
                const auto value = parseDouble(fields[*powerCol]);
                if (value) {
                    rec.power = *value;
                } else if (options.requirePower) {
                    reason = "power_avg cell '" + fields[*powerCol] + "' is not a number";
                }
            }
        }
        if (!reason.empty()) {
            result.rejects.push_back({row, reason});
            continue;
        }
        result.records.push_back(rec);
    }
    return result;
}

std::vector<ScadaRecord> cleanRecords(const std::vector<ScadaRecord>& records,
                                      CleanStats* stats, const CleanOptions& options) {
    std::vector<Channel> channels;
    if (options.channels) {
        channels = *options.channels;
    } else {
        channels.assign(std::begin(kDataChannels), std::end(kDataChannels));
    }
    auto uses = [&](Channel c) {
        return std::find(channels.begin(), channels.end(), c) != channels.end();
    };

    std::vector<ScadaRecord> kept;
    kept.reserve(records.size());
    auto drop = [&](const ScadaRecord& r, const std::string& reason) {
        if (stats) stats->dropped.push_back({r.sourceRow, reason});
    };
    for (const ScadaRecord& r : records) {
        bool finite = !options.requirePower || std::isfinite(r.power);
        for (Channel c : channels) {
            finite = finite && std::isfinite(fieldValue(r, c));
        }
        if (!finite) {
            drop(r, "non-finite field");
        } else if (r.windSpeedAvg < 0.1) {
            drop(r, "wind speed below 0.1 m/s");
        } else if (r.windSpeedAvg > 30.0) {
            drop(r, "wind speed above 30 m/s");
        } else if (uses(Channel::WindSpeedStd) && r.windSpeedStd < 0.0) {
            drop(r, "negative wind speed std");
        } else if (uses(Channel::WindSpeedMax) && r.windSpeedMax < r.windSpeedAvg) {
            drop(r, "max wind speed below mean");
        } else if (uses(Channel::WindSpeedAltAvg) && r.windSpeedAlt < 0.1) {
            drop(r, "second anemometer below 0.1 m/s");
        } else if (options.requirePower && r.power < -50.0) {
            drop(r, "power below -50 kW");
        } else {
            kept.push_back(r);
        }
    }
    if (stats) stats->kept = kept.size();
    return kept;
}

void sortByTimestamp(std::vector<ScadaRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const ScadaRecord& a, const ScadaRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
}

void writeRejectsCsv(const std::string& path, const std::vector<RejectedRow>& rejects) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write rejects report: " + path);
    out << "row_number,reason\n";
    for (const auto& r : rejects) {
        std::string reason = r.reason;
        for (char& c : reason) {
            if (c == ',') c = ';';
        }
        out << r.row << "," << reason << "\n";
    }
}

} // namespace wpc
