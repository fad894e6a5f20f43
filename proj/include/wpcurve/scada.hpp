#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wpc {

/// Semantic sensor channels of one 10-minute SCADA aggregation row.
enum class Channel {
    Timestamp,
    WindSpeedAvg,
    WindSpeedStd,
    WindSpeedMax,
    WindSpeedAltAvg, // second anemometer
    TemperatureAvg,
    DirectionAvg,
    PitchAvg,
    NacelleAvg,
    PowerAvg,
    TurbineName, // optional row filter, public mirrors ship several turbines per file
};

const char* channelName(Channel c);

/// Binds semantic channels to the CSV header names of a particular export.
/// Public mirrors of the dataset use varying headers, so this lives in the
/// run config rather than in code.
class ColumnMapping {
public:
    void bind(Channel channel, std::string header);
    const std::string& header(Channel channel) const;
    bool has(Channel channel) const;

    /// Throws ConfigError when two channels bind the same header or a
    /// required channel is missing.
    void validate(bool requirePower) const;

    static ColumnMapping defaultLaHauteBorne();

private:
    std::map<Channel, std::string> bindings_;
};

struct ScadaRecord {
    std::int64_t timestamp = 0; // epoch seconds UTC
    long sourceRow = 0;         // 1-based data row in the file
    double windSpeedAvg = 0.0;  // m/s
    double windSpeedStd = 0.0;  // m/s
    double windSpeedMax = 0.0;  // m/s
    double windSpeedAlt = 0.0;  // m/s, second anemometer
    double temperature = 0.0;   // deg C
    double direction = 0.0;     // deg [0,360)
    double pitch = 0.0;         // deg
    double nacelle = 0.0;       // deg [0,360)
    double power = 0.0;         // kW, NaN when the file has no power column
};

struct RejectedRow {
    long row = 0;
    std::string reason;
};

struct LoadResult {
    std::vector<ScadaRecord> records;
    std::vector<RejectedRow> rejects;
};

struct LoadOptions {
    char delimiter = ',';
    /// Power may be absent for prediction-only inputs.
    bool requirePower = true;
    /// When set, only these sensor channels (plus the timestamp) must be
    /// present and parseable; others fall back to NaN without a reject.
    /// Prediction inputs only need the channels of the trained feature set.
    std::optional<std::vector<Channel>> requiredData;
    /// Keep only rows whose turbine-name cell equals this value.
    std::optional<std::string> turbineFilter;
    /// Keep only rows with fromTimestamp <= t < toTimestamp.
    std::optional<std::int64_t> fromTimestamp;
    std::optional<std::int64_t> toTimestamp;
};

/// Streams the CSV, parsing only mapped columns. Rows with unparseable mapped
/// cells land in the rejects list with their row number and a reason.
/// Missing headers or an empty file raise DataError.
LoadResult loadScada(const std::string& path, const ColumnMapping& mapping,
                     const LoadOptions& options = {});

struct CleanStats {
    std::size_t kept = 0;
    std::vector<RejectedRow> dropped;
};

struct CleanOptions {
    bool requirePower = true;
    /// Channels whose values must be present and consistent; defaults to all.
    std::optional<std::vector<Channel>> channels;
};

/// Drops records violating the cleaned-record invariants:
/// wind speed outside [0.1, 30] m/s, negative sigma, v_max < v_bar,
/// power below -50 kW, or any non-finite required field. Order preserved.
std::vector<ScadaRecord> cleanRecords(const std::vector<ScadaRecord>& records,
                                      CleanStats* stats = nullptr,
                                      const CleanOptions& options = {});

/// Sorts by timestamp (stable) — chronological splits assume time order.
void sortByTimestamp(std::vector<ScadaRecord>& records);

void writeRejectsCsv(const std::string& path, const std::vector<RejectedRow>& rejects);

} // namespace wpc
