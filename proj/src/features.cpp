#include "wpcurve/features.hpp"

#include "wpcurve/error.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace wpc {

const char* featureName(Feature f) {
    switch (f) {
        case Feature::WS: return "WS";
        case Feature::T: return "T";
        case Feature::DirSin: return "DIR_SIN";
        case Feature::DirCos: return "DIR_COS";
        case Feature::TI: return "TI";
        case Feature::G: return "G";
        case Feature::Shear: return "SHEAR";
        case Feature::Pitch: return "PITCH";
        case Feature::NacSin: return "NAC_SIN";
        case Feature::NacCos: return "NAC_COS";
    }
    return "?";
}

Feature featureFromName(const std::string& name) {
    static const std::vector<Feature> all = {
        Feature::WS,  Feature::T,     Feature::DirSin, Feature::DirCos, Feature::TI,
        Feature::G,   Feature::Shear, Feature::Pitch,  Feature::NacSin, Feature::NacCos,
    };
    for (Feature f : all) {
        if (name == featureName(f)) return f;
    }
    throw ConfigError("unknown feature '" + name + "'");
}

FeatureSpec::FeatureSpec(std::vector<Feature> features) : features_(std::move(features)) {
    if (features_.empty()) throw ConfigError("feature spec must not be empty");
    std::set<Feature> seen;
    bool hasWs = false;
    for (Feature f : features_) {
        if (!seen.insert(f).second) {
            throw ConfigError(std::string("duplicate feature '") + featureName(f) + "' in spec");
        }
        hasWs = hasWs || f == Feature::WS;
    }
    if (!hasWs) throw ConfigError("feature spec must include WS");
}

FeatureSpec FeatureSpec::fromNames(const std::vector<std::string>& names) {
    std::vector<Feature> fs;
    fs.reserve(names.size());
    for (const auto& n : names) fs.push_back(featureFromName(n));
    return FeatureSpec(std::move(fs));
}

FeatureSpec FeatureSpec::full() {
    return FeatureSpec({Feature::WS, Feature::T, Feature::DirSin, Feature::DirCos, Feature::TI,
                        Feature::G, Feature::Shear, Feature::Pitch, Feature::NacSin,
                        Feature::NacCos});
}

std::vector<std::string> FeatureSpec::names() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (Feature f : features_) out.emplace_back(featureName(f));
    return out;
}

std::string FeatureSpec::label() const {
    std::string out;
    for (Feature f : features_) {
        if (!out.empty()) out.push_back('+');
        out += featureName(f);
    }
    return out;
}

double turbulenceIntensity(double sigmaV, double vBar) {
    if (vBar < 0.1) {
        throw DataError("turbulence intensity needs mean wind speed >= 0.1 m/s, got " +
                        std::to_string(vBar));
    }
    return sigmaV / vBar;
}

double windShearIndicator(double v, double v0) {
    if (v0 < 0.1) {
        throw DataError("wind shear ratio needs reference speed >= 0.1 m/s, got " +
                        std::to_string(v0));
    }
    return v / v0;
}

double gustFactor(double vMax, double vBar) {
    if (vBar < 0.1) {
        throw DataError("gust factor needs mean wind speed >= 0.1 m/s, got " +
                        std::to_string(vBar));
    }
    if (vMax < vBar) {
        throw DataError("gust factor: max speed " + std::to_string(vMax) +
                        " below mean speed " + std::to_string(vBar));
    }
    return vMax / vBar;
}

std::pair<double, double> encodeAngle(double degrees) {
    const double rad = degrees * std::numbers::pi / 180.0;
    return {std::sin(rad), std::cos(rad)};
}

FeatureSet buildFeatures(const std::vector<ScadaRecord>& records, const FeatureSpec& spec) {
    FeatureSet set;
    set.spec = spec;
    set.x = Matrix(records.size(), spec.size());
    set.powerKw.reserve(records.size());
    set.windSpeed.reserve(records.size());
    set.timestamps.reserve(records.size());
    set.sourceRows.reserve(records.size());

    for (std::size_t r = 0; r < records.size(); ++r) {
        const ScadaRecord& rec = records[r];
        double* row = set.x.rowPtr(r);
        for (std::size_t c = 0; c < spec.size(); ++c) {
            switch (spec.features()[c]) {
                case Feature::WS: row[c] = rec.windSpeedAvg; break;
                case Feature::T: row[c] = rec.temperature; break;
                case Feature::DirSin: row[c] = encodeAngle(rec.direction).first; break;
                case Feature::DirCos: row[c] = encodeAngle(rec.direction).second; break;
                case Feature::TI:
                    row[c] = turbulenceIntensity(rec.windSpeedStd, rec.windSpeedAvg);
                    break;
                case Feature::G:
                    row[c] = gustFactor(rec.windSpeedMax, rec.windSpeedAvg);
                    break;
                case Feature::Shear:
                    row[c] = windShearIndicator(rec.windSpeedAvg, rec.windSpeedAlt);
                    break;
                case Feature::Pitch: row[c] = rec.pitch; break;
                case Feature::NacSin: row[c] = encodeAngle(rec.nacelle).first; break;
                case Feature::NacCos: row[c] = encodeAngle(rec.nacelle).second; break;
            }
        }
        set.powerKw.push_back(rec.power);
        set.windSpeed.push_back(rec.windSpeedAvg);
        set.timestamps.push_back(rec.timestamp);
        set.sourceRows.push_back(rec.sourceRow);
        if (!std::isfinite(rec.power)) set.hasPower = false;
    }
    return set;
}

std::vector<Channel> channelsForSpec(const FeatureSpec& spec) {
    std::set<Channel> channels;
    for (Feature f : spec.features()) {
        switch (f) {
            case Feature::WS: channels.insert(Channel::WindSpeedAvg); break;
            case Feature::T: channels.insert(Channel::TemperatureAvg); break;
            case Feature::DirSin:
            case Feature::DirCos: channels.insert(Channel::DirectionAvg); break;
            case Feature::TI:
                channels.insert(Channel::WindSpeedAvg);
                channels.insert(Channel::WindSpeedStd);
                break;
            case Feature::G:
                channels.insert(Channel::WindSpeedAvg);
                channels.insert(Channel::WindSpeedMax);
                break;
            case Feature::Shear:
                channels.insert(Channel::WindSpeedAvg);
                channels.insert(Channel::WindSpeedAltAvg);
                break;
            case Feature::Pitch: channels.insert(Channel::PitchAvg); break;
            case Feature::NacSin:
            case Feature::NacCos: channels.insert(Channel::NacelleAvg); break;
        }
    }
    channels.insert(Channel::WindSpeedAvg); // always carried for binning
    return {channels.begin(), channels.end()};
}

} // namespace wpc
