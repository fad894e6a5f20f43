#include "wpcurve/synthetic.hpp"

#include "wpcurve/csv.hpp"
#include "wpcurve/error.hpp"
#include "wpcurve/rng.hpp"
#include "wpcurve/timestamp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace wpc {

namespace {

double sine(double x) { return std::sin(2.0 * std::numbers::pi * x); }

double wrapDegrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    return w;
}

} // namespace

double sineNoiseStd(double x) { return 0.05 + 0.10 * x; }

Toy1dTask sineHeteroscedasticTask(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, 0x53494E45ULL); // "SINE"
    Toy1dTask task;
    task.x = Matrix(n, 1);
    task.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.nextOpenUnit();
        task.x.at(i, 0) = x;
        task.y[i] = sine(x) + sineNoiseStd(x) * rng.nextNormal();
    }
    return task;
}

Toy1dTask gapTrainTask(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, 0x474150ULL); // "GAP"
    Toy1dTask task;
    task.x = Matrix(n, 1);
    task.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // half the mass in each lobe; lobe widths are 0.4
        const double u = rng.nextOpenUnit();
        const double x = u < 0.5 ? u * 0.8 : 0.6 + (u - 0.5) * 0.8;
        task.x.at(i, 0) = x;
        task.y[i] = sine(x) + 0.05 * rng.nextNormal();
    }
    return task;
}

Toy1dTask gapTestMixture(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, 0x47415054ULL); // "GAPT"
    Toy1dTask task;
    task.x = Matrix(n, 1);
    task.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x;
        if (rng.nextOpenUnit() < 0.9) {
            const double u = rng.nextOpenUnit();
            x = u < 0.5 ? u * 0.8 : 0.6 + (u - 0.5) * 0.8;
        } else {
            x = rng.nextOpenUnit();
        }
        task.x.at(i, 0) = x;
        task.y[i] = sine(x) + 0.05 * rng.nextNormal();
    }
    return task;
}

double analyticNominalPower(double windSpeed) {
    constexpr double kCutIn = 3.5;
    constexpr double kCutOut = 20.0;
    constexpr double kRatedSpeed = 14.5;
    constexpr double kRatedPower = 2050.0;
    if (windSpeed < kCutIn || windSpeed > kCutOut) return 0.0;
    auto logistic = [](double v) { return 1.0 / (1.0 + std::exp(-(v - 9.0) / 1.5)); };
    const double lo = logistic(kCutIn);
    const double hi = logistic(kRatedSpeed);
    const double t = (logistic(std::min(windSpeed, kRatedSpeed)) - lo) / (hi - lo);
    return kRatedPower * std::clamp(t, 0.0, 1.0);
}

void writeNominalCurveCsv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write nominal curve: " + path);
    out << "wind_speed_ms,power_kw\n";
    for (double v = 3.5; v <= 20.0 + 1e-9; v += 0.5) {
        out << formatDouble(v) << "," << formatDouble(analyticNominalPower(v)) << "\n";
    }
}

std::vector<ScadaRecord> generateScadaRecords(const SyntheticScadaConfig& config) {
    RngStream rng(config.seed, 0x5343414441ULL); // "SCADA"
    std::vector<ScadaRecord> records;
    records.reserve(config.rows);

    for (std::size_t i = 0; i < config.rows; ++i) {
        ScadaRecord r;
        r.sourceRow = static_cast<long>(i + 1);
        r.timestamp = config.startTimestamp + static_cast<std::int64_t>(i) * config.stepSeconds;

        // Weibull(k=2) winds, mean about 6.45 m/s like the site statistics
        double v;
        do {
            v = 7.28 * std::sqrt(-std::log(1.0 - rng.nextOpenUnit()));
        } while (v < 0.3 || v > 24.0);
        r.windSpeedAvg = v;

        const double ti = std::max(0.02, 0.13 + 0.07 * rng.nextNormal());
        r.windSpeedStd = ti * v;
        r.windSpeedMax = v * (1.28 + std::abs(rng.nextNormal()) * 0.12);
        r.windSpeedAlt = v / std::max(0.9, 1.042 + 0.05 * rng.nextNormal());

        const double dayOfYear =
            static_cast<double>((r.timestamp / 86400) % 365) / 365.0;
        r.temperature = 5.0 + 8.0 * std::sin(2.0 * std::numbers::pi * (dayOfYear - 0.25)) +
                        2.5 * rng.nextNormal();

        const double lobe = rng.nextOpenUnit();
        double dir;
        if (lobe < 0.6) {
            dir = 225.0 + 25.0 * rng.nextNormal();
        } else if (lobe < 0.9) {
            dir = 45.0 + 25.0 * rng.nextNormal();
        } else {
            dir = 360.0 * rng.nextOpenUnit();
        }
        r.direction = wrapDegrees(dir);
        r.nacelle = wrapDegrees(dir + 6.0 * rng.nextNormal());

        if (v >= 12.5) {
            r.pitch = (v - 12.5) * 4.0 + rng.nextNormal();
        } else {
            r.pitch = 1.5 + 1.2 * rng.nextNormal();
        }

        // Turbulence shifts the effective wind speed: the planted TI signal.
        const double vEff = v * (1.0 - config.tiCoupling * (ti - 0.13));
        const double base = analyticNominalPower(vEff);
        if (v < 3.4) {
            r.power = -6.0 + 4.0 * rng.nextNormal(); // parasitic load at standstill
        } else {
            const double noise = (15.0 + 0.03 * base) * rng.nextNormal();
            r.power = std::max(-45.0, base + noise);
        }
        records.push_back(r);
    }
    return records;
}

void writeScadaCsv(const std::string& path, const SyntheticScadaConfig& config) {
    const auto records = generateScadaRecords(config);
    std::ofstream out(path);
    if (!out) throw DataError("cannot write synthetic SCADA file: " + path);

    out << "Wind_turbine_name,Date_time,P_avg,Ws_avg,Ws_std,Ws_max,Ws2_avg,Ot_avg,Wa_avg,Ba_avg,"
           "Ya_avg\n";

    RngStream faultRng(config.seed, 0x4641554C54ULL); // "FAULT"
    for (const ScadaRecord& r : records) {
        std::string power = formatDouble(r.power);
        std::string wsMax = formatDouble(r.windSpeedMax);
        std::string timestamp = formatIso8601(r.timestamp);
        std::string wsAvg = formatDouble(r.windSpeedAvg);

        if (config.dirtyFraction > 0.0 && faultRng.nextOpenUnit() < config.dirtyFraction) {
            switch (faultRng.nextU64() % 4) {
                case 0: power.clear(); break;
                case 1: wsMax = formatDouble(r.windSpeedAvg * 0.5); break;
                case 2: timestamp = "not-a-time"; break;
                default: wsAvg = "NaN"; break;
            }
        }

        out << config.turbineName << "," << timestamp << "," << power << "," << wsAvg << ","
            << formatDouble(r.windSpeedStd) << "," << wsMax << ","
            << formatDouble(r.windSpeedAlt) << "," << formatDouble(r.temperature) << ","
            << formatDouble(r.direction) << "," << formatDouble(r.pitch) << ","
            << formatDouble(r.nacelle) << "\n";
    }
}

} // namespace wpc
