#pragma once

// CSV/JSON plumbing: price ingestion, result serialization, run manifests.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "calibration.hpp"
#include "fourier.hpp"
#include "timeseries.hpp"
#include "version.hpp"

namespace frisk {

using json = nlohmann::json;

// ------------------------------------------------------------- ingestion

// Two-column CSV date,close; optional header; '.' decimal separator.
inline PriceSeries load_prices(std::istream& in, const std::string& source_name = "<stream>") {
    PriceSeries out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(source_name + ":" + std::to_string(lineno)
                                     + ": expected 'date,close'");
        const std::string date = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        double close;
        try {
            std::size_t used = 0;
            close = std::stod(value, &used);
            while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used]))) ++used;
            if (used != value.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            if (lineno == 1) continue; // header row
            throw std::runtime_error(source_name + ":" + std::to_string(lineno)
                                     + ": malformed price '" + value + "'");
        }
        if (!(close > 0))
            throw std::runtime_error(source_name + ":" + std::to_string(lineno)
                                     + ": non-positive price");
        if (!out.dates.empty() && !(date > out.dates.back()))
            throw std::runtime_error(source_name + ":" + std::to_string(lineno)
                                     + ": dates not strictly increasing");
        out.dates.push_back(date);
        out.closes.push_back(close);
    }
    if (out.closes.empty())
        throw std::runtime_error(source_name + ": empty input");
    return out;
}

inline PriceSeries load_prices_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    return load_prices(in, path);
}

// ----------------------------------------------------------- serializers

inline json to_json(const TldParams& p) {
    return {{"sigma2_per_year", p.sigma2}, {"gamma", p.gamma},
            {"lambda", p.lambda}, {"beta", p.beta}};
}
inline json to_json(const HestonParams& p) {
    return {{"sigma2_per_year", p.sigma2}, {"alpha_per_year", p.alpha},
            {"k", p.k}, {"rho", p.rho}, {"mu_per_year", p.mu}};
}
inline TldParams tld_from_json(const json& j) {
    return {j.at("sigma2_per_year").get<double>(), j.at("gamma").get<double>(),
            j.at("lambda").get<double>(), j.at("beta").get<double>()};
}
inline HestonParams heston_from_json(const json& j) {
    return {j.at("sigma2_per_year").get<double>(), j.at("alpha_per_year").get<double>(),
            j.at("k").get<double>(), j.at("rho").get<double>(),
            j.value("mu_per_year", 0.0)};
}

inline json to_json(const ScalingSeries& s) {
    return {{"label", s.label}, {"transform", s.transform},
            {"t", s.t}, {"y", s.y}, {"e", s.e}};
}

inline json to_json(const CumulantEstimates& c) {
    return {{"j", c.j},
            {"k", {c.k[0], c.k[1], c.k[2], c.k[3]}},
            {"eps", {c.eps[0], c.eps[1], c.eps[2], c.eps[3]}},
            {"zeta", c.zeta}, {"kappa", c.kappa}};
}

inline json to_json(const RiskPoint& p) {
    return {{"pstar", p.pstar}, {"lstar", p.lstar},
            {"lambda_star", p.lambda_star}, {"estar", p.estar},
            {"method", p.method == RiskMode::fft ? "fft" : "quadrature"}};
}

// ----------------------------------------------------------- manifests

// FNV-1a over the canonical config dump; enough to detect config drift
inline std::uint64_t config_hash(const json& config) {
    const std::string s = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline json run_manifest(const json& config, std::uint64_t seed) {
    std::ostringstream hex;
    hex << std::hex << config_hash(config);
    return {{"version", version}, {"config_hash", hex.str()}, {"seed", seed}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline std::string curve_csv(const RiskCurve& curve,
                             const std::vector<double>& pstars) {
    // resample the curve at the requested significance levels
    std::ostringstream os;
    os.precision(12);
    os << "pstar,lstar,lambda_star,estar\n";
    for (double p : pstars) {
        const RiskPoint pt = risk_from_curve(curve, p);
        os << pt.pstar << ',' << pt.lstar << ',' << pt.lambda_star << ','
           << pt.estar << '\n';
    }
    return os.str();
}

} // namespace frisk
