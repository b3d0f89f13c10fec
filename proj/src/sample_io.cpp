#include "sawlab/sample_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace saw {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return {buf, static_cast<std::size_t>(len)};
}

void atomic_write_text(const fs::path& path, const std::string& text) {
    if (path.empty()) throw std::invalid_argument("write: empty output path");
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write: cannot open '" + tmp.string() + "'");
        out << text;
        if (!out) throw std::runtime_error("write: failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

fs::path sidecar_path(const fs::path& path) {
    fs::path p = path;
    p += ".meta.json";
    return p;
}

void write_text_sidecar(const fs::path& data_path, const std::string& json_text) {
    atomic_write_text(sidecar_path(data_path), json_text);
}

std::string read_text_sidecar(const fs::path& data_path) {
    std::ifstream in(sidecar_path(data_path), std::ios::binary);
    if (!in)
        throw std::runtime_error("read: missing metadata sidecar '" +
                                 sidecar_path(data_path).string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& s, const char* column) {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error(std::string("csv: bad value in column '") + column + "': " + s);
    return v;
}

std::uint64_t parse_u64(const std::string& s, const char* column) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error(std::string("csv: bad value in column '") + column + "': " + s);
    return v;
}

void expect_header(const std::string& got, const std::string& want, const fs::path& path) {
    if (got != want)
        throw std::runtime_error("csv: '" + path.string() + "': expected header '" + want +
                                 "', got '" + got + "'");
}

}  // namespace

void write_samples_csv(const fs::path& path, EnsembleKind kind,
                       const std::vector<SampleRecord>& records) {
    std::string text;
    text.reserve(64 * records.size() + 64);
    text += "ensemble,theta_deg,weight,flagged,chain_id,attempt\n";
    const char* name = ensemble_name(kind);
    for (const auto& r : records) {
        text += name;
        text += ',';
        text += format_double(r.theta_deg);
        text += ',';
        text += format_double(r.weight);
        text += ',';
        text += r.flagged ? '1' : '0';
        text += ',';
        text += std::to_string(r.chain_id);
        text += ',';
        text += std::to_string(r.attempt);
        text += '\n';
    }
    atomic_write_text(path, text);
}

std::vector<SampleRecord> read_samples_csv(const fs::path& path, EnsembleKind* kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file '" + path.string() + "'");
    expect_header(line, "ensemble,theta_deg,weight,flagged,chain_id,attempt", path);

    std::vector<SampleRecord> out;
    bool kind_set = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6)
            throw std::runtime_error("csv: '" + path.string() + "': expected 6 fields, got " +
                                     std::to_string(f.size()));
        const EnsembleKind k = ensemble_from_name(f[0]);
        if (!kind_set) {
            if (kind) *kind = k;
            kind_set = true;
        } else if (kind && *kind != k) {
            throw std::runtime_error("csv: mixed ensemble tags in '" + path.string() + "'");
        }
        SampleRecord r;
        r.theta_deg = parse_double(f[1], "theta_deg");
        r.weight = parse_double(f[2], "weight");
        r.flagged = f[3] == "1";
        r.chain_id = static_cast<std::uint32_t>(parse_u64(f[4], "chain_id"));
        r.attempt = parse_u64(f[5], "attempt");
        out.push_back(r);
    }
    if (out.empty()) throw std::runtime_error("csv: no samples in '" + path.string() + "'");
    return out;
}

void write_prediction_csv(const fs::path& path, const PredictedCdf& pred) {
    std::string text = "theta_deg,cdf\n";
    for (std::size_t k = 0; k < pred.grid_deg.size(); ++k) {
        text += format_double(pred.grid_deg[k]);
        text += ',';
        text += format_double(pred.F[k]);
        text += '\n';
    }
    atomic_write_text(path, text);
}

PredictedCdf read_prediction_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file '" + path.string() + "'");
    expect_header(line, "theta_deg,cdf", path);
    PredictedCdf out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2)
            throw std::runtime_error("csv: '" + path.string() + "': expected 2 fields");
        out.grid_deg.push_back(parse_double(f[0], "theta_deg"));
        out.F.push_back(parse_double(f[1], "cdf"));
    }
    if (out.grid_deg.empty()) throw std::runtime_error("csv: empty prediction table");
    return out;
}

void write_comparison_csv(const fs::path& path, const ComparisonReport& report) {
    std::string text = "theta_deg,cdf_pred,cdf_sim,delta,stderr\n";
    for (std::size_t k = 0; k < report.grid_deg.size(); ++k) {
        text += format_double(report.grid_deg[k]);
        text += ',';
        text += format_double(report.F_pred[k]);
        text += ',';
        text += format_double(report.F_sim[k]);
        text += ',';
        text += format_double(report.delta[k]);
        text += ',';
        text += format_double(report.stderr_F[k]);
        text += '\n';
    }
    atomic_write_text(path, text);
}

}  // namespace saw
