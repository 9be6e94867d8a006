#include "phaseless1d/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "phaseless1d/errors.hpp"
#include "phaseless1d/rng.hpp"

namespace ph1d {

namespace {

std::string status_name(RecoveryStatus s) {
    switch (s) {
        case RecoveryStatus::ok: return "ok";
        case RecoveryStatus::degenerate: return "degenerate";
        case RecoveryStatus::nonphysical: return "nonphysical";
    }
    return "?";
}

RecoveryStatus status_from_name(const std::string& s) {
    if (s == "ok") return RecoveryStatus::ok;
    if (s == "degenerate") return RecoveryStatus::degenerate;
    if (s == "nonphysical") return RecoveryStatus::nonphysical;
    throw ConfigError("recovery csv: unknown status \"" + s + "\"");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
    return out;
}

void write_header(std::ofstream& out, const FileStamp& stamp, const std::string& columns) {
    out << "# phaseless1d " << (stamp.tool_version.empty() ? "dev" : stamp.tool_version)
        << " config=" << (stamp.config_hash.empty() ? "none" : stamp.config_hash) << "\n"
        << columns << "\n";
}

struct CsvFile {
    std::string header;
    std::vector<std::vector<double>> rows;        // numeric columns
    std::vector<std::string> trailing;            // last column when non-numeric
    bool has_trailing = false;
};

CsvFile read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open \"" + path + "\"");
    CsvFile f;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (f.header.empty() && line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos) {
            f.header = line;
            continue;
        }
        std::vector<double> row;
        std::string cell;
        std::istringstream ss(line);
        std::string last;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                row.push_back(v);
                last.clear();
            } catch (...) {
                last = cell;
            }
        }
        if (!last.empty()) {
            // strip whitespace
            const auto b = last.find_first_not_of(" \t\r");
            const auto e = last.find_last_not_of(" \t\r");
            f.trailing.push_back(b == std::string::npos ? "" : last.substr(b, e - b + 1));
            f.has_trailing = true;
        } else if (f.has_trailing) {
            f.trailing.push_back("");
        }
        f.rows.push_back(std::move(row));
    }
    return f;
}

void require_columns(const CsvFile& f, std::size_t n, const std::string& what) {
    for (const auto& r : f.rows)
        if (r.size() != n)
            throw ConfigError(what + ": expected " + std::to_string(n) + " numeric columns, got " +
                              std::to_string(r.size()));
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string config_hash(const nlohmann::json& config) {
    const std::string dump = config.dump();  // nlohmann keeps object keys sorted
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (unsigned char c : dump) h = hash_combine(h, c);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_sweep_csv(const std::string& path, const std::vector<ScatteringCoefficients>& sweep,
                     const FileStamp& stamp) {
    auto out = open_out(path);
    write_header(out, stamp, "k,re_s21,im_s21,re_s22,im_s22,unitarity_defect");
    for (const auto& c : sweep)
        out << format_double(c.k) << ',' << format_double(c.s21.real()) << ','
            << format_double(c.s21.imag()) << ',' << format_double(c.s22.real()) << ','
            << format_double(c.s22.imag()) << ',' << format_double(c.unitarity_defect) << "\n";
}

ReflectionTable read_sweep_csv(const std::string& path) {
    const CsvFile f = read_csv(path);
    require_columns(f, 6, "sweep csv");
    ReflectionTable t;
    for (const auto& r : f.rows) {
        t.k.push_back(r[0]);
        t.s21.emplace_back(r[1], r[2]);
    }
    t.validate();
    return t;
}

void write_dataset_csv(const std::string& path, const Dataset& data, const FileStamp& stamp) {
    auto out = open_out(path);
    switch (data.method) {
        case Method::s1:
            write_header(out, stamp, "k,x1,x2,r2,i1,i2");
            for (const auto& r : data.s1)
                out << format_double(r.k) << ',' << format_double(r.x1) << ',' << format_double(r.x2)
                    << ',' << format_double(r.r2) << ',' << format_double(r.i1) << ','
                    << format_double(r.i2) << "\n";
            break;
        case Method::s2:
            write_header(out, stamp, "k,x1,x2,x3,i1,i2,i3");
            for (const auto& r : data.s2)
                out << format_double(r.k) << ',' << format_double(r.x1) << ',' << format_double(r.x2)
                    << ',' << format_double(r.x3) << ',' << format_double(r.i1) << ','
                    << format_double(r.i2) << ',' << format_double(r.i3) << "\n";
            break;
        case Method::s3:
            write_header(out, stamp, "k,x,i,di");
            for (const auto& r : data.s3)
                out << format_double(r.k) << ',' << format_double(r.x) << ',' << format_double(r.i)
                    << ',' << format_double(r.di) << "\n";
            break;
    }
}

void write_dataset_sidecar(const std::string& csv_path, const nlohmann::json& meta) {
    auto out = open_out(csv_path + ".json");
    out << meta.dump(2) << "\n";
}

Dataset read_dataset_csv(const std::string& path) {
    const CsvFile f = read_csv(path);
    Dataset d;
    if (f.header.find("r2") != std::string::npos) {
        d.method = Method::s1;
        require_columns(f, 6, "s1 dataset");
        for (const auto& r : f.rows) d.s1.push_back({r[0], r[1], r[2], r[3], r[4], r[5]});
    } else if (f.header.find("x3") != std::string::npos) {
        d.method = Method::s2;
        require_columns(f, 7, "s2 dataset");
        for (const auto& r : f.rows) d.s2.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6]});
    } else if (f.header.find("di") != std::string::npos) {
        d.method = Method::s3;
        require_columns(f, 4, "s3 dataset");
        for (const auto& r : f.rows) d.s3.push_back({r[0], r[1], r[2], r[3]});
    } else {
        throw ConfigError("dataset csv: cannot infer variant from header \"" + f.header + "\"");
    }
    return d;
}

void write_recovery_csv(const std::string& path, const std::vector<RecoveryResult>& results,
                        const FileStamp& stamp) {
    auto out = open_out(path);
    write_header(out, stamp, "k,re_s21,im_s21,conditioning,residual,status");
    for (const auto& r : results)
        out << format_double(r.k) << ',' << format_double(r.s21_est.real()) << ','
            << format_double(r.s21_est.imag()) << ',' << format_double(r.conditioning) << ','
            << format_double(r.residual) << ',' << status_name(r.status) << "\n";
}

ReflectionTable read_recovery_csv(const std::string& path) {
    const CsvFile f = read_csv(path);
    require_columns(f, 5, "recovery csv");
    if (f.trailing.size() != f.rows.size())
        throw ConfigError("recovery csv: missing status column");
    ReflectionTable t;
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
        if (status_from_name(f.trailing[i]) != RecoveryStatus::ok) continue;
        t.k.push_back(f.rows[i][0]);
        t.s21.emplace_back(f.rows[i][1], f.rows[i][2]);
    }
    t.validate();
    return t;
}

void write_potential_csv(const std::string& path, const ReconstructedPotential& rec,
                         const FileStamp& stamp) {
    auto out = open_out(path);
    write_header(out, stamp, "x,v");
    for (std::size_t i = 0; i < rec.x.size(); ++i)
        out << format_double(rec.x[i]) << ',' << format_double(rec.v[i]) << "\n";
}

ReflectionTable read_reflection_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open \"" + path + "\"");
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') break;
    if (line.find("status") != std::string::npos) return read_recovery_csv(path);
    if (line.find("s22") != std::string::npos) return read_sweep_csv(path);
    throw ConfigError("\"" + path + "\": not a forward sweep or recovery CSV");
}

}  // namespace ph1d
