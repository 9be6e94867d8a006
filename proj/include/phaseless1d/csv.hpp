#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "phaseless1d/dataset.hpp"
#include "phaseless1d/inversion.hpp"
#include "phaseless1d/recovery.hpp"

namespace ph1d {

// Stamped into the first comment line of every output file.
struct FileStamp {
    std::string tool_version;
    std::string config_hash;
};

// 16-hex-digit hash of the canonical (sorted-key) JSON dump.
std::string config_hash(const nlohmann::json& config);

// Doubles are printed with 17 significant digits so a read-back is bit-exact.
std::string format_double(double v);

void write_sweep_csv(const std::string& path, const std::vector<ScatteringCoefficients>& sweep,
                     const FileStamp& stamp);
ReflectionTable read_sweep_csv(const std::string& path);

void write_dataset_csv(const std::string& path, const Dataset& data, const FileStamp& stamp);
// Metadata sidecar written next to the dataset (same path + ".json").
void write_dataset_sidecar(const std::string& csv_path, const nlohmann::json& meta);
Dataset read_dataset_csv(const std::string& path);  // variant inferred from the header

void write_recovery_csv(const std::string& path, const std::vector<RecoveryResult>& results,
                        const FileStamp& stamp);
ReflectionTable read_recovery_csv(const std::string& path);

void write_potential_csv(const std::string& path, const ReconstructedPotential& rec,
                         const FileStamp& stamp);

// Reads either a forward sweep CSV or a recovery CSV (detected by columns).
ReflectionTable read_reflection_table(const std::string& path);

}  // namespace ph1d
