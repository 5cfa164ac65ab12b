#pragma once

#include <string>
#include <vector>

#include "sbmdyn/mps.hpp"
#include "sbmdyn/tebd.hpp"

namespace sbmdyn {

/// Everything needed to resume an evolution bit-exactly.
struct Checkpoint {
    MpsState state;
    double t = 0.0;
    std::string tag;             // free-form run identifier (config hash)
    TrajectoryRecord trajectory; // rows observed so far (snapshots not stored)
};

/// Versioned little-endian binary file; round trip is bit-exact.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
/// Throws NotFoundError when the file is missing, ConfigError when corrupt.
Checkpoint load_checkpoint(const std::string& path);

/// Plain-text `k,x_k` table, 15 significant digits.
void write_shift_table(const std::string& path, const std::vector<double>& shifts);
std::vector<double> read_shift_table(const std::string& path);

}  // namespace sbmdyn
