#ifndef CHRON_IO_HPP
#define CHRON_IO_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "chron/mcmc.hpp"

namespace chron {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thinned-sample trace as CSV. Vector-valued columns (psi, theta, ...) are
// space-separated inside one quoted field so the row shape is stable across
// reversible-jump dimension changes. Onset fields are not included here; see
// the packed binary format below.
void write_trace_csv(std::ostream& out, const std::vector<SampleRecord>& samples);
std::vector<SampleRecord> read_trace_csv(std::istream& in);

// Onset-field samples packed as little-endian doubles, row-major cells per
// sample, after a small header (magic, lattice shape, sample count).
void write_fields_binary(std::ostream& out, const std::vector<SampleRecord>& samples,
                         int c1, int c2);
struct FieldsFile {
  int c1 = 0, c2 = 0;
  std::vector<std::vector<double>> fields;
};
FieldsFile read_fields_binary(std::istream& in);

// Stable FNV-1a hash of the run configuration; equal configs hash equal.
std::uint64_t config_hash(const RunConfig& config);

std::string acceptance_counts_json(const ChainOutput& chain);

}  // namespace chron

#endif
