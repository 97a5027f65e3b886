#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bolab/field.hpp"
#include "bolab/functionals.hpp"
#include "bolab/solitons.hpp"

namespace bolab {

// Parse and format errors. what() carries "source:line: message" when a line
// is known.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& source, std::size_t line, const std::string& message);
    explicit IoError(const std::string& message) : std::runtime_error(message) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

// Text fields: a header line "# bolab-field L=<L> n=<n>" followed by n lines "x value".
void write_field_text(const std::filesystem::path& path, const RealField& u);
RealField read_field_text(const std::filesystem::path& path);

// Binary fields, all little-endian:
//   bytes 0..7   magic "BOLABFLD"
//   bytes 8..11  uint32 format version (1)
//   bytes 12..15 uint32 kind (0 real, 1 complex)
//   bytes 16..23 float64 L
//   bytes 24..31 uint64 n
//   payload      n float64 samples, or n (re, im) float64 pairs
void write_field_binary(const std::filesystem::path& path, const RealField& u);
void write_field_binary(const std::filesystem::path& path, const ComplexField& u);
RealField read_field_binary(const std::filesystem::path& path);
ComplexField read_complex_field_binary(const std::filesystem::path& path);

// Soliton parameter files:
//   speeds = [1, 2]
//   phases = [0, 0]   (optional, zeros by default)
//   t = 0             (optional)
// '#' starts a comment. Unknown or repeated keys are errors.
SolitonParams parse_soliton_params(const std::string& text, const std::string& source = "<string>");
SolitonParams read_soliton_params(const std::filesystem::path& path);

// Comma separated list of reals ("1,2,3"); throws std::invalid_argument.
std::vector<double> parse_real_list(const std::string& text);

void write_tower_csv(const std::filesystem::path& path, const ConservedTower& t);
void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& eigenvalues);
// Columns t, H0..H3 and distance (empty when no distances were recorded).
void write_trace_csv(const std::filesystem::path& path, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& conserved, const std::vector<double>& distances);

// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

// Pretty-printed with sorted keys and a trailing newline, so equal documents
// give equal bytes.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// Creates missing parent directories.
void ensure_parent(const std::filesystem::path& path);

}  // namespace bolab
