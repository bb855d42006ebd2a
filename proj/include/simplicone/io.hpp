#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "simplicone/types.hpp"

namespace simplicone {

// Text formats shared by the CLI and instance directories.
//
//   matrix: "m" on the first line, then m rows of m numbers
//   vector: "m" on the first line, then m numbers, one per line
//
// Every emitted number uses 17 significant digits so doubles round-trip.

std::string format_double(double value);

Matrix read_matrix(std::istream& in);
Vector read_vector(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& a);
void write_vector(std::ostream& out, const Vector& v);

Matrix read_matrix_file(const std::filesystem::path& path);
Vector read_vector_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const Matrix& a);
void write_vector_file(const std::filesystem::path& path, const Vector& v);

// Comma-separated, 17 significant digits.
std::string join_vector(const Vector& v, char sep = ',');

}  // namespace simplicone
