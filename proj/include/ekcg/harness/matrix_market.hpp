#pragma once

#include <iosfwd>
#include <string>

#include "ekcg/core.hpp"

namespace ekcg::harness {

/// Reads a coordinate Matrix Market file with a real or integer field.
///
/// Symmetric files are expanded from their stored triangle; general files
/// must hold symmetric content. Throws ParseError on malformed input or
/// unsupported headers, and the matrix validators' errors otherwise.
SparseSpdMatrix<double> read_matrix_market(std::istream& in);
SparseSpdMatrix<double> read_matrix_market_file(const std::string& path);

/// Writes the lower triangle as "coordinate real symmetric" with 17
/// significant digits, so a read back reproduces the matrix bit for bit.
void write_matrix_market(std::ostream& out, const SparseSpdMatrix<double>& a);
void write_matrix_market_file(const std::string& path, const SparseSpdMatrix<double>& a);

}  // namespace ekcg::harness
