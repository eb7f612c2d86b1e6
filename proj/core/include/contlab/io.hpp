#pragma once

#include <string>

#include "contlab/field.hpp"
#include "contlab/form.hpp"

namespace contlab::io {

/// Field snapshots come in two containers sharing one layout rule: nodes in
/// storage order (row major, last axis fastest), with Hermitian form
/// components per node serialized in conjugate-index-major order, i.e. the
/// transpose of the in-memory (j, k) layout. The transpose happens only here.
///
/// Text container: CSV whose header row lists the axis sizes, then one row
/// per node (1 column for real scalars, 2 for complex, 2 n^2 for forms with
/// interleaved re/im).
///
/// Binary container: 32-byte header
///   magic "CONTFLD1" | u32 n | u32 points_per_axis | u32 payload_kind |
///   u32 reserved | u64 payload_bytes
/// followed by raw little-endian float64 values in the same order as the CSV
/// columns. payload_kind: 0 real scalar, 1 complex scalar, 2 form.

void write_scalar_csv(const std::string& path, const ScalarField& f);
ScalarField read_scalar_csv(const std::string& path);
void write_form_csv(const std::string& path, const HermitianFormField& h);
HermitianFormField read_form_csv(const std::string& path);

void write_scalar(const std::string& path, const ScalarField& f);
ScalarField read_scalar(const std::string& path);
void write_form(const std::string& path, const HermitianFormField& h);
HermitianFormField read_form(const std::string& path);

/// Dispatch on extension: ".csv" selects the text container.
void save_scalar(const std::string& path, const ScalarField& f);
ScalarField load_scalar(const std::string& path);
void save_form(const std::string& path, const HermitianFormField& h);
HermitianFormField load_form(const std::string& path);

/// 8-bit binary portable graymap of the first two axes (remaining axes at
/// index 0), linearly rescaled from [min, max]; constant fields map to black.
void write_heatmap_pgm(const std::string& path, const ScalarField& f);

}  // namespace contlab::io
