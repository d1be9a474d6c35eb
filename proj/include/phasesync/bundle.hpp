#pragma once

#include "phasesync/array3.hpp"
#include "phasesync/signalprep.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace phasesync {

enum class DType { F64, C128 };

std::string_view to_string(DType dtype);
std::size_t dtype_size(DType dtype) noexcept;

// JSON header (`<base>.json`) + raw little-endian payload (`<base>.bin`).
struct MatrixBundle {
  std::vector<std::size_t> dims;
  DType dtype = DType::F64;
  std::vector<std::string> axes;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<double> real;     // used when dtype == F64
  std::vector<cplx> complex;    // used when dtype == C128

  std::size_t element_count() const noexcept;
};

// `path` may be the basename or either of the two files.
std::filesystem::path bundle_base(const std::filesystem::path& path);

void write_bundle(const std::filesystem::path& path, const MatrixBundle& bundle);

// Throws FormatError (with file and byte offset) on malformed headers or
// payload size mismatches.
MatrixBundle read_bundle(const std::filesystem::path& path);

MatrixBundle make_bundle(const Array3<double>& a, nlohmann::json meta = nlohmann::json::object());
MatrixBundle make_bundle(const Array3<cplx>& a, nlohmann::json meta = nlohmann::json::object());

// Rank-3 [signals x samples x trials] views; rank-2 inputs get a trailing
// singleton trial axis. Throws ShapeError otherwise.
RealEpochs to_real_epochs(const MatrixBundle& bundle);
Array3<cplx> to_complex_array(const MatrixBundle& bundle);

}  // namespace phasesync
