#include "phasesync/bundle.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

namespace phasesync {

std::string_view to_string(DType dtype) { return dtype == DType::F64 ? "f64" : "c128"; }

std::size_t dtype_size(DType dtype) noexcept { return dtype == DType::F64 ? 8 : 16; }

std::size_t MatrixBundle::element_count() const noexcept {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::filesystem::path bundle_base(const std::filesystem::path& path) {
  auto ext = path.extension();
  if (ext == ".json" || ext == ".bin") return std::filesystem::path(path).replace_extension();
  return path;
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
  return std::filesystem::path(base.string() + suffix);
}

// Payload is little-endian doubles; swap on big-endian hosts.
void to_little_endian(std::vector<char>& bytes) {
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t k = 0; k + 8 <= bytes.size(); k += 8) std::reverse(bytes.begin() + k, bytes.begin() + k + 8);
  }
}

[[noreturn]] void format_error(const std::filesystem::path& file, std::size_t offset, const std::string& what) {
  throw Error(ErrorCode::FormatError, file.string() + " @ byte " + std::to_string(offset) + ": " + what);
}

}  // namespace

void write_bundle(const std::filesystem::path& path, const MatrixBundle& bundle) {
  const auto base = bundle_base(path);
  const std::size_t count = bundle.element_count();
  const std::size_t stored = bundle.dtype == DType::F64 ? bundle.real.size() : bundle.complex.size();
  if (stored != count) throw Error(ErrorCode::ShapeError, "bundle payload does not match its dims");
  if (!bundle.axes.empty() && bundle.axes.size() != bundle.dims.size()) {
    throw Error(ErrorCode::ShapeError, "bundle axes and dims differ in length");
  }

  nlohmann::json header;
  header["dims"] = bundle.dims;
  header["dtype"] = to_string(bundle.dtype);
  header["order"] = "row-major";
  header["axes"] = bundle.axes;
  header["meta"] = bundle.meta;

  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  std::ofstream json_out(with_suffix(base, ".json"));
  json_out << header.dump(2) << '\n';
  if (!json_out) throw Error(ErrorCode::FormatError, "cannot write " + with_suffix(base, ".json").string());

  std::vector<char> bytes(count * dtype_size(bundle.dtype));
  if (count > 0) {
    const void* src = bundle.dtype == DType::F64 ? static_cast<const void*>(bundle.real.data())
                                                 : static_cast<const void*>(bundle.complex.data());
    std::memcpy(bytes.data(), src, bytes.size());
  }
  to_little_endian(bytes);
  std::ofstream bin_out(with_suffix(base, ".bin"), std::ios::binary);
  bin_out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!bin_out) throw Error(ErrorCode::FormatError, "cannot write " + with_suffix(base, ".bin").string());
}

MatrixBundle read_bundle(const std::filesystem::path& path) {
  const auto base = bundle_base(path);
  const auto json_path = with_suffix(base, ".json");
  const auto bin_path = with_suffix(base, ".bin");

  std::ifstream json_in(json_path);
  if (!json_in) format_error(json_path, 0, "cannot open header");
  std::stringstream text;
  text << json_in.rdbuf();

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::parse_error& e) {
    format_error(json_path, e.byte, e.what());
  }

  MatrixBundle bundle;
  try {
    bundle.dims = header.at("dims").get<std::vector<std::size_t>>();
    const auto dtype = header.at("dtype").get<std::string>();
    if (dtype == "f64") {
      bundle.dtype = DType::F64;
    } else if (dtype == "c128") {
      bundle.dtype = DType::C128;
    } else {
      format_error(json_path, 0, "unsupported dtype '" + dtype + "'");
    }
    if (header.value("order", std::string("row-major")) != "row-major") {
      format_error(json_path, 0, "only row-major payloads are supported");
    }
    if (header.contains("axes")) bundle.axes = header["axes"].get<std::vector<std::string>>();
    if (header.contains("meta")) bundle.meta = header["meta"];
  } catch (const nlohmann::json::exception& e) {
    format_error(json_path, 0, std::string("malformed header: ") + e.what());
  }

  std::ifstream bin_in(bin_path, std::ios::binary);
  if (!bin_in) format_error(bin_path, 0, "cannot open payload");
  std::vector<char> bytes((std::istreambuf_iterator<char>(bin_in)), std::istreambuf_iterator<char>());
  const std::size_t expected = bundle.element_count() * dtype_size(bundle.dtype);
  if (bytes.size() != expected) {
    format_error(bin_path, std::min(bytes.size(), expected),
                 "payload holds " + std::to_string(bytes.size()) + " bytes, header implies " + std::to_string(expected));
  }
  to_little_endian(bytes);
  if (bundle.dtype == DType::F64) {
    bundle.real.resize(bundle.element_count());
    if (!bytes.empty()) std::memcpy(bundle.real.data(), bytes.data(), bytes.size());
  } else {
    bundle.complex.resize(bundle.element_count());
    if (!bytes.empty()) std::memcpy(bundle.complex.data(), bytes.data(), bytes.size());
  }
  return bundle;
}

MatrixBundle make_bundle(const Array3<double>& a, nlohmann::json meta) {
  MatrixBundle b;
  b.dims = {a.signals(), a.samples(), a.trials()};
  b.dtype = DType::F64;
  b.axes = {"signal", "sample", "trial"};
  b.meta = std::move(meta);
  b.real = a.values();
  return b;
}

MatrixBundle make_bundle(const Array3<cplx>& a, nlohmann::json meta) {
  MatrixBundle b;
  b.dims = {a.signals(), a.samples(), a.trials()};
  b.dtype = DType::C128;
  b.axes = {"signal", "sample", "trial"};
  b.meta = std::move(meta);
  b.complex = a.values();
  return b;
}

namespace {

std::array<std::size_t, 3> epoch_dims(const MatrixBundle& bundle) {
  if (bundle.dims.size() == 3) return {bundle.dims[0], bundle.dims[1], bundle.dims[2]};
  if (bundle.dims.size() == 2) return {bundle.dims[0], bundle.dims[1], 1};
  throw Error(ErrorCode::ShapeError, "expected a [signal x sample x trial] bundle, got rank " +
                                         std::to_string(bundle.dims.size()));
}

}  // namespace

RealEpochs to_real_epochs(const MatrixBundle& bundle) {
  if (bundle.dtype != DType::F64) throw Error(ErrorCode::ShapeError, "expected an f64 bundle of real epochs");
  RealEpochs x{Array3<double>(epoch_dims(bundle), bundle.real), std::nullopt};
  if (bundle.meta.contains("fs") && bundle.meta["fs"].is_number()) x.fs = bundle.meta["fs"].get<double>();
  return x;
}

Array3<cplx> to_complex_array(const MatrixBundle& bundle) {
  if (bundle.dtype != DType::C128) throw Error(ErrorCode::ShapeError, "expected a c128 bundle of analytic data");
  return Array3<cplx>(epoch_dims(bundle), bundle.complex);
}

}  // namespace phasesync
