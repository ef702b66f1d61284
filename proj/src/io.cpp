// SPDX-License-Identifier: Apache-2.0

#include "cma/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

namespace {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

constexpr std::uint16_t kVersion = 1;
constexpr char kFieldMagic[4] = {'C', 'M', 'A', 'F'};
constexpr char kMetricMagic[4] = {'C', 'M', 'M', 'F'};

const std::array<const char*, 8> kTraceFields = {"t",       "newton_iters", "residual_sup", "eig_min",
                                                 "eig_max", "sup_phi",      "sup_grad_phi", "sup_third"};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  }
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void expect_magic(const char (&magic)[4]) {
    need(4);
    if (std::memcmp(data_.data() + pos_, magic, 4) != 0) {
      throw FormatError(path_.string() + ": bad magic, expected " + std::string(magic, 4));
    }
    pos_ += 4;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw FormatError(path_.string() + ": truncated file");
  }

  std::filesystem::path path_;
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

Grid read_header(Reader& r, const char (&magic)[4]) {
  r.expect_magic(magic);
  const auto version = r.get<std::uint16_t>();
  if (version != kVersion) {
    throw FormatError(r.path().string() + ": unsupported version " + std::to_string(version));
  }
  const auto n = r.get<std::uint16_t>();
  const auto N = r.get<std::uint32_t>();
  try {
    return Grid(n, static_cast<int>(N));
  } catch (const InvalidArgument& e) {
    throw FormatError(r.path().string() + ": " + e.what());
  }
}

void write_header(Writer& w, const char (&magic)[4], const Grid& grid) {
  w.bytes(magic, 4);
  w.put<std::uint16_t>(kVersion);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(grid.complex_dim()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(grid.points_per_axis()));
}

double number(const nlohmann::json& step, const char* key) {
  if (!step.contains(key)) throw FormatError(std::string("trace step is missing '") + key + "'");
  const auto& v = step.at(key);
  if (!v.is_number()) throw FormatError(std::string("trace field '") + key + "' is not a number");
  return v.get<double>();
}

}  // namespace

// --- fields and metrics -------------------------------------------------------------

void write_field(const std::filesystem::path& path, const PeriodicScalarField& f) {
  Writer w(path);
  write_header(w, kFieldMagic, f.grid());
  const bool real = f.max_abs_imag() == 0.0;
  w.put<std::uint8_t>(real ? 0 : 1);
  for (const Complex& v : f.values()) {
    w.put<double>(v.real());
    if (!real) w.put<double>(v.imag());
  }
  w.finish();
}

PeriodicScalarField read_field(const std::filesystem::path& path) {
  Reader r(path);
  const Grid grid = read_header(r, kFieldMagic);
  const auto flag = r.get<std::uint8_t>();
  if (flag > 1) throw FormatError(path.string() + ": bad real/complex flag");
  const std::size_t per_point = flag == 0 ? 1 : 2;
  const std::size_t expected = static_cast<std::size_t>(grid.size()) * per_point * sizeof(double);
  if (r.remaining() != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) + " bytes of samples, found " +
                      std::to_string(r.remaining()));
  }
  Eigen::ArrayXcd values(grid.size());
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    const double re = r.get<double>();
    const double im = flag == 0 ? 0.0 : r.get<double>();
    values(p) = Complex(re, im);
  }
  return {grid, std::move(values)};
}

void write_metric(const std::filesystem::path& path, const HermitianMetricField& g) {
  Writer w(path);
  write_header(w, kMetricMagic, g.grid());
  const int n = g.dim();
  for (Eigen::Index p = 0; p < g.grid().size(); ++p) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k <= j; ++k) {
        w.put<double>(g(j, k)(p).real());
        w.put<double>(g(j, k)(p).imag());
      }
    }
  }
  w.finish();
}

HermitianMetricField read_metric(const std::filesystem::path& path) {
  Reader r(path);
  const Grid grid = read_header(r, kMetricMagic);
  const int n = grid.complex_dim();
  const std::size_t entries = static_cast<std::size_t>(n * (n + 1) / 2);
  const std::size_t expected = static_cast<std::size_t>(grid.size()) * entries * 2 * sizeof(double);
  if (r.remaining() != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) + " bytes of entries, found " +
                      std::to_string(r.remaining()));
  }
  HermitianMetricField g(grid);
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k <= j; ++k) {
        const double re = r.get<double>();
        const double im = r.get<double>();
        g(j, k)(p) = Complex(re, im);
        if (j != k) g(k, j)(p) = Complex(re, -im);
      }
    }
  }
  return g;
}

// --- traces ----------------------------------------------------------------------------

std::string trace_to_json(const ContinuityTrace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TraceStep& s : trace) {
    nlohmann::json step;
    step["t"] = s.t;
    step["newton_iters"] = s.newton_iters;
    step["residual_sup"] = s.residual_sup;
    step["eig_min"] = s.eig_min;
    step["eig_max"] = s.eig_max;
    step["sup_phi"] = s.sup_phi;
    step["sup_grad_phi"] = s.sup_grad_phi;
    step["sup_third"] = s.sup_third;
    arr.push_back(std::move(step));
  }
  return arr.dump(2) + "\n";
}

ContinuityTrace trace_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("trace is not valid JSON: ") + e.what());
  }
  if (!arr.is_array()) throw FormatError("trace must be a JSON array");
  ContinuityTrace trace;
  for (const auto& step : arr) {
    if (!step.is_object()) throw FormatError("trace entries must be objects");
    TraceStep s;
    s.t = number(step, "t");
    const double iters = number(step, "newton_iters");
    if (iters < 0 || iters != static_cast<int>(iters)) {
      throw FormatError("trace field 'newton_iters' must be a non-negative integer");
    }
    s.newton_iters = static_cast<int>(iters);
    s.residual_sup = number(step, "residual_sup");
    s.eig_min = number(step, "eig_min");
    s.eig_max = number(step, "eig_max");
    s.sup_phi = number(step, "sup_phi");
    s.sup_grad_phi = number(step, "sup_grad_phi");
    s.sup_third = number(step, "sup_third");
    trace.push_back(s);
  }
  return trace;
}

void write_trace(const std::filesystem::path& path, const ContinuityTrace& trace) {
  write_text_file(path, trace_to_json(trace));
}

ContinuityTrace read_trace(const std::filesystem::path& path) { return trace_from_json(read_text_file(path)); }

std::string trace_to_csv(const ContinuityTrace& trace) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kTraceFields.size(); ++i) out << (i ? "," : "") << kTraceFields[i];
  out << "\n" << std::setprecision(17);
  for (const TraceStep& s : trace) {
    out << s.t << ',' << s.newton_iters << ',' << s.residual_sup << ',' << s.eig_min << ',' << s.eig_max << ','
        << s.sup_phi << ',' << s.sup_grad_phi << ',' << s.sup_third << "\n";
  }
  return out.str();
}

std::string trace_table(const ContinuityTrace& trace) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "t" << std::right << std::setw(7) << "newton" << std::setw(13)
      << "residual" << std::setw(12) << "eig_min" << std::setw(12) << "eig_max" << std::setw(12) << "sup|phi|"
      << std::setw(13) << "sup|grad|" << std::setw(13) << "sup|third|" << "\n";
  for (const TraceStep& s : trace) {
    out << std::left << std::setw(10) << std::fixed << std::setprecision(6) << s.t << std::right
        << std::setw(7) << s.newton_iters << std::scientific << std::setprecision(3) << std::setw(13)
        << s.residual_sup << std::fixed << std::setprecision(6) << std::setw(12) << s.eig_min << std::setw(12)
        << s.eig_max << std::scientific << std::setprecision(3) << std::setw(12) << s.sup_phi << std::setw(13)
        << s.sup_grad_phi << std::setw(13) << s.sup_third << "\n";
  }
  return out.str();
}

// --- files ------------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

}  // namespace cma
