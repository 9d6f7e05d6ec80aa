#include "flowsentry/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "flowsentry/error.hpp"

namespace flowsentry {

namespace {

constexpr char kMagic[8] = {'F', 'S', 'C', 'K', 'P', 'T', '0', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t read_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw FormatError("checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw FormatError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

void write_matrix(std::ostream& out, const Matrix& m) {
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (std::size_t i = 0; i < m.size(); ++i) write_f64(out, m.data()[i]);
}

Matrix read_matrix(std::istream& in) {
  const std::uint32_t rows = read_u32(in);
  const std::uint32_t cols = read_u32(in);
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  for (auto& v : data) v = read_f64(in);
  return Matrix(rows, cols, std::move(data));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open checkpoint for writing: " + path.string());
  }
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kFormatVersion);
  const auto names = params.names();
  write_u32(out, static_cast<std::uint32_t>(names.size()));
  for (const auto& name : names) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_matrix(out, params.value(name));
    write_matrix(out, params.first_moment(name));
    write_matrix(out, params.second_moment(name));
  }
  write_u64(out, params.step_count());
  if (!out) {
    throw IoError("failed writing checkpoint: " + path.string());
  }
}

ParameterStore load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open checkpoint: " + path.string());
  }
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint file: " + path.string());
  }
  const std::uint32_t version = read_u32(in);
  if (version != kFormatVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t count = read_u32(in);
  ParameterStore params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = read_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw FormatError("checkpoint truncated");
    Matrix value = read_matrix(in);
    Matrix m = read_matrix(in);
    Matrix v = read_matrix(in);
    if (!value.same_shape(m) || !value.same_shape(v)) {
      throw FormatError("moment shape mismatch for parameter '" + name + "'");
    }
    params.insert(name, std::move(value));
    params.first_moment(name) = std::move(m);
    params.second_moment(name) = std::move(v);
  }
  params.set_step_count(read_u64(in));
  return params;
}

}  // namespace flowsentry
