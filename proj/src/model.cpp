#include "cordet/model.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace cordet {

ModelParams::ModelParams(std::size_t n, std::size_t d, double rho) : n_(n), d_(d), rho_(rho) {
  if (n == 0 || d == 0) {
    throw std::invalid_argument("ModelParams: n and d must be positive");
  }
  if (!std::isfinite(rho) || rho == 0.0 || std::abs(rho) > 1.0) {
    throw std::invalid_argument("ModelParams: rho must lie in [-1,1] \\ {0}, got " +
                                std::to_string(rho));
  }
}

namespace {

constexpr std::array<char, 4> kMagic{'C', 'D', 'B', '1'};

template <typename UInt>
void put_le(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) {
    throw std::runtime_error("read_database: truncated input");
  }
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(bytes[i]) << (8 * i);
  }
  return value;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void read_block(std::istream& in, RowMatrix<double>& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double v = get_f64(in);
    if (!std::isfinite(v)) {
      throw std::runtime_error("read_database: non-finite entry");
    }
    m.data()[i] = v;
  }
}

}  // namespace

void write_database(std::ostream& out, const ModelParams& params, const DatabasePair<double>& db) {
  detail::check_shape(db, "write_database");
  if (static_cast<std::size_t>(db.rows()) != params.n() ||
      static_cast<std::size_t>(db.cols()) != params.d()) {
    throw std::invalid_argument("write_database: matrix shape does not match params");
  }
  if (params.n() > std::numeric_limits<std::uint32_t>::max() ||
      params.d() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("write_database: n or d exceeds 32 bits");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le(out, static_cast<std::uint32_t>(params.n()));
  put_le(out, static_cast<std::uint32_t>(params.d()));
  put_f64(out, params.rho());
  for (Eigen::Index i = 0; i < db.x.size(); ++i) {
    put_f64(out, db.x.data()[i]);
  }
  for (Eigen::Index i = 0; i < db.y.size(); ++i) {
    put_f64(out, db.y.data()[i]);
  }
  if (!out) {
    throw std::runtime_error("write_database: stream write failed");
  }
}

void write_database(const std::string& path, const ModelParams& params,
                    const DatabasePair<double>& db) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_database: cannot open " + path);
  }
  write_database(out, params, db);
}

StoredDatabase read_database(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw std::runtime_error("read_database: bad magic (expected CDB1)");
  }
  const auto n = get_le<std::uint32_t>(in);
  const auto d = get_le<std::uint32_t>(in);
  const double rho = get_f64(in);
  ModelParams params(n, d, rho);
  DatabasePair<double> db{RowMatrix<double>(n, d), RowMatrix<double>(n, d)};
  read_block(in, db.x);
  read_block(in, db.y);
  return {params, std::move(db)};
}

StoredDatabase read_database(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_database: cannot open " + path);
  }
  return read_database(in);
}

}  // namespace cordet
