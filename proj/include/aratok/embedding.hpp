// Copyright 2026 The aratok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARATOK_EMBEDDING_HPP_
#define ARATOK_EMBEDDING_HPP_

// Dense row-major embedding matrices and the ARTE file format:
//
//   "ARTE" | u32 version=1 | u64 rows | u64 dim | rows*dim float32
//
// All integers and floats little-endian, no padding.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "aratok/errors.hpp"

namespace aratok {

static_assert(std::numeric_limits<float>::is_iec559, "binary32 floats required");

// Values are held in double so that averaging is exact enough to compare
// against a reference summation; they narrow to binary32 on write.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim)
      : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows_ * dim_) {
      throw DataError("embedding data has " + std::to_string(data_.size()) +
                      " values, expected " + std::to_string(rows_ * dim_));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw DataError("embedding contains a non-finite value");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::span<const double> row(std::size_t i) const {
    check_row(i);
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) {
    check_row(i);
    return {data_.data() + i * dim_, dim_};
  }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  void check_row(std::size_t i) const {
    if (i >= rows_) {
      throw DataError("row " + std::to_string(i) + " out of range for " +
                      std::to_string(rows_) + " rows");
    }
  }

  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline constexpr char kArteMagic[4] = {'A', 'R', 'T', 'E'};
inline constexpr std::uint32_t kArteVersion = 1;

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(bits & 0xFF));
    bits >>= 8;
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) bits = (bits << 8) | p[i];
  return std::bit_cast<T>(bits);
}

}  // namespace detail

inline std::string arte_to_bytes(const EmbeddingMatrix& m) {
  std::string out(kArteMagic, 4);
  out.reserve(24 + 4 * m.data().size());
  detail::put_le<std::uint32_t>(out, kArteVersion);
  detail::put_le<std::uint64_t>(out, m.rows());
  detail::put_le<std::uint64_t>(out, m.dim());
  for (double v : m.data()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw DataError("embedding value overflows binary32");
    detail::put_le<float>(out, f);
  }
  return out;
}

inline EmbeddingMatrix arte_from_bytes(std::string_view bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 24) throw DataError("ARTE file truncated in header");
  if (std::memcmp(p, kArteMagic, 4) != 0) throw DataError("not an ARTE file (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(p + 4);
  if (version != kArteVersion) {
    throw DataError("unsupported ARTE version " + std::to_string(version));
  }
  const auto rows = detail::get_le<std::uint64_t>(p + 8);
  const auto dim = detail::get_le<std::uint64_t>(p + 16);
  const std::uint64_t payload = bytes.size() - 24;
  if (dim != 0 && rows > payload / 4 / dim) {
    throw DataError("ARTE file truncated: header declares " + std::to_string(rows) + "x" +
                    std::to_string(dim));
  }
  const std::uint64_t count = rows * dim;
  if (payload != count * 4) {
    throw DataError(payload < count * 4 ? "ARTE file truncated"
                                        : "ARTE file has trailing bytes");
  }
  std::vector<double> data(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    data[i] = detail::get_le<float>(p + 24 + 4 * i);
  }
  return EmbeddingMatrix(rows, dim, std::move(data));
}

inline void write_arte(std::ostream& out, const EmbeddingMatrix& m) {
  const auto bytes = arte_to_bytes(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed to write ARTE data");
}

inline EmbeddingMatrix read_arte(std::istream& in) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw DataError("failed to read ARTE data");
  return arte_from_bytes(bytes);
}

inline void write_arte_file(const std::string& path, const EmbeddingMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_arte(out, m);
}

inline EmbeddingMatrix read_arte_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_arte(in);
}

}  // namespace aratok

#endif  // ARATOK_EMBEDDING_HPP_
