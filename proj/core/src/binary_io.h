/*
 * Copyright 2026 The FusionDetect Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FUSIONDETECT_SRC_BINARY_IO_H_
#define FUSIONDETECT_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace fusiondetect::internal {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

// Append-only little-endian buffer.
class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  template <typename T>
  void scalar(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }

  template <typename T>
  void array(std::span<const T> values) {
    const auto* p = reinterpret_cast<const char*>(values.data());
    buf_.insert(buf_.end(), p, p + values.size_bytes());
  }

  const std::vector<char>& data() const { return buf_; }

 private:
  std::vector<char> buf_;
};

// Bounds-checked reader; ok() turns false on the first short read.
class ByteReader {
 public:
  explicit ByteReader(std::span<const char> data) : data_(data) {}

  bool ok() const { return ok_; }
  size_t remaining() const { return data_.size() - pos_; }

  bool expect(std::string_view magic) {
    if (!take(magic.size())) return false;
    if (std::memcmp(data_.data() + pos_ - magic.size(), magic.data(), magic.size()) != 0) {
      ok_ = false;
    }
    return ok_;
  }

  template <typename T>
  T scalar() {
    T v{};
    if (take(sizeof(T))) std::memcpy(&v, data_.data() + pos_ - sizeof(T), sizeof(T));
    return v;
  }

  template <typename T>
  bool array(std::span<T> out) {
    if (!take(out.size_bytes())) return false;
    std::memcpy(out.data(), data_.data() + pos_ - out.size_bytes(), out.size_bytes());
    return true;
  }

 private:
  bool take(size_t n) {
    if (!ok_ || remaining() < n) {
      ok_ = false;
      return false;
    }
    pos_ += n;
    return true;
  }

  std::span<const char> data_;
  size_t pos_ = 0;
  bool ok_ = true;
};

}  // namespace fusiondetect::internal

#endif  // FUSIONDETECT_SRC_BINARY_IO_H_
