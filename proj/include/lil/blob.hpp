#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lil::blob {

/// Little-endian byte-stream writer for index serialization.
class Writer {
  public:
    void magic(const char m[4]) { buf_.insert(buf_.end(), m, m + 4); }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    std::vector<std::uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<std::uint8_t> buf_;
};

/// Matching reader; throws std::runtime_error on truncation or bad magic.
class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void magic(const char m[4]) {
        need(4);
        if (std::memcmp(bytes_.data() + off_, m, 4) != 0)
            throw std::runtime_error(std::string("bad magic, expected ") + std::string(m, 4));
        off_ += 4;
    }
    std::uint8_t u8() {
        need(1);
        return bytes_[off_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[off_ + i]) << (8 * i);
        off_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[off_ + i]) << (8 * i);
        off_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }

    bool exhausted() const { return off_ == bytes_.size(); }
    void expect_end() const {
        if (!exhausted()) throw std::runtime_error("trailing bytes in blob");
    }

  private:
    void need(std::size_t k) const {
        if (off_ + k > bytes_.size()) throw std::runtime_error("blob truncated");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t off_ = 0;
};

}  // namespace lil::blob
