#pragma once

// Little-endian byte encoding helpers shared by the MVEC, MATT and MRSZ codecs.

#include "mvpress/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace mvpress::detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) noexcept {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    } else {
        return v;
    }
}

class ByteWriter {
public:
    void magic(std::string_view tag) { out_.append(tag); }
    void u32(std::uint32_t v) { put(to_little(v)); }
    void u64(std::uint64_t v) { put(to_little(v)); }
    void f32(float v) { put(to_little(std::bit_cast<std::uint32_t>(v))); }
    void bytes(std::string_view s) { out_.append(s); }

    std::string take() { return std::move(out_); }

private:
    template <typename T>
    void put(T v) {
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        out_.append(buf, sizeof(T));
    }

    std::string out_;
};

class ByteReader {
public:
    ByteReader(std::string_view data, std::string_view format) : data_(data), format_(format) {}

    void expect_magic(std::string_view tag) {
        if (data_.size() < tag.size() || data_.substr(0, tag.size()) != tag) {
            fail(ErrorKind::Format, std::string(format_) + ": bad magic, expected \"" +
                                        std::string(tag) + "\"");
        }
        pos_ = tag.size();
    }

    void expect_version(std::uint32_t expected) {
        const auto at = pos_;
        const auto v = u32();
        if (v != expected) {
            fail(ErrorKind::Format, std::string(format_) + ": unsupported version " +
                                        std::to_string(v) + " at offset " + std::to_string(at));
        }
    }

    std::uint32_t u32() { return to_little(get<std::uint32_t>()); }
    std::uint64_t u64() { return to_little(get<std::uint64_t>()); }
    float f32() { return std::bit_cast<float>(to_little(get<std::uint32_t>())); }

    std::string bytes(std::size_t count) {
        need(count);
        std::string s(data_.substr(pos_, count));
        pos_ += count;
        return s;
    }

    /// Fails unless at least `count` more bytes remain; lets callers reject
    /// absurd element counts before allocating.
    void need(std::size_t count) const {
        if (data_.size() - pos_ < count) {
            fail(ErrorKind::Corruption, std::string(format_) + ": truncated payload at offset " +
                                            std::to_string(pos_) + " (need " +
                                            std::to_string(count) + " bytes, have " +
                                            std::to_string(data_.size() - pos_) + ")");
        }
    }

    void expect_end() const {
        if (pos_ != data_.size()) {
            fail(ErrorKind::Corruption, std::string(format_) + ": " +
                                            std::to_string(data_.size() - pos_) +
                                            " trailing bytes at offset " + std::to_string(pos_));
        }
    }

    std::size_t offset() const noexcept { return pos_; }
    std::string_view format() const noexcept { return format_; }

private:
    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string_view data_;
    std::string_view format_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

} // namespace mvpress::detail
