#include "hebbsim/idx.hpp"

#include <fstream>

namespace hebbsim {

IdxParseError::IdxParseError(const std::string& path, std::size_t byte_offset,
                             const std::string& what)
    : std::runtime_error(path + ": " + what + " (byte offset " +
                         std::to_string(byte_offset) + ")"),
      offset_(byte_offset) {}

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803u;
constexpr std::uint32_t kLabelsMagic = 0x00000801u;

std::vector<std::uint8_t> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IdxParseError(path, 0, "cannot open file");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                        const std::string& path) {
    if (offset + 4 > buf.size()) {
        throw IdxParseError(path, offset, "truncated file while reading a 32-bit word");
    }
    return (static_cast<std::uint32_t>(buf[offset]) << 24) |
           (static_cast<std::uint32_t>(buf[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(buf[offset + 2]) << 8) |
           static_cast<std::uint32_t>(buf[offset + 3]);
}

void append_be32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v >> 24));
    buf.push_back(static_cast<std::uint8_t>(v >> 16));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
    buf.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxImages load_idx_images(const std::string& path) {
    const auto buf = read_all(path);
    const std::uint32_t magic = read_be32(buf, 0, path);
    if (magic != kImagesMagic) {
        throw IdxParseError(path, 0, "bad magic 0x" + [magic] {
            char hex[16];
            std::snprintf(hex, sizeof(hex), "%08x", magic);
            return std::string(hex);
        }() + ", expected 0x00000803 (image tensor)");
    }
    IdxImages out;
    out.count = static_cast<int>(read_be32(buf, 4, path));
    out.rows = static_cast<int>(read_be32(buf, 8, path));
    out.cols = static_cast<int>(read_be32(buf, 12, path));
    if (out.count < 0 || out.rows <= 0 || out.cols <= 0) {
        throw IdxParseError(path, 4, "nonsensical dimensions");
    }
    const std::size_t expected = static_cast<std::size_t>(out.count) *
                                 static_cast<std::size_t>(out.rows) *
                                 static_cast<std::size_t>(out.cols);
    if (buf.size() != 16 + expected) {
        throw IdxParseError(path, buf.size(),
                            "payload size mismatch: have " + std::to_string(buf.size() - 16) +
                                " bytes, dimensions require " + std::to_string(expected));
    }
    out.pixels.assign(buf.begin() + 16, buf.end());
    return out;
}

IdxLabels load_idx_labels(const std::string& path) {
    const auto buf = read_all(path);
    const std::uint32_t magic = read_be32(buf, 0, path);
    if (magic != kLabelsMagic) {
        throw IdxParseError(path, 0, "bad magic, expected 0x00000801 (label vector)");
    }
    const std::uint32_t count = read_be32(buf, 4, path);
    if (buf.size() != 8 + count) {
        throw IdxParseError(path, buf.size(), "payload size mismatch for " +
                                                  std::to_string(count) + " labels");
    }
    IdxLabels out;
    out.labels.assign(buf.begin() + 8, buf.end());
    return out;
}

void write_idx_images(const std::string& path, const IdxImages& images) {
    std::vector<std::uint8_t> buf;
    append_be32(buf, kImagesMagic);
    append_be32(buf, static_cast<std::uint32_t>(images.count));
    append_be32(buf, static_cast<std::uint32_t>(images.rows));
    append_be32(buf, static_cast<std::uint32_t>(images.cols));
    buf.insert(buf.end(), images.pixels.begin(), images.pixels.end());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
}

void write_idx_labels(const std::string& path, const IdxLabels& labels) {
    std::vector<std::uint8_t> buf;
    append_be32(buf, kLabelsMagic);
    append_be32(buf, static_cast<std::uint32_t>(labels.labels.size()));
    buf.insert(buf.end(), labels.labels.begin(), labels.labels.end());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
}

}  // namespace hebbsim
