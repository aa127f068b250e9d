#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hebbsim {

/// IDX image container (MNIST layout): big-endian magic 0x00000803, three
/// dimension words, unsigned-byte pixels.
struct IdxImages {
    int count = 0;
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major

    const std::uint8_t* image(std::size_t index) const {
        return pixels.data() + index * static_cast<std::size_t>(rows) * cols;
    }
};

/// IDX label vector: magic 0x00000801, one dimension word, unsigned bytes.
struct IdxLabels {
    std::vector<std::uint8_t> labels;
};

class IdxParseError : public std::runtime_error {
public:
    IdxParseError(const std::string& path, std::size_t byte_offset,
                  const std::string& what);
    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

IdxImages load_idx_images(const std::string& path);
IdxLabels load_idx_labels(const std::string& path);

/// Writers for the same layout (used to build small fixture datasets).
void write_idx_images(const std::string& path, const IdxImages& images);
void write_idx_labels(const std::string& path, const IdxLabels& labels);

}  // namespace hebbsim
