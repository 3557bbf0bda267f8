#include "mvml/mnist.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace mvml {

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                               std::istreambuf_iterator<char>());
    if (!file.good() && !file.eof()) {
        throw std::runtime_error("error reading file: " + path);
    }
    return bytes;
}

std::vector<uint8_t> gunzip(const std::vector<uint8_t>& in, const std::string& path) {
    z_stream stream{};
    // 15 + 32: accept both zlib and gzip wrappers with automatic detection.
    if (inflateInit2(&stream, 15 + 32) != Z_OK) {
        throw std::runtime_error("zlib initialization failed for: " + path);
    }
    std::vector<uint8_t> out;
    std::vector<uint8_t> buffer(1 << 20);
    stream.next_in = const_cast<Bytef*>(in.data());
    stream.avail_in = static_cast<uInt>(in.size());
    int status = Z_OK;
    while (status != Z_STREAM_END) {
        stream.next_out = buffer.data();
        stream.avail_out = static_cast<uInt>(buffer.size());
        status = inflate(&stream, Z_NO_FLUSH);
        if (status != Z_OK && status != Z_STREAM_END) {
            inflateEnd(&stream);
            throw std::runtime_error("gzip decompression failed for: " + path);
        }
        out.insert(out.end(), buffer.data(),
                   buffer.data() + (buffer.size() - stream.avail_out));
    }
    inflateEnd(&stream);
    return out;
}

std::vector<uint8_t> read_maybe_gzip(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
        return gunzip(bytes, path);
    }
    return bytes;
}

uint32_t be32(const std::vector<uint8_t>& bytes, size_t offset,
              const std::string& path) {
    if (offset + 4 > bytes.size()) {
        throw std::runtime_error("truncated IDX header in: " + path);
    }
    return (static_cast<uint32_t>(bytes[offset]) << 24) |
           (static_cast<uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<uint32_t>(bytes[offset + 3]);
}

}  // namespace

Matrix ImageSet::image(int i) const {
    if (i < 0 || i >= count) throw std::invalid_argument("ImageSet::image: index");
    Matrix img(height, width);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) img(r, c) = pixels(i, r * width + c);
    return img;
}

ImageSet read_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<uint8_t> img_bytes = read_maybe_gzip(images_path);
    const std::vector<uint8_t> lbl_bytes = read_maybe_gzip(labels_path);

    if (be32(img_bytes, 0, images_path) != 0x00000803u) {
        throw std::runtime_error("bad images magic number in: " + images_path);
    }
    const uint32_t n_images = be32(img_bytes, 4, images_path);
    const uint32_t height = be32(img_bytes, 8, images_path);
    const uint32_t width = be32(img_bytes, 12, images_path);
    const size_t image_payload = static_cast<size_t>(n_images) * height * width;
    if (img_bytes.size() < 16 + image_payload) {
        throw std::runtime_error("truncated images payload in: " + images_path);
    }

    if (be32(lbl_bytes, 0, labels_path) != 0x00000801u) {
        throw std::runtime_error("bad labels magic number in: " + labels_path);
    }
    const uint32_t n_labels = be32(lbl_bytes, 4, labels_path);
    if (lbl_bytes.size() < 8 + static_cast<size_t>(n_labels)) {
        throw std::runtime_error("truncated labels payload in: " + labels_path);
    }
    if (n_images != n_labels) {
        throw std::runtime_error("image/label count mismatch between " + images_path +
                                 " and " + labels_path);
    }

    ImageSet set;
    set.count = static_cast<int>(n_images);
    set.height = static_cast<int>(height);
    set.width = static_cast<int>(width);
    set.pixels.resize(set.count, set.height * set.width);
    set.labels.resize(set.count);
    const int d = set.height * set.width;
    for (int i = 0; i < set.count; ++i) {
        const uint8_t* row = img_bytes.data() + 16 + static_cast<size_t>(i) * d;
        for (int p = 0; p < d; ++p) set.pixels(i, p) = row[p] / 255.0;
        const uint8_t label = lbl_bytes[8 + static_cast<size_t>(i)];
        if (label > 9) {
            throw std::runtime_error("label out of range 0..9 in: " + labels_path);
        }
        set.labels(i) = label;
    }
    return set;
}

Matrix shift_image(const Matrix& image, ShiftDirection direction, int px) {
    const long h = image.rows();
    const long w = image.cols();
    const long limit =
        (direction == ShiftDirection::left || direction == ShiftDirection::right) ? w : h;
    if (px < 0 || px >= limit) {
        throw std::invalid_argument("shift_image: px out of range");
    }
    if (px == 0) return image;

    Matrix out = Matrix::Zero(h, w);
    switch (direction) {
        case ShiftDirection::left:
            out.block(0, 0, h, w - px) = image.block(0, px, h, w - px);
            break;
        case ShiftDirection::right:
            out.block(0, px, h, w - px) = image.block(0, 0, h, w - px);
            break;
        case ShiftDirection::up:
            out.block(0, 0, h - px, w) = image.block(px, 0, h - px, w);
            break;
        case ShiftDirection::down:
            out.block(px, 0, h - px, w) = image.block(0, 0, h - px, w);
            break;
    }
    return out;
}

MultiViewDataset build_multiview(const ImageSet& images, int px) {
    if (images.count < 2) {
        throw std::invalid_argument("build_multiview: need at least 2 images");
    }
    constexpr int kViews = 5;
    const ShiftDirection directions[4] = {ShiftDirection::left, ShiftDirection::right,
                                          ShiftDirection::up, ShiftDirection::down};
    const int d = images.height * images.width;

    MultiViewDataset data;
    data.m = images.count;
    data.n = kViews;
    data.d = d;
    data.views.resize(static_cast<Eigen::Index>(data.m) * kViews, d);
    for (int i = 0; i < images.count; ++i) {
        const Matrix original = images.image(i);
        data.views.row(static_cast<Eigen::Index>(i) * kViews) = images.pixels.row(i);
        for (int v = 0; v < 4; ++v) {
            const Matrix shifted = shift_image(original, directions[v], px);
            auto row = data.views.row(static_cast<Eigen::Index>(i) * kViews + 1 + v);
            for (int r = 0; r < images.height; ++r)
                for (int c = 0; c < images.width; ++c)
                    row(r * images.width + c) = shifted(r, c);
        }
    }
    return data;
}

}  // namespace mvml
