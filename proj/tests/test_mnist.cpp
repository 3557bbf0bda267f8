/**
 * test_mnist.cpp — IDX parsing (plain and gzip), its error surface, image
 * shifting semantics, and the 5-view construction.
 */
#include <doctest.h>

#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mvml/mnist.hpp"

using namespace mvml;

namespace {

void put_be32(std::vector<uint8_t>& bytes, uint32_t value) {
    bytes.push_back(static_cast<uint8_t>(value >> 24));
    bytes.push_back(static_cast<uint8_t>(value >> 16));
    bytes.push_back(static_cast<uint8_t>(value >> 8));
    bytes.push_back(static_cast<uint8_t>(value));
}

std::vector<uint8_t> image_fixture(int count) {
    std::vector<uint8_t> bytes;
    put_be32(bytes, 0x00000803u);
    put_be32(bytes, static_cast<uint32_t>(count));
    put_be32(bytes, 28);
    put_be32(bytes, 28);
    for (int i = 0; i < count; ++i) {
        const uint8_t fill = i == 0 ? 0 : 255;
        bytes.insert(bytes.end(), 784, fill);
    }
    return bytes;
}

std::vector<uint8_t> label_fixture(const std::vector<uint8_t>& labels) {
    std::vector<uint8_t> bytes;
    put_be32(bytes, 0x00000801u);
    put_be32(bytes, static_cast<uint32_t>(labels.size()));
    bytes.insert(bytes.end(), labels.begin(), labels.end());
    return bytes;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream file(path, std::ios::binary);
    file.write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    REQUIRE(file.good());
}

std::vector<uint8_t> gzip_bytes(const std::vector<uint8_t>& raw) {
    z_stream strm{};
    REQUIRE(deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                         Z_DEFAULT_STRATEGY) == Z_OK);
    std::vector<uint8_t> out(raw.size() + 128);
    strm.next_in = const_cast<uint8_t*>(raw.data());
    strm.avail_in = static_cast<uInt>(raw.size());
    strm.next_out = out.data();
    strm.avail_out = static_cast<uInt>(out.size());
    REQUIRE(deflate(&strm, Z_FINISH) == Z_STREAM_END);
    out.resize(out.size() - strm.avail_out);
    deflateEnd(&strm);
    return out;
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

Matrix point_image(int row, int col) {
    Matrix img = Matrix::Zero(28, 28);
    img(row, col) = 1.0;
    return img;
}

}  // namespace

TEST_SUITE("mnist") {

TEST_CASE("plain IDX fixture parses") {
    TempFile img("fixture_images.idx"), lbl("fixture_labels.idx");
    write_file(img.path, image_fixture(2));
    write_file(lbl.path, label_fixture({3, 7}));
    const ImageSet set = read_idx(img.path, lbl.path);
    CHECK(set.count == 2);
    CHECK(set.height == 28);
    CHECK(set.width == 28);
    CHECK(set.pixels.row(0).maxCoeff() == 0.0);
    CHECK(set.pixels.row(1).minCoeff() == 1.0);
    CHECK(set.labels(0) == 3);
    CHECK(set.labels(1) == 7);
}

TEST_CASE("gzip-compressed IDX parses identically") {
    TempFile img("fixture_images.idx.gz"), lbl("fixture_labels.idx.gz");
    write_file(img.path, gzip_bytes(image_fixture(2)));
    write_file(lbl.path, gzip_bytes(label_fixture({3, 7})));
    const ImageSet set = read_idx(img.path, lbl.path);
    CHECK(set.count == 2);
    CHECK(set.pixels.row(0).maxCoeff() == 0.0);
    CHECK(set.pixels.row(1).minCoeff() == 1.0);
    CHECK(set.labels(1) == 7);
}

TEST_CASE("count mismatch is an error") {
    TempFile img("mismatch_images.idx"), lbl("mismatch_labels.idx");
    write_file(img.path, image_fixture(2));
    write_file(lbl.path, label_fixture({1, 2, 3}));
    CHECK_THROWS_WITH_AS(read_idx(img.path, lbl.path),
                         doctest::Contains("count mismatch"),
                         std::runtime_error);
}

TEST_CASE("truncated payload names the file") {
    TempFile img("trunc_images.idx"), lbl("trunc_labels.idx");
    std::vector<uint8_t> short_images = image_fixture(2);
    short_images.resize(short_images.size() - 10);
    write_file(img.path, short_images);
    write_file(lbl.path, label_fixture({1, 2}));
    CHECK_THROWS_WITH_AS(read_idx(img.path, lbl.path),
                         doctest::Contains("trunc_images.idx"),
                         std::runtime_error);
}

TEST_CASE("bad magic is an error") {
    TempFile img("magic_images.idx"), lbl("magic_labels.idx");
    std::vector<uint8_t> bad = image_fixture(2);
    bad[3] = 0x99;
    write_file(img.path, bad);
    write_file(lbl.path, label_fixture({1, 2}));
    CHECK_THROWS_WITH_AS(read_idx(img.path, lbl.path),
                         doctest::Contains("magic"), std::runtime_error);
}

TEST_CASE("labels above 9 are rejected") {
    TempFile img("range_images.idx"), lbl("range_labels.idx");
    write_file(img.path, image_fixture(2));
    write_file(lbl.path, label_fixture({1, 12}));
    CHECK_THROWS_WITH_AS(read_idx(img.path, lbl.path),
                         doctest::Contains("out of range"), std::runtime_error);
}

TEST_CASE("shift semantics") {
    SUBCASE("px = 0 is the identity") {
        const Matrix img = point_image(14, 14);
        for (auto dir : {ShiftDirection::left, ShiftDirection::right,
                         ShiftDirection::up, ShiftDirection::down}) {
            CHECK((shift_image(img, dir, 0) - img).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("point translations") {
        const Matrix img = point_image(14, 14);
        CHECK(shift_image(img, ShiftDirection::down, 2)(16, 14) == 1.0);
        CHECK(shift_image(img, ShiftDirection::up, 2)(12, 14) == 1.0);
        CHECK(shift_image(img, ShiftDirection::left, 2)(14, 12) == 1.0);
        CHECK(shift_image(img, ShiftDirection::right, 2)(14, 16) == 1.0);
        CHECK(shift_image(img, ShiftDirection::down, 2).sum() == 1.0);
    }
    SUBCASE("left then right restores interior content") {
        const Matrix img = point_image(10, 10);
        const Matrix back = shift_image(
            shift_image(img, ShiftDirection::left, 3), ShiftDirection::right, 3);
        CHECK((back - img).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("content crossing the border is cropped") {
        const Matrix img = point_image(0, 0);
        CHECK(shift_image(img, ShiftDirection::up, 1).sum() == 0.0);
        CHECK(shift_image(img, ShiftDirection::left, 1).sum() == 0.0);
    }
    SUBCASE("px out of range") {
        const Matrix img = point_image(5, 5);
        CHECK_THROWS_AS(shift_image(img, ShiftDirection::left, 28),
                        std::invalid_argument);
        CHECK_THROWS_AS(shift_image(img, ShiftDirection::left, -1),
                        std::invalid_argument);
    }
}

TEST_CASE("five-view construction") {
    ImageSet set;
    set.count = 2;
    set.height = 28;
    set.width = 28;
    set.pixels = Matrix::Zero(2, 784);
    set.pixels(0, 14 * 28 + 14) = 1.0;  // bright pixel at (14, 14)
    set.pixels(1, 5 * 28 + 5) = 1.0;
    set.labels.resize(2);
    set.labels << 1, 2;

    const MultiViewDataset data = build_multiview(set, 2);
    CHECK(data.m == 2);
    CHECK(data.n == 5);
    CHECK(data.d == 784);
    // View order [original, left, right, up, down].
    CHECK(data.view(0, 0)(14 * 28 + 14) == 1.0);
    CHECK(data.view(0, 1)(14 * 28 + 12) == 1.0);
    CHECK(data.view(0, 2)(14 * 28 + 16) == 1.0);
    CHECK(data.view(0, 3)(12 * 28 + 14) == 1.0);
    CHECK(data.view(0, 4)(16 * 28 + 14) == 1.0);

    const MultiViewDataset flat = build_multiview(set, 0);
    for (int j = 1; j < 5; ++j) {
        CHECK((flat.view(0, j) - flat.view(0, 0)).cwiseAbs().maxCoeff() == 0.0);
    }

    ImageSet tiny = set;
    tiny.count = 1;
    tiny.pixels = set.pixels.topRows(1).eval();
    tiny.labels.resize(1);
    CHECK_THROWS_AS(build_multiview(tiny, 2), std::invalid_argument);
}

}  // TEST_SUITE
