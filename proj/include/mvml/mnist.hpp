/**
 * mnist.hpp — IDX image/label ingestion and the 5-view shift augmentation.
 *
 * Images arrive in the IDX container (big-endian magic + dimensions, raw
 * byte payload), optionally gzip-compressed; pixels are rescaled to [0,1].
 * Each image yields five views — the original plus single-direction shifts
 * (left, right, up, down) by a configurable pixel count with zero fill — so
 * every sample is observed through n = 5 views sharing its latent content.
 * Images are flattened row-major (index = row * width + col).
 */
#ifndef MVML_MNIST_HPP
#define MVML_MNIST_HPP

#include <string>

#include "mvml/model.hpp"

namespace mvml {

struct ImageSet {
    int count = 0;
    int height = 28;
    int width = 28;
    Matrix pixels;     // count x (height*width), values in [0,1]
    IntVector labels;  // digits 0..9

    Matrix image(int i) const;  // height x width view of one flattened row
};

/// Parse an IDX image file plus its label file (gzip-transparent).
ImageSet read_idx(const std::string& images_path, const std::string& labels_path);

enum class ShiftDirection { left, right, up, down };

/// Translate by px pixels, zero-filling vacated cells and cropping overflow.
Matrix shift_image(const Matrix& image, ShiftDirection direction, int px);

/// n=5 views per image in fixed order [original, left, right, up, down].
MultiViewDataset build_multiview(const ImageSet& images, int px);

}  // namespace mvml

#endif  // MVML_MNIST_HPP
