/**
 * io.hpp — CSV serialization and flat key=value configs.
 *
 * Matrices are written row-major, one row per line, 17 significant digits
 * (enough to round-trip an IEEE double exactly).  Datasets carry a one-line
 * integer header before the point rows:
 *   multi-view: "m,n,d"  followed by m*n rows of d values (sample-major,
 *               views of sample i contiguous);
 *   labeled:    "s,d"    followed by s rows of "label,x_1,...,x_d".
 * Config files are UTF-8 text, one "key=value" per line; blank lines and
 * '#' comments are ignored.
 */
#ifndef MVML_IO_HPP
#define MVML_IO_HPP

#include <map>
#include <string>

#include "mvml/model.hpp"

namespace mvml {

/// "%.17g" rendering used for every floating-point value we serialize.
std::string format_double(double value);

void write_matrix_csv(const std::string& path, const Matrix& matrix);
Matrix read_matrix_csv(const std::string& path);

void write_multiview_csv(const std::string& path, const MultiViewDataset& data);
MultiViewDataset read_multiview_csv(const std::string& path);

void write_labeled_csv(const std::string& path, const LabeledDataset& data);
LabeledDataset read_labeled_csv(const std::string& path);

/// Parse a flat key=value file; later duplicates override earlier ones.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace mvml

#endif  // MVML_IO_HPP
