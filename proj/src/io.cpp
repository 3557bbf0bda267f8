#include "mvml/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mvml {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    return file;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open for reading: " + path);
    return file;
}

std::vector<double> parse_row(const std::string& line, const std::string& path) {
    std::vector<double> values;
    size_t start = 0;
    while (start <= line.size()) {
        size_t end = line.find(',', start);
        if (end == std::string::npos) end = line.size();
        const std::string field = line.substr(start, end - start);
        try {
            size_t used = 0;
            values.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw std::runtime_error("bad numeric field '" + field + "' in: " + path);
        }
        start = end + 1;
        if (end == line.size()) break;
    }
    return values;
}

void write_row(std::ofstream& file, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    for (long j = 0; j < row.size(); ++j) {
        if (j) file << ',';
        file << format_double(row(j));
    }
    file << '\n';
}

std::string trim(const std::string& text) {
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const size_t last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_matrix_csv(const std::string& path, const Matrix& matrix) {
    std::ofstream file = open_out(path);
    for (long i = 0; i < matrix.rows(); ++i) write_row(file, matrix.row(i));
    if (!file.good()) throw std::runtime_error("write failed: " + path);
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream file = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(parse_row(line, path));
        if (rows.back().size() != rows.front().size()) {
            throw std::runtime_error("ragged rows in matrix CSV: " + path);
        }
    }
    if (rows.empty()) throw std::runtime_error("empty matrix CSV: " + path);
    Matrix matrix(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            matrix(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    return matrix;
}

void write_multiview_csv(const std::string& path, const MultiViewDataset& data) {
    std::ofstream file = open_out(path);
    file << data.m << ',' << data.n << ',' << data.d << '\n';
    for (long i = 0; i < data.views.rows(); ++i) write_row(file, data.views.row(i));
    if (!file.good()) throw std::runtime_error("write failed: " + path);
}

MultiViewDataset read_multiview_csv(const std::string& path) {
    std::ifstream file = open_in(path);
    std::string line;
    if (!std::getline(file, line)) throw std::runtime_error("empty dataset CSV: " + path);
    const std::vector<double> header = parse_row(line, path);
    if (header.size() != 3) throw std::runtime_error("bad multi-view header in: " + path);

    MultiViewDataset data;
    data.m = static_cast<int>(header[0]);
    data.n = static_cast<int>(header[1]);
    data.d = static_cast<int>(header[2]);
    if (data.m < 1 || data.n < 1 || data.d < 1) {
        throw std::runtime_error("bad multi-view header in: " + path);
    }
    data.views.resize(static_cast<Eigen::Index>(data.m) * data.n, data.d);
    long row = 0;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        if (row >= data.views.rows()) throw std::runtime_error("extra rows in: " + path);
        const std::vector<double> values = parse_row(line, path);
        if (static_cast<int>(values.size()) != data.d) {
            throw std::runtime_error("row width mismatch in: " + path);
        }
        for (int j = 0; j < data.d; ++j) data.views(row, j) = values[j];
        ++row;
    }
    if (row != data.views.rows()) throw std::runtime_error("missing rows in: " + path);
    return data;
}

void write_labeled_csv(const std::string& path, const LabeledDataset& data) {
    std::ofstream file = open_out(path);
    file << data.size() << ',' << data.dim() << '\n';
    for (int i = 0; i < data.size(); ++i) {
        file << data.labels(i);
        for (int j = 0; j < data.dim(); ++j) file << ',' << format_double(data.points(i, j));
        file << '\n';
    }
    if (!file.good()) throw std::runtime_error("write failed: " + path);
}

LabeledDataset read_labeled_csv(const std::string& path) {
    std::ifstream file = open_in(path);
    std::string line;
    if (!std::getline(file, line)) throw std::runtime_error("empty dataset CSV: " + path);
    const std::vector<double> header = parse_row(line, path);
    if (header.size() != 2) throw std::runtime_error("bad labeled header in: " + path);

    const int s = static_cast<int>(header[0]);
    const int d = static_cast<int>(header[1]);
    if (s < 1 || d < 1) throw std::runtime_error("bad labeled header in: " + path);
    LabeledDataset data;
    data.points.resize(s, d);
    data.labels.resize(s);
    int row = 0;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        if (row >= s) throw std::runtime_error("extra rows in: " + path);
        const std::vector<double> values = parse_row(line, path);
        if (static_cast<int>(values.size()) != d + 1) {
            throw std::runtime_error("row width mismatch in: " + path);
        }
        data.labels(row) = static_cast<int>(values[0]);
        for (int j = 0; j < d; ++j) data.points(row, j) = values[j + 1];
        ++row;
    }
    if (row != s) throw std::runtime_error("missing rows in: " + path);
    return data;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream file = open_in(path);
    std::map<std::string, std::string> config;
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("expected key=value at " + path + ":" +
                                     std::to_string(line_no));
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("empty key at " + path + ":" +
                                     std::to_string(line_no));
        }
        config[key] = value;
    }
    return config;
}

}  // namespace mvml
