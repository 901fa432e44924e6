#include "mvpress/matrix.hpp"

#include "mvpress/error.hpp"

#include <cmath>
#include <string>

namespace mvpress {

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (dim_ == 0) {
        fail(ErrorKind::Validation, "embedding dim must be >= 1");
    }
    if (data_.size() != rows_ * dim_) {
        fail(ErrorKind::Validation, "embedding data length " + std::to_string(data_.size()) +
                                        " != rows*dim " + std::to_string(rows_ * dim_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            fail(ErrorKind::Validation, "non-finite embedding value at row " +
                                            std::to_string(i / dim_) + ", column " +
                                            std::to_string(i % dim_));
        }
    }
}

EmbeddingMatrix EmbeddingMatrix::zeros(std::size_t rows, std::size_t dim) {
    return EmbeddingMatrix(rows, dim, std::vector<float>(rows * dim, 0.0f));
}

EmbeddingMatrix EmbeddingMatrix::from_rows(std::initializer_list<std::initializer_list<float>> rows) {
    require(rows.size() > 0, "from_rows needs at least one row to infer dim");
    const std::size_t dim = rows.begin()->size();
    std::vector<float> data;
    data.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        require(r.size() == dim, "ragged rows in from_rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return EmbeddingMatrix(rows.size(), dim, std::move(data));
}

EmbeddingMatrix EmbeddingMatrix::from_rows(const std::vector<std::vector<float>>& rows, std::size_t dim) {
    std::vector<float> data;
    data.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        require(r.size() == dim, "ragged rows in from_rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return EmbeddingMatrix(rows.size(), dim, std::move(data));
}

EmbeddingMatrix EmbeddingMatrix::slice(std::size_t first, std::size_t count) const {
    require(first + count <= rows_, "slice out of range");
    std::vector<float> data(data_.begin() + static_cast<std::ptrdiff_t>(first * dim_),
                            data_.begin() + static_cast<std::ptrdiff_t>((first + count) * dim_));
    return EmbeddingMatrix(count, dim_, std::move(data));
}

EmbeddingMatrix EmbeddingMatrix::normalized() const {
    std::vector<float> data = data_;
    for (std::size_t i = 0; i < rows_; ++i) {
        const double norm = std::sqrt(squared_norm(row(i)));
        if (norm == 0.0) {
            continue;
        }
        for (std::size_t d = 0; d < dim_; ++d) {
            data[i * dim_ + d] = static_cast<float>(data[i * dim_ + d] / norm);
        }
    }
    return EmbeddingMatrix(rows_, dim_, std::move(data));
}

double dot(std::span<const float> a, std::span<const float> b) noexcept {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        acc += static_cast<double>(a[d]) * static_cast<double>(b[d]);
    }
    return acc;
}

double squared_norm(std::span<const float> a) noexcept {
    return dot(a, a);
}

double cosine(std::span<const float> a, std::span<const float> b) noexcept {
    const double na = squared_norm(a);
    const double nb = squared_norm(b);
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace mvpress
