#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mvpress {

/// Row-major n x h matrix of float32 token vectors. Queries, documents and
/// compressed documents all use this type. Every value is finite; rows may
/// be zero, dim may not.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data);

    static EmbeddingMatrix zeros(std::size_t rows, std::size_t dim);
    static EmbeddingMatrix from_rows(std::initializer_list<std::initializer_list<float>> rows);
    static EmbeddingMatrix from_rows(const std::vector<std::vector<float>>& rows, std::size_t dim);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<const float> row(std::size_t i) const noexcept {
        return {data_.data() + i * dim_, dim_};
    }
    std::span<const float> values() const noexcept { return data_; }

    /// Rows [first, first + count).
    EmbeddingMatrix slice(std::size_t first, std::size_t count) const;

    /// Copy with every nonzero row scaled to unit L2 norm; zero rows stay zero.
    EmbeddingMatrix normalized() const;

    friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 1;
    std::vector<float> data_;
};

double dot(std::span<const float> a, std::span<const float> b) noexcept;
double squared_norm(std::span<const float> a) noexcept;

/// Cosine similarity in double precision; 0 when either vector has zero norm.
double cosine(std::span<const float> a, std::span<const float> b) noexcept;

} // namespace mvpress

namespace mvpress {

/// n x n double matrix, row-major (distance and similarity tables).
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    explicit SquareMatrix(std::size_t size = 0) : n(size), values(size * size, 0.0) {}

    double& at(std::size_t i, std::size_t j) noexcept { return values[i * n + j]; }
    double at(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
};

} // namespace mvpress
