#pragma once

#include "qvertex/rational.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace qv {

// Column-major sparse matrix over exact rationals. Column maps are ordered,
// so iteration (and thus every exported artifact) is deterministic.
class SparseMat {
  public:
    SparseMat() = default;
    SparseMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(cols) {}

    static SparseMat identity(std::size_t n);
    static SparseMat diagonal(const std::vector<Rat>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const;

    void add_to(std::size_t r, std::size_t c, const Rat& v);
    void set(std::size_t r, std::size_t c, const Rat& v);
    Rat get(std::size_t r, std::size_t c) const;
    const std::map<std::size_t, Rat>& col(std::size_t c) const { return data_[c]; }

    SparseMat transpose() const;
    SparseMat operator*(const SparseMat& rhs) const;
    SparseMat operator+(const SparseMat& rhs) const;
    SparseMat operator-(const SparseMat& rhs) const;
    SparseMat scaled(const Rat& s) const;
    bool operator==(const SparseMat& rhs) const;

    // this * diag(d) and diag(d) * this
    SparseMat mul_diag_right(const std::vector<Rat>& d) const;
    SparseMat mul_diag_left(const std::vector<Rat>& d) const;

    std::vector<Rat> apply(const std::vector<Rat>& v) const;        // this * v
    std::vector<Rat> apply_transpose(const std::vector<Rat>& v) const;

    std::vector<Rat> column_sums() const;
    bool is_zero() const;
    Rat max_abs() const;

    void prune();  // drop explicit zeros

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::map<std::size_t, Rat>> data_;
};

}  // namespace qv
