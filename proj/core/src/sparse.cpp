#include "qvertex/sparse.hpp"

#include <stdexcept>

namespace qv {

SparseMat SparseMat::identity(std::size_t n) {
    SparseMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i][i] = Rat(1);
    return m;
}

SparseMat SparseMat::diagonal(const std::vector<Rat>& d) {
    SparseMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] != 0) m.data_[i][i] = d[i];
    return m;
}

std::size_t SparseMat::nnz() const {
    std::size_t t = 0;
    for (const auto& c : data_) t += c.size();
    return t;
}

void SparseMat::add_to(std::size_t r, std::size_t c, const Rat& v) {
    if (v == 0) return;
    auto& cell = data_[c][r];
    cell += v;
    if (cell == 0) data_[c].erase(r);
}

void SparseMat::set(std::size_t r, std::size_t c, const Rat& v) {
    if (v == 0)
        data_[c].erase(r);
    else
        data_[c][r] = v;
}

Rat SparseMat::get(std::size_t r, std::size_t c) const {
    auto it = data_[c].find(r);
    return it == data_[c].end() ? Rat(0) : it->second;
}

SparseMat SparseMat::transpose() const {
    SparseMat t(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c)
        for (const auto& [r, v] : data_[c]) t.data_[r][c] = v;
    return t;
}

SparseMat SparseMat::operator*(const SparseMat& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("SparseMat: dimension mismatch in product");
    SparseMat out(rows_, rhs.cols_);
    for (std::size_t j = 0; j < rhs.cols_; ++j) {
        auto& outcol = out.data_[j];
        for (const auto& [k, b] : rhs.data_[j]) {
            for (const auto& [r, a] : data_[k]) {
                auto& cell = outcol[r];
                cell += a * b;
            }
        }
        for (auto it = outcol.begin(); it != outcol.end();)
            it = (it->second == 0) ? outcol.erase(it) : std::next(it);
    }
    return out;
}

SparseMat SparseMat::operator+(const SparseMat& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("SparseMat: dimension mismatch in sum");
    SparseMat out = *this;
    for (std::size_t c = 0; c < cols_; ++c)
        for (const auto& [r, v] : rhs.data_[c]) out.add_to(r, c, v);
    return out;
}

SparseMat SparseMat::operator-(const SparseMat& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("SparseMat: dimension mismatch in difference");
    SparseMat out = *this;
    for (std::size_t c = 0; c < cols_; ++c)
        for (const auto& [r, v] : rhs.data_[c]) out.add_to(r, c, -v);
    return out;
}

SparseMat SparseMat::scaled(const Rat& s) const {
    SparseMat out(rows_, cols_);
    if (s == 0) return out;
    for (std::size_t c = 0; c < cols_; ++c)
        for (const auto& [r, v] : data_[c]) out.data_[c][r] = v * s;
    return out;
}

bool SparseMat::operator==(const SparseMat& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) return false;
    return (*this - rhs).is_zero();
}

SparseMat SparseMat::mul_diag_right(const std::vector<Rat>& d) const {
    SparseMat out(rows_, cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
        if (d[c] == 0) continue;
        for (const auto& [r, v] : data_[c]) out.data_[c][r] = v * d[c];
    }
    return out;
}

SparseMat SparseMat::mul_diag_left(const std::vector<Rat>& d) const {
    SparseMat out(rows_, cols_);
    for (std::size_t c = 0; c < cols_; ++c)
        for (const auto& [r, v] : data_[c])
            if (d[r] != 0) out.data_[c][r] = d[r] * v;
    return out;
}

std::vector<Rat> SparseMat::apply(const std::vector<Rat>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("SparseMat::apply: size mismatch");
    std::vector<Rat> out(rows_, Rat(0));
    for (std::size_t c = 0; c < cols_; ++c) {
        if (v[c] == 0) continue;
        for (const auto& [r, a] : data_[c]) out[r] += a * v[c];
    }
    return out;
}

std::vector<Rat> SparseMat::apply_transpose(const std::vector<Rat>& v) const {
    if (v.size() != rows_) throw std::invalid_argument("SparseMat::apply_transpose: size mismatch");
    std::vector<Rat> out(cols_, Rat(0));
    for (std::size_t c = 0; c < cols_; ++c)
        for (const auto& [r, a] : data_[c]) out[c] += a * v[r];
    return out;
}

std::vector<Rat> SparseMat::column_sums() const {
    std::vector<Rat> out(cols_, Rat(0));
    for (std::size_t c = 0; c < cols_; ++c)
        for (const auto& [r, v] : data_[c]) out[c] += v;
    return out;
}

bool SparseMat::is_zero() const {
    for (const auto& c : data_)
        for (const auto& [r, v] : c)
            if (v != 0) return false;
    return true;
}

Rat SparseMat::max_abs() const {
    Rat best(0);
    for (const auto& c : data_)
        for (const auto& [r, v] : c) {
            Rat a = rat_abs(v);
            if (a > best) best = a;
        }
    return best;
}

void SparseMat::prune() {
    for (auto& c : data_)
        for (auto it = c.begin(); it != c.end();)
            it = (it->second == 0) ? c.erase(it) : std::next(it);
}

}  // namespace qv
