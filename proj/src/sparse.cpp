#include "hyperdet/sparse.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hyperdet::sparse {

Csr Csr::from_triplets(size_t rows, size_t cols, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    Csr m(rows, cols);
    m.indices_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::vector<size_t> counts(rows, 0);
    size_t i = 0;
    while (i < triplets.size()) {
        const auto& t = triplets[i];
        if (t.row >= rows || t.col >= cols) throw std::out_of_range("Csr::from_triplets: index out of range");
        double sum = t.value;
        size_t j = i + 1;
        while (j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col) {
            sum += triplets[j].value;
            ++j;
        }
        m.indices_.push_back(t.col);
        m.values_.push_back(sum);
        counts[t.row] += 1;
        i = j;
    }
    for (size_t r = 0; r < rows; ++r) m.indptr_[r + 1] = m.indptr_[r] + counts[r];
    return m;
}

Csr Csr::identity(size_t n) {
    Csr m(n, n);
    m.indices_.resize(n);
    m.values_.assign(n, 1.0);
    for (size_t i = 0; i < n; ++i) {
        m.indices_[i] = static_cast<uint32_t>(i);
        m.indptr_[i + 1] = i + 1;
    }
    return m;
}

double Csr::at(uint32_t i, uint32_t j) const {
    auto begin = indices_.begin() + static_cast<ptrdiff_t>(indptr_[i]);
    auto end = indices_.begin() + static_cast<ptrdiff_t>(indptr_[i + 1]);
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values_[static_cast<size_t>(it - indices_.begin())];
}

Csr Csr::transposed() const {
    Csr t(cols_, rows_);
    std::vector<size_t> counts(cols_, 0);
    for (uint32_t c : indices_) counts[c] += 1;
    for (size_t c = 0; c < cols_; ++c) t.indptr_[c + 1] = t.indptr_[c] + counts[c];
    t.indices_.resize(nnz());
    t.values_.resize(nnz());
    std::vector<size_t> cursor(t.indptr_.begin(), t.indptr_.end() - 1);
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t k = indptr_[r]; k < indptr_[r + 1]; ++k) {
            size_t pos = cursor[indices_[k]]++;
            t.indices_[pos] = static_cast<uint32_t>(r);
            t.values_[pos] = values_[k];
        }
    }
    return t;
}

void Csr::multiply_dense(const double* x, size_t xcols, double* y) const {
    for (size_t r = 0; r < rows_; ++r) {
        double* yr = y + r * xcols;
        std::fill(yr, yr + xcols, 0.0);
        for (size_t k = indptr_[r]; k < indptr_[r + 1]; ++k) {
            const double w = values_[k];
            const double* xr = x + static_cast<size_t>(indices_[k]) * xcols;
            for (size_t c = 0; c < xcols; ++c) yr[c] += w * xr[c];
        }
    }
}

std::vector<double> Csr::row_sums() const {
    std::vector<double> sums(rows_, 0.0);
    for (size_t r = 0; r < rows_; ++r)
        for (size_t k = indptr_[r]; k < indptr_[r + 1]; ++k) sums[r] += values_[k];
    return sums;
}

std::vector<Triplet> Csr::to_triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (size_t r = 0; r < rows_; ++r)
        for (size_t k = indptr_[r]; k < indptr_[r + 1]; ++k)
            out.push_back({static_cast<uint32_t>(r), indices_[k], values_[k]});
    return out;
}

void write_triplets(std::ostream& os, const Csr& m) {
    os << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    os.precision(17);
    for (const auto& t : m.to_triplets()) os << t.row << ' ' << t.col << ' ' << t.value << '\n';
}

Csr read_triplets(std::istream& is) {
    size_t rows = 0, cols = 0, nnz = 0;
    if (!(is >> rows >> cols >> nnz)) throw std::runtime_error("triplet header unreadable");
    std::vector<Triplet> ts;
    ts.reserve(nnz);
    for (size_t k = 0; k < nnz; ++k) {
        Triplet t;
        if (!(is >> t.row >> t.col >> t.value)) throw std::runtime_error("triplet entry unreadable");
        ts.push_back(t);
    }
    return Csr::from_triplets(rows, cols, std::move(ts));
}

}  // namespace hyperdet::sparse
