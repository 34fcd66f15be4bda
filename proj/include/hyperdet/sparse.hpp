#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyperdet::sparse {

struct Triplet {
    uint32_t row = 0, col = 0;
    double value = 0.0;
};

class Csr {
public:
    Csr() = default;
    Csr(size_t rows, size_t cols) : rows_(rows), cols_(cols), indptr_(rows + 1, 0) {}

    // Duplicate (row, col) entries are summed.
    static Csr from_triplets(size_t rows, size_t cols, std::vector<Triplet> triplets);
    static Csr identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t nnz() const { return indices_.size(); }

    const std::vector<size_t>& indptr() const { return indptr_; }
    const std::vector<uint32_t>& indices() const { return indices_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double at(uint32_t i, uint32_t j) const;  // 0.0 if absent
    Csr transposed() const;

    // y = this * x for dense row-major x (cols() x xcols); y is rows() x xcols
    void multiply_dense(const double* x, size_t xcols, double* y) const;

    std::vector<double> row_sums() const;

    // lexicographically sorted (i, j, weight) triplets
    std::vector<Triplet> to_triplets() const;

    bool operator==(const Csr& other) const = default;

private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<size_t> indptr_;
    std::vector<uint32_t> indices_;
    std::vector<double> values_;
};

// Coordinate exchange format: first line "rows cols nnz", then one
// "i j weight" line per entry in lexicographic order.
void write_triplets(std::ostream& os, const Csr& m);
Csr read_triplets(std::istream& is);

}  // namespace hyperdet::sparse
