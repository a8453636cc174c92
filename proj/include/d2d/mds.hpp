#pragma once

#include <cstddef>
#include <vector>

#include "d2d/common.hpp"
#include "d2d/gf.hpp"

namespace d2d {

// A "wide symbol" is a byte buffer holding a fixed run of GF(2^q) elements
// that are all transformed in lockstep; the codes below act column-wise on
// such buffers. Elements are packed big-endian when q = 16.
std::size_t elems_in(std::size_t bytes, int q);
FieldElem get_elem(const Bytes& sym, int q, std::size_t j);
void set_elem(Bytes& sym, int q, std::size_t j, FieldElem v);

// Systematic maximum-distance-separable code: the K data symbols sit at
// evaluation points 0..K-1 of a degree-<K polynomial over GF(2^q) and the
// parity symbols extend the evaluation to points K..nsym-1, so any K of the
// nsym coordinates recover the data.
struct MdsCode {
    int K = 0;
    int nsym = 0;
    int q = 0;

    MdsCode(int K, int nsym);          // smallest supported field that fits
    MdsCode(int K, int nsym, int q);   // explicit field width

    const GaloisField& field() const { return GaloisField::for_width(q); }
};

std::vector<Bytes> mds_encode(const MdsCode& code, const std::vector<Bytes>& data);

struct CodedSymbol {
    int index = 0;  // coordinate in 0..nsym-1
    Bytes value;
};

// Reconstructs the K data symbols from any collection containing at least K
// distinct coordinates; throws InsufficientSymbols otherwise.
std::vector<Bytes> mds_decode(const MdsCode& code, const std::vector<CodedSymbol>& received);

// Dense matrix over GF(2^q), row-major.
struct GfMatrix {
    int rows = 0;
    int cols = 0;
    int q = 8;
    std::vector<FieldElem> a;

    GfMatrix() = default;
    GfMatrix(int rows, int cols, int q)
        : rows(rows), cols(cols), q(q), a(static_cast<std::size_t>(rows) * cols, 0) {}

    FieldElem& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    FieldElem at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

int rank_gf(GfMatrix m);

// Solves the square system A x = b column-wise over wide symbols; throws
// InvalidParams when A is singular.
std::vector<Bytes> gf_solve(GfMatrix A, std::vector<Bytes> b);

// Per-node hashing matrix with independent uniform entries, reproducible
// from the seed.
struct HashMatrix {
    int K = 0;
    int cols = 0;
    int q = 8;
    std::vector<FieldElem> a;  // row-major K x cols

    static HashMatrix generate(int K, int cols, int q, u64 seed);
    FieldElem at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// cache_j = sum_i data_i * H[i][j]: projects K wide data symbols onto the
// matrix columns.
std::vector<Bytes> hash_encode(const HashMatrix& H, const std::vector<Bytes>& data);

}  // namespace d2d
