#include "d2d/mds.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "d2d/rng.hpp"

namespace d2d {

std::size_t elems_in(std::size_t bytes, int q) {
    std::size_t width = static_cast<std::size_t>(q) / 8;
    if (q != 8 && q != 16) throw InvalidParams("unsupported field width q=" + std::to_string(q));
    if (bytes % width != 0) {
        throw InvalidParams("symbol of " + std::to_string(bytes) +
                            " bytes does not pack GF(2^" + std::to_string(q) + ") elements");
    }
    return bytes / width;
}

FieldElem get_elem(const Bytes& sym, int q, std::size_t j) {
    if (q == 8) return sym[j];
    return (static_cast<FieldElem>(sym[2 * j]) << 8) | sym[2 * j + 1];
}

void set_elem(Bytes& sym, int q, std::size_t j, FieldElem v) {
    if (q == 8) {
        sym[j] = static_cast<u8>(v);
    } else {
        sym[2 * j] = static_cast<u8>(v >> 8);
        sym[2 * j + 1] = static_cast<u8>(v & 0xFF);
    }
}

MdsCode::MdsCode(int K, int nsym) : MdsCode(K, nsym, GaloisField::width_for_symbols(nsym)) {}

MdsCode::MdsCode(int K, int nsym, int q) : K(K), nsym(nsym), q(q) {
    if (K <= 0 || nsym < K) {
        throw InvalidParams("code needs nsym >= K >= 1, got K=" + std::to_string(K) +
                            " nsym=" + std::to_string(nsym));
    }
    const GaloisField& f = GaloisField::for_width(q);
    if (static_cast<u32>(nsym) > f.size()) {
        throw FieldOverflow("nsym=" + std::to_string(nsym) + " exceeds GF(2^" +
                            std::to_string(q) + ") evaluation points");
    }
}

namespace {

// Evaluation rows of the interpolant through `points`:
// row(target)[i] = prod_{j != i} (target + points[j]) / (points[i] + points[j])
// with XOR as addition (characteristic 2). The barycentric weights
// w_i = 1 / prod_{j != i}(points[i] + points[j]) are computed once, so each
// row costs O(k) instead of O(k^2); an on-support target yields a unit row.
class LagrangeRows {
  public:
    LagrangeRows(const GaloisField& f, std::vector<FieldElem> points)
        : f_(f), points_(std::move(points)), w_(points_.size(), 1) {
        for (std::size_t i = 0; i < points_.size(); ++i) {
            FieldElem den = 1;
            for (std::size_t j = 0; j < points_.size(); ++j) {
                if (j == i) continue;
                den = f_.mul(den, points_[i] ^ points_[j]);
            }
            w_[i] = f_.inv(den);
        }
    }

    std::vector<FieldElem> row(FieldElem target) const {
        std::size_t k = points_.size();
        std::vector<FieldElem> out(k, 0);
        FieldElem full = 1;
        for (std::size_t j = 0; j < k; ++j) {
            if (points_[j] == target) {
                out[j] = 1;
                return out;
            }
            full = f_.mul(full, target ^ points_[j]);
        }
        for (std::size_t i = 0; i < k; ++i)
            out[i] = f_.mul(full, f_.mul(w_[i], f_.inv(target ^ points_[i])));
        return out;
    }

  private:
    const GaloisField& f_;
    std::vector<FieldElem> points_;
    std::vector<FieldElem> w_;
};

void check_symbol_sizes(const std::vector<Bytes>& syms, int q) {
    if (syms.empty()) throw InvalidParams("no symbols supplied");
    for (const Bytes& s : syms) {
        if (s.size() != syms.front().size()) {
            throw InvalidParams("wide symbols differ in length");
        }
    }
    elems_in(syms.front().size(), q);
}

// out = sum_i coeff[i] * in[i], applied element-wise across the buffers.
Bytes combine(const GaloisField& f, const std::vector<FieldElem>& coeff,
              const std::vector<const Bytes*>& in, int q) {
    std::size_t bytes = in.front()->size();
    std::size_t width = elems_in(bytes, q);
    Bytes out(bytes, 0);
    for (std::size_t i = 0; i < coeff.size(); ++i) {
        if (coeff[i] == 0) continue;
        const Bytes& src = *in[i];
        for (std::size_t e = 0; e < width; ++e) {
            FieldElem v = f.mul(coeff[i], get_elem(src, q, e));
            set_elem(out, q, e, v ^ get_elem(out, q, e));
        }
    }
    return out;
}

}  // namespace

std::vector<Bytes> mds_encode(const MdsCode& code, const std::vector<Bytes>& data) {
    if (static_cast<int>(data.size()) != code.K) {
        throw InvalidParams("encoder expects exactly K data symbols");
    }
    check_symbol_sizes(data, code.q);
    const GaloisField& f = code.field();

    std::vector<FieldElem> points(static_cast<std::size_t>(code.K));
    std::vector<const Bytes*> in(static_cast<std::size_t>(code.K));
    for (int i = 0; i < code.K; ++i) {
        points[static_cast<std::size_t>(i)] = static_cast<FieldElem>(i);
        in[static_cast<std::size_t>(i)] = &data[static_cast<std::size_t>(i)];
    }

    std::vector<Bytes> out(data.begin(), data.end());
    out.reserve(static_cast<std::size_t>(code.nsym));
    LagrangeRows rows(f, points);
    for (int p = code.K; p < code.nsym; ++p) {
        out.push_back(combine(f, rows.row(static_cast<FieldElem>(p)), in, code.q));
    }
    return out;
}

std::vector<Bytes> mds_decode(const MdsCode& code, const std::vector<CodedSymbol>& received) {
    const GaloisField& f = code.field();

    // Keep the first value seen for each coordinate, in ascending order.
    std::map<int, const Bytes*> by_index;
    for (const CodedSymbol& s : received) {
        if (s.index < 0 || s.index >= code.nsym) {
            throw InvalidParams("coded symbol index " + std::to_string(s.index) +
                                " outside 0.." + std::to_string(code.nsym - 1));
        }
        by_index.emplace(s.index, &s.value);
    }
    if (static_cast<int>(by_index.size()) < code.K) {
        throw InsufficientSymbols("decoder needs " + std::to_string(code.K) +
                                  " distinct coordinates, got " +
                                  std::to_string(by_index.size()));
    }

    std::vector<FieldElem> points;
    std::vector<const Bytes*> in;
    std::vector<Bytes> holders;
    points.reserve(static_cast<std::size_t>(code.K));
    in.reserve(static_cast<std::size_t>(code.K));
    for (const auto& [idx, val] : by_index) {
        if (static_cast<int>(points.size()) == code.K) break;
        points.push_back(static_cast<FieldElem>(idx));
        in.push_back(val);
    }
    for (const Bytes* b : in) {
        if (b->size() != in.front()->size()) throw InvalidParams("wide symbols differ in length");
    }
    elems_in(in.front()->size(), code.q);

    std::vector<Bytes> data;
    data.reserve(static_cast<std::size_t>(code.K));
    LagrangeRows rows(f, points);
    for (int t = 0; t < code.K; ++t) {
        data.push_back(combine(f, rows.row(static_cast<FieldElem>(t)), in, code.q));
    }
    return data;
}

int rank_gf(GfMatrix m) {
    const GaloisField& f = GaloisField::for_width(m.q);
    int rank = 0;
    for (int c = 0; c < m.cols && rank < m.rows; ++c) {
        int pivot = -1;
        for (int r = rank; r < m.rows; ++r) {
            if (m.at(r, c) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        for (int c2 = 0; c2 < m.cols; ++c2) std::swap(m.at(pivot, c2), m.at(rank, c2));
        FieldElem piv_inv = f.inv(m.at(rank, c));
        for (int r = rank + 1; r < m.rows; ++r) {
            FieldElem factor = f.mul(m.at(r, c), piv_inv);
            if (factor == 0) continue;
            for (int c2 = c; c2 < m.cols; ++c2) {
                m.at(r, c2) ^= f.mul(factor, m.at(rank, c2));
            }
        }
        ++rank;
    }
    return rank;
}

std::vector<Bytes> gf_solve(GfMatrix A, std::vector<Bytes> b) {
    if (A.rows != A.cols) throw InvalidParams("solver expects a square system");
    if (static_cast<int>(b.size()) != A.rows) {
        throw InvalidParams("right-hand side does not match the system size");
    }
    check_symbol_sizes(b, A.q);
    const GaloisField& f = GaloisField::for_width(A.q);
    std::size_t width = elems_in(b.front().size(), A.q);
    int n = A.rows;

    auto add_scaled = [&](Bytes& dst, const Bytes& src, FieldElem factor) {
        if (factor == 0) return;
        for (std::size_t e = 0; e < width; ++e) {
            FieldElem v = f.mul(factor, get_elem(src, A.q, e));
            set_elem(dst, A.q, e, v ^ get_elem(dst, A.q, e));
        }
    };
    auto scale = [&](Bytes& dst, FieldElem factor) {
        for (std::size_t e = 0; e < width; ++e) {
            set_elem(dst, A.q, e, f.mul(factor, get_elem(dst, A.q, e)));
        }
    };

    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r) {
            if (A.at(r, c) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) throw InvalidParams("singular system");
        if (pivot != c) {
            for (int c2 = 0; c2 < n; ++c2) std::swap(A.at(pivot, c2), A.at(c, c2));
            std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(c)]);
        }
        FieldElem inv = f.inv(A.at(c, c));
        for (int c2 = 0; c2 < n; ++c2) A.at(c, c2) = f.mul(inv, A.at(c, c2));
        scale(b[static_cast<std::size_t>(c)], inv);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            FieldElem factor = A.at(r, c);
            if (factor == 0) continue;
            for (int c2 = 0; c2 < n; ++c2) A.at(r, c2) ^= f.mul(factor, A.at(c, c2));
            add_scaled(b[static_cast<std::size_t>(r)], b[static_cast<std::size_t>(c)], factor);
        }
    }
    return b;
}

HashMatrix HashMatrix::generate(int K, int cols, int q, u64 seed) {
    if (K <= 0 || cols <= 0) throw InvalidParams("hash matrix needs positive dimensions");
    const GaloisField& f = GaloisField::for_width(q);
    HashMatrix h;
    h.K = K;
    h.cols = cols;
    h.q = q;
    h.a.resize(static_cast<std::size_t>(K) * cols);
    Rng rng(seed);
    for (FieldElem& e : h.a) e = static_cast<FieldElem>(rng.below(f.size()));
    return h;
}

std::vector<Bytes> hash_encode(const HashMatrix& H, const std::vector<Bytes>& data) {
    if (static_cast<int>(data.size()) != H.K) {
        throw InvalidParams("hash encoder expects exactly K data symbols");
    }
    check_symbol_sizes(data, H.q);
    const GaloisField& f = GaloisField::for_width(H.q);

    std::vector<const Bytes*> in(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) in[i] = &data[i];

    std::vector<Bytes> out;
    out.reserve(static_cast<std::size_t>(H.cols));
    std::vector<FieldElem> col(static_cast<std::size_t>(H.K));
    for (int c = 0; c < H.cols; ++c) {
        for (int r = 0; r < H.K; ++r) col[static_cast<std::size_t>(r)] = H.at(r, c);
        out.push_back(combine(f, col, in, H.q));
    }
    return out;
}

}  // namespace d2d
