#include "caf/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "caf/demap.hpp"
#include "caf/kernels.hpp"

namespace caf {

void CodeSpec::validate() const {
    if (d_v < 2) throw std::invalid_argument("CodeSpec: d_v must be >= 2");
    if (d_c <= d_v) throw std::invalid_argument("CodeSpec: d_c must exceed d_v");
    if (n_bits < d_c) throw std::invalid_argument("CodeSpec: n_bits too small");
    if ((static_cast<long long>(n_bits) * d_v) % d_c != 0)
        throw std::invalid_argument("CodeSpec: n_bits * d_v must be divisible by d_c");
    if (design_rate() <= 0.0) throw std::invalid_argument("CodeSpec: nonpositive rate");
}

ParityCheckMatrix sample_regular_code(const CodeSpec& spec, Rng& rng) {
    spec.validate();
    const int n = spec.n_bits;
    const int m = n * spec.d_v / spec.d_c;
    const std::size_t ne = static_cast<std::size_t>(n) * spec.d_v;

    std::vector<int> sockets(ne);
    for (std::size_t i = 0; i < ne; ++i) sockets[i] = static_cast<int>(i) / spec.d_v;

    std::shuffle(sockets.begin(), sockets.end(), rng);
    std::uniform_int_distribution<std::size_t> pos(0, ne - 1);

    // resolve multi-edges: swap a duplicate's socket with a random one until
    // every check sees distinct variables
    auto find_duplicates = [&](std::vector<std::size_t>& dup) {
        dup.clear();
        std::vector<int> seen(static_cast<std::size_t>(n), -1);
        for (int c = 0; c < m; ++c) {
            const std::size_t base = static_cast<std::size_t>(c) * spec.d_c;
            for (int j = 0; j < spec.d_c; ++j) {
                int v = sockets[base + j];
                if (seen[v] == c)
                    dup.push_back(base + j);
                else
                    seen[v] = c;
            }
        }
    };

    std::vector<std::size_t> dup;
    for (int pass = 0;; ++pass) {
        find_duplicates(dup);
        if (dup.empty()) break;
        if (pass > 10000) {  // pathological; restart from a fresh permutation
            std::shuffle(sockets.begin(), sockets.end(), rng);
            pass = 0;
            continue;
        }
        for (std::size_t p : dup) std::swap(sockets[p], sockets[pos(rng)]);
    }

    ParityCheckMatrix h;
    h.n = n;
    h.m = m;
    h.var_to_checks.resize(static_cast<std::size_t>(n));
    h.check_to_vars.resize(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * spec.d_c;
        for (int j = 0; j < spec.d_c; ++j) {
            int v = sockets[base + j];
            h.check_to_vars[c].push_back(v);
            h.var_to_checks[v].push_back(c);
        }
        std::sort(h.check_to_vars[c].begin(), h.check_to_vars[c].end());
    }
    for (auto& lst : h.var_to_checks) std::sort(lst.begin(), lst.end());
    return h;
}

std::vector<std::uint8_t> syndrome(const ParityCheckMatrix& h, std::span<const std::uint8_t> word) {
    if (static_cast<int>(word.size()) != h.n)
        throw std::invalid_argument("syndrome: word length mismatch");
    std::vector<std::uint8_t> s(static_cast<std::size_t>(h.m), 0);
    for (int c = 0; c < h.m; ++c) {
        std::uint8_t acc = 0;
        for (int v : h.check_to_vars[c]) acc ^= word[v];
        s[c] = acc;
    }
    return s;
}

// --- Encoder ------------------------------------------------------------

Encoder::Encoder(const ParityCheckMatrix& h) : n_(h.n) {
    const std::size_t words = (static_cast<std::size_t>(n_) + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(static_cast<std::size_t>(h.m),
                                                 std::vector<std::uint64_t>(words, 0));
    for (int c = 0; c < h.m; ++c)
        for (int v : h.check_to_vars[c]) rows[c][v / 64] ^= 1ULL << (v % 64);

    // forward elimination to row echelon form
    std::vector<bool> is_pivot(static_cast<std::size_t>(n_), false);
    std::size_t next_row = 0;
    for (int col = 0; col < n_ && next_row < rows.size(); ++col) {
        std::size_t pivot = next_row;
        while (pivot < rows.size() && !((rows[pivot][col / 64] >> (col % 64)) & 1)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[next_row], rows[pivot]);
        for (std::size_t r = next_row + 1; r < rows.size(); ++r)
            if ((rows[r][col / 64] >> (col % 64)) & 1)
                for (std::size_t w = 0; w < words; ++w) rows[r][w] ^= rows[next_row][w];
        pivot_cols_.push_back(col);
        is_pivot[col] = true;
        rows_.push_back(rows[next_row]);
        ++next_row;
    }
    for (int col = 0; col < n_; ++col)
        if (!is_pivot[col]) free_cols_.push_back(col);
}

std::vector<std::uint8_t> Encoder::encode(std::span<const std::uint8_t> message) const {
    if (message.size() != free_cols_.size())
        throw std::invalid_argument("encode: message length mismatch");
    std::vector<std::uint8_t> x(static_cast<std::size_t>(n_), 0);
    for (std::size_t i = 0; i < free_cols_.size(); ++i) x[free_cols_[i]] = message[i] & 1;
    // back-substitution: rows in reverse echelon order
    for (std::size_t r = rows_.size(); r-- > 0;) {
        const int p = pivot_cols_[r];
        std::uint8_t acc = 0;
        const auto& row = rows_[r];
        for (int col = p + 1; col < n_; ++col)
            if ((row[col / 64] >> (col % 64)) & 1) acc ^= x[col];
        x[p] = acc;
    }
    return x;
}

// --- BpDecoder ----------------------------------------------------------

BpDecoder::BpDecoder(const ParityCheckMatrix& h, int max_iters) : h_(h), max_iters_(max_iters) {
    check_offset_.push_back(0);
    for (int c = 0; c < h.m; ++c) {
        for (int v : h.check_to_vars[c]) edge_var_.push_back(v);
        check_offset_.push_back(static_cast<int>(edge_var_.size()));
    }
    var_edges_.resize(static_cast<std::size_t>(h.n));
    for (std::size_t e = 0; e < edge_var_.size(); ++e) var_edges_[edge_var_[e]].push_back(static_cast<int>(e));
    const std::size_t ne = edge_var_.size();
    v2c_.resize(ne);
    c2v_.resize(ne);
    tanh_buf_.resize(ne);
    prod_buf_.resize(ne);
    total_.resize(static_cast<std::size_t>(h.n));
}

DecodeResult BpDecoder::decode(std::span<const double> channel_llrs) {
    if (static_cast<int>(channel_llrs.size()) != h_.n)
        throw std::invalid_argument("bp_decode: LLR vector length mismatch");
    const auto& ops = kernels::active();
    const std::size_t ne = edge_var_.size();

    for (std::size_t e = 0; e < ne; ++e) v2c_[e] = channel_llrs[edge_var_[e]];
    ops.clamp(v2c_.data(), ne, kLlrClamp);

    DecodeResult res;
    res.bits.resize(static_cast<std::size_t>(h_.n));

    auto hard_decide_and_check = [&]() {
        bool ok = true;
        for (int v = 0; v < h_.n; ++v) res.bits[v] = total_[v] > 0.0 ? 1 : 0;
        for (int c = 0; c < h_.m && ok; ++c) {
            std::uint8_t acc = 0;
            for (int e = check_offset_[c]; e < check_offset_[c + 1]; ++e) acc ^= res.bits[edge_var_[e]];
            ok = acc == 0;
        }
        return ok;
    };

    for (int it = 1; it <= max_iters_; ++it) {
        // check update: extrinsic tanh products via prefix/suffix scans
        ops.tanh_half(v2c_.data(), tanh_buf_.data(), ne);
        for (int c = 0; c < h_.m; ++c) {
            const int lo = check_offset_[c], hi = check_offset_[c + 1];
            // In the "positive favors bit 1" convention the tanh-product rule
            // over n extrinsic inputs carries a (-1)^(n+1) factor; n = w - 1
            // with row weight w, so the sign is (-1)^w.
            const double sgn = ((hi - lo) % 2 == 0) ? 1.0 : -1.0;
            double pre = sgn;
            for (int e = lo; e < hi; ++e) {
                prod_buf_[e] = pre;
                pre *= tanh_buf_[e];
            }
            double suf = 1.0;
            for (int e = hi - 1; e >= lo; --e) {
                prod_buf_[e] *= suf;
                suf *= tanh_buf_[e];
            }
        }
        ops.atanh2(prod_buf_.data(), c2v_.data(), ne, kLlrClamp);

        // variable update
        for (int v = 0; v < h_.n; ++v) {
            double t = channel_llrs[v];
            for (int e : var_edges_[v]) t += c2v_[e];
            total_[v] = t;
        }
        for (std::size_t e = 0; e < ne; ++e) v2c_[e] = total_[edge_var_[e]] - c2v_[e];
        ops.clamp(v2c_.data(), ne, kLlrClamp);

        res.iterations = it;
        if (hard_decide_and_check()) {
            res.converged = true;
            return res;
        }
    }
    res.converged = false;
    return res;
}

// --- alist I/O ----------------------------------------------------------

void write_alist(std::ostream& os, const ParityCheckMatrix& h) {
    int max_col = 0, max_row = 0;
    for (const auto& l : h.var_to_checks) max_col = std::max(max_col, static_cast<int>(l.size()));
    for (const auto& l : h.check_to_vars) max_row = std::max(max_row, static_cast<int>(l.size()));
    os << h.n << ' ' << h.m << '\n' << max_col << ' ' << max_row << '\n';
    for (int v = 0; v < h.n; ++v) os << h.var_to_checks[v].size() << (v + 1 < h.n ? ' ' : '\n');
    for (int c = 0; c < h.m; ++c) os << h.check_to_vars[c].size() << (c + 1 < h.m ? ' ' : '\n');
    for (int v = 0; v < h.n; ++v) {
        for (int j = 0; j < max_col; ++j) {
            int idx = j < static_cast<int>(h.var_to_checks[v].size()) ? h.var_to_checks[v][j] + 1 : 0;
            os << idx << (j + 1 < max_col ? ' ' : '\n');
        }
    }
    for (int c = 0; c < h.m; ++c) {
        for (int j = 0; j < max_row; ++j) {
            int idx = j < static_cast<int>(h.check_to_vars[c].size()) ? h.check_to_vars[c][j] + 1 : 0;
            os << idx << (j + 1 < max_row ? ' ' : '\n');
        }
    }
}

ParityCheckMatrix read_alist(std::istream& is) {
    ParityCheckMatrix h;
    int max_col = 0, max_row = 0;
    if (!(is >> h.n >> h.m >> max_col >> max_row)) throw std::runtime_error("alist: bad header");
    std::vector<int> col_w(static_cast<std::size_t>(h.n)), row_w(static_cast<std::size_t>(h.m));
    for (auto& w : col_w) is >> w;
    for (auto& w : row_w) is >> w;
    h.var_to_checks.resize(static_cast<std::size_t>(h.n));
    h.check_to_vars.resize(static_cast<std::size_t>(h.m));
    for (int v = 0; v < h.n; ++v) {
        for (int j = 0; j < max_col; ++j) {
            int idx;
            if (!(is >> idx)) throw std::runtime_error("alist: truncated column list");
            if (idx > 0) h.var_to_checks[v].push_back(idx - 1);
        }
        if (static_cast<int>(h.var_to_checks[v].size()) != col_w[v])
            throw std::runtime_error("alist: column weight mismatch");
    }
    for (int c = 0; c < h.m; ++c) {
        for (int j = 0; j < max_row; ++j) {
            int idx;
            if (!(is >> idx)) throw std::runtime_error("alist: truncated row list");
            if (idx > 0) h.check_to_vars[c].push_back(idx - 1);
        }
        if (static_cast<int>(h.check_to_vars[c].size()) != row_w[c])
            throw std::runtime_error("alist: row weight mismatch");
    }
    return h;
}

}  // namespace caf
