// Copyright 2026 The viewplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VIEWPLAN_BITMATRIX_HPP_
#define VIEWPLAN_BITMATRIX_HPP_

#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "viewplan/common.hpp"

namespace viewplan {

// ---------------------------------------------------------------------------
// Row-major binary matrix backed by 64-bit words.
//
// Used as the visibility matrix: row i = viewpoint i, column j = triangle j.
// Rows can be appended, which is how the planner grows the candidate pool
// incrementally.
//
// Portable text format (one matrix per file):
//   line 1:  "<rows> <cols>"
//   line 2+: one row per line as ceil(cols/4) uppercase hex digits; column
//            4*d+k maps to bit (3-k) of digit d, padding bits are zero.
// ---------------------------------------------------------------------------

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), words_(words_per_row(cols)), data_(rows * words_, 0) {}

    static std::size_t words_per_row(std::size_t cols) { return (cols + 63) / 64; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t row_word_count() const { return words_; }

    bool bit(std::size_t r, std::size_t c) const {
        return (data_[r * words_ + c / 64] >> (c % 64)) & 1u;
    }
    void set_bit(std::size_t r, std::size_t c, bool v = true) {
        auto& w = data_[r * words_ + c / 64];
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        w = v ? (w | mask) : (w & ~mask);
    }

    std::span<const std::uint64_t> row(std::size_t r) const {
        return {data_.data() + r * words_, words_};
    }
    std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * words_, words_}; }

    std::size_t row_popcount(std::size_t r) const {
        std::size_t n = 0;
        for (std::uint64_t w : row(r)) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    /// Appends `count` zeroed rows and returns the index of the first one.
    std::size_t append_rows(std::size_t count) {
        const std::size_t first = rows_;
        rows_ += count;
        data_.resize(rows_ * words_, 0);
        return first;
    }

    /// OR-accumulates row r into acc (acc must hold row_word_count() words).
    void or_row_into(std::size_t r, std::span<std::uint64_t> acc) const {
        const auto src = row(r);
        for (std::size_t w = 0; w < words_; ++w) acc[w] |= src[w];
    }

    bool operator==(const BitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write '" + path + "'");
        out << rows_ << " " << cols_ << "\n";
        const std::size_t digits = (cols_ + 3) / 4;
        std::string line(digits, '0');
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t d = 0; d < digits; ++d) {
                int nibble = 0;
                for (int k = 0; k < 4; ++k) {
                    const std::size_t c = 4 * d + k;
                    if (c < cols_ && bit(r, c)) nibble |= 1 << (3 - k);
                }
                line[d] = "0123456789ABCDEF"[nibble];
            }
            out << line << "\n";
        }
        if (!out) throw IoError("write failed for '" + path + "'");
    }

    static BitMatrix read(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read '" + path + "'");
        std::size_t rows = 0, cols = 0;
        if (!(in >> rows >> cols)) throw ParseError("bit matrix '" + path + "': bad header");
        BitMatrix m(rows, cols);
        const std::size_t digits = (cols + 3) / 4;
        std::string line;
        for (std::size_t r = 0; r < rows; ++r) {
            if (!(in >> line) || line.size() != digits)
                throw ParseError("bit matrix '" + path + "': bad row " + std::to_string(r));
            for (std::size_t d = 0; d < digits; ++d) {
                const char ch = line[d];
                int nibble;
                if (ch >= '0' && ch <= '9') nibble = ch - '0';
                else if (ch >= 'A' && ch <= 'F') nibble = ch - 'A' + 10;
                else if (ch >= 'a' && ch <= 'f') nibble = ch - 'a' + 10;
                else throw ParseError("bit matrix '" + path + "': bad hex digit");
                for (int k = 0; k < 4; ++k) {
                    const std::size_t c = 4 * d + k;
                    const bool v = (nibble >> (3 - k)) & 1;
                    if (c < cols) {
                        if (v) m.set_bit(r, c);
                    } else if (v) {
                        throw ParseError("bit matrix '" + path + "': nonzero padding bit");
                    }
                }
            }
        }
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0, words_ = 0;
    std::vector<std::uint64_t> data_;
};

}  // namespace viewplan

#endif  // VIEWPLAN_BITMATRIX_HPP_
