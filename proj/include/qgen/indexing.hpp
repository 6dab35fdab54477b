// Copyright 2026 The qgenbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "qgen/shape.hpp"

namespace qgen {

/// Mixed-radix index arithmetic for a subsystem split. Subsystem 0 is the
/// most significant digit, matching Kronecker-product ordering.
class IndexSplit {
public:
    /// `positions` must be sorted positions into `shape`.
    IndexSplit(const SubsystemShape& shape, const std::vector<std::size_t>& positions) {
        const auto& dims = shape.dims();
        std::vector<long long> strides(dims.size(), 1);
        for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
            strides[i] = strides[i + 1] * dims[i + 1];

        std::vector<std::size_t> comp;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (!std::binary_search(positions.begin(), positions.end(), i)) comp.push_back(i);

        sub_dim_ = 1;
        for (auto p : positions) sub_dim_ *= dims[p];
        comp_dim_ = 1;
        for (auto p : comp) comp_dim_ *= dims[p];

        sub_contrib_ = contributions(dims, strides, positions);
        comp_contrib_ = contributions(dims, strides, comp);
    }

    long long sub_dim() const { return sub_dim_; }
    long long comp_dim() const { return comp_dim_; }

    /// Global index of (subset multi-index a, complement multi-index c).
    long long global(long long a, long long c) const {
        return sub_contrib_[static_cast<std::size_t>(a)] +
               comp_contrib_[static_cast<std::size_t>(c)];
    }

private:
    static std::vector<long long> contributions(const std::vector<int>& dims,
                                                const std::vector<long long>& strides,
                                                const std::vector<std::size_t>& group) {
        long long n = 1;
        for (auto p : group) n *= dims[p];
        std::vector<long long> out(static_cast<std::size_t>(n), 0);
        for (long long idx = 0; idx < n; ++idx) {
            long long rest = idx;
            long long g = 0;
            for (int k = static_cast<int>(group.size()) - 1; k >= 0; --k) {
                const int d = dims[group[static_cast<std::size_t>(k)]];
                g += (rest % d) * strides[group[static_cast<std::size_t>(k)]];
                rest /= d;
            }
            out[static_cast<std::size_t>(idx)] = g;
        }
        return out;
    }

    long long sub_dim_ = 1;
    long long comp_dim_ = 1;
    std::vector<long long> sub_contrib_;
    std::vector<long long> comp_contrib_;
};

/// Index remap realizing a reordering of subsystems: entry i of the result is
/// the old global index of the new global index i.
inline std::vector<long long> reorder_index_map(const SubsystemShape& shape,
                                                const std::vector<std::string>& new_order) {
    if (new_order.size() != shape.size())
        throw ShapeMismatch("subsystem reorder must mention every label exactly once");
    const auto& dims = shape.dims();
    std::vector<long long> old_strides(dims.size(), 1);
    for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
        old_strides[i] = old_strides[i + 1] * dims[i + 1];

    std::vector<std::size_t> old_pos;  // old position of each new digit
    std::vector<int> new_dims;
    for (const auto& l : new_order) {
        old_pos.push_back(shape.index_of(l));
        new_dims.push_back(shape.dims()[old_pos.back()]);
    }

    const long long total = shape.total_dim();
    std::vector<long long> map(static_cast<std::size_t>(total), 0);
    for (long long idx = 0; idx < total; ++idx) {
        long long rest = idx;
        long long g = 0;
        for (int k = static_cast<int>(new_dims.size()) - 1; k >= 0; --k) {
            const int d = new_dims[static_cast<std::size_t>(k)];
            g += (rest % d) * old_strides[old_pos[static_cast<std::size_t>(k)]];
            rest /= d;
        }
        map[static_cast<std::size_t>(idx)] = g;
    }
    return map;
}

}  // namespace qgen
