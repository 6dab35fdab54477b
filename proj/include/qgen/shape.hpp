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

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "qgen/errors.hpp"

namespace qgen {

/// An ordered factorization of a finite-dimensional Hilbert space into named
/// subsystems. The first label is the most significant tensor factor, matching
/// the index convention of a Kronecker product A (x) B.
class SubsystemShape {
public:
    SubsystemShape() = default;

    SubsystemShape(std::vector<std::string> labels, std::vector<int> dims)
        : labels_(std::move(labels)), dims_(std::move(dims)) {
        if (labels_.size() != dims_.size())
            throw ShapeMismatch("subsystem labels and dimensions differ in length");
        for (int d : dims_)
            if (d < 1) throw ShapeMismatch("subsystem dimension must be >= 1");
        for (std::size_t i = 0; i < labels_.size(); ++i)
            for (std::size_t j = i + 1; j < labels_.size(); ++j)
                if (labels_[i] == labels_[j])
                    throw ShapeMismatch("duplicate subsystem label '" + labels_[i] + "'");
    }

    /// Single anonymous subsystem of the given dimension.
    static SubsystemShape single(int dim, const std::string& label = "sys") {
        return SubsystemShape({label}, {dim});
    }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<int>& dims() const { return dims_; }
    std::size_t size() const { return labels_.size(); }

    long long total_dim() const {
        long long t = 1;
        for (int d : dims_) t *= d;
        return t;
    }

    bool has_label(const std::string& label) const {
        return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
    }

    std::size_t index_of(const std::string& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) throw UnknownLabel("no subsystem labelled '" + label + "'");
        return static_cast<std::size_t>(it - labels_.begin());
    }

    int dim_of(const std::string& label) const { return dims_[index_of(label)]; }

    /// Positions of the given labels, in this shape's order.
    std::vector<std::size_t> positions_of(const std::vector<std::string>& subset) const {
        std::vector<std::size_t> pos;
        pos.reserve(subset.size());
        for (const auto& l : subset) pos.push_back(index_of(l));
        std::sort(pos.begin(), pos.end());
        return pos;
    }

    /// Sub-shape containing exactly the subsystems at `positions` (assumed sorted).
    SubsystemShape select(const std::vector<std::size_t>& positions) const {
        std::vector<std::string> l;
        std::vector<int> d;
        for (auto p : positions) {
            l.push_back(labels_[p]);
            d.push_back(dims_[p]);
        }
        return SubsystemShape(std::move(l), std::move(d));
    }

    SubsystemShape complement(const std::vector<std::size_t>& positions) const {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (!std::binary_search(positions.begin(), positions.end(), i)) rest.push_back(i);
        return select(rest);
    }

    static SubsystemShape concat(const SubsystemShape& a, const SubsystemShape& b) {
        std::vector<std::string> l = a.labels_;
        l.insert(l.end(), b.labels_.begin(), b.labels_.end());
        std::vector<int> d = a.dims_;
        d.insert(d.end(), b.dims_.begin(), b.dims_.end());
        return SubsystemShape(std::move(l), std::move(d));
    }

    bool operator==(const SubsystemShape& other) const {
        return labels_ == other.labels_ && dims_ == other.dims_;
    }
    bool operator!=(const SubsystemShape& other) const { return !(*this == other); }

    std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (i) s += ", ";
            s += labels_[i] + ":" + std::to_string(dims_[i]);
        }
        return s + "]";
    }

private:
    std::vector<std::string> labels_;
    std::vector<int> dims_;
};

}  // namespace qgen
