#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "lll/common.hpp"

namespace lll {

// Membership bitmask over dense node ids 0..n-1.
class NodeSubset {
  public:
    NodeSubset() = default;
    explicit NodeSubset(int n) : n_(n), w_((n + 63) / 64, 0) {}

    static NodeSubset full(int n) {
        NodeSubset s(n);
        for (int v = 0; v < n; ++v) s.add(v);
        return s;
    }
    static NodeSubset of(int n, const std::vector<int>& ids) {
        NodeSubset s(n);
        for (int v : ids) s.add(v);
        return s;
    }

    int universe_size() const { return n_; }

    bool contains(int v) const {
        return v >= 0 && v < n_ && (w_[v >> 6] >> (v & 63)) & 1u;
    }
    void add(int v) {
        LLL_CHECK(v >= 0 && v < n_, "NodeSubset::add out of range");
        w_[v >> 6] |= std::uint64_t(1) << (v & 63);
    }
    void remove(int v) {
        LLL_CHECK(v >= 0 && v < n_, "NodeSubset::remove out of range");
        w_[v >> 6] &= ~(std::uint64_t(1) << (v & 63));
    }

    int count() const {
        int c = 0;
        for (auto x : w_) c += std::popcount(x);
        return c;
    }
    bool empty() const {
        for (auto x : w_)
            if (x) return false;
        return true;
    }

    bool intersects(const NodeSubset& o) const {
        auto m = std::min(w_.size(), o.w_.size());
        for (std::size_t i = 0; i < m; ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }
    bool is_subset_of(const NodeSubset& o) const {
        if (n_ > o.n_) {
            for (int v = o.n_; v < n_; ++v)
                if (contains(v)) return false;
        }
        auto m = std::min(w_.size(), o.w_.size());
        for (std::size_t i = 0; i < m; ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    // Ascending id order.
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            std::uint64_t x = w_[i];
            while (x) {
                int b = std::countr_zero(x);
                f(int(i * 64 + b));
                x &= x - 1;
            }
        }
    }
    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(count());
        for_each([&](int v) { out.push_back(v); });
        return out;
    }
    int min_id() const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return int(i * 64 + std::countr_zero(w_[i]));
        return -1;
    }

    bool operator==(const NodeSubset& o) const = default;

  private:
    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace lll
