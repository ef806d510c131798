#pragma once

#include <vector>

namespace ncap::detail {

// O(1) insert/erase/uniform-sample set of ids in [0, n). Iteration order is
// deterministic: it depends only on the insert/erase history.
class IndexedSet {
public:
    explicit IndexedSet(long n) : pos_(n, -1) {}

    bool contains(long id) const { return pos_[id] >= 0; }
    long size() const { return static_cast<long>(items_.size()); }
    long at(long i) const { return items_[i]; }

    void insert(long id) {
        if (contains(id)) return;
        pos_[id] = static_cast<long>(items_.size());
        items_.push_back(id);
    }

    void erase(long id) {
        const long p = pos_[id];
        if (p < 0) return;
        const long last = items_.back();
        items_[p] = last;
        pos_[last] = p;
        items_.pop_back();
        pos_[id] = -1;
    }

private:
    std::vector<long> items_;
    std::vector<long> pos_;
};

}  // namespace ncap::detail
