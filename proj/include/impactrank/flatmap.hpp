#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace impactrank {

/// Ordered map over a sorted vector. Citation histories and percentile
/// series hold a few dozen entries each but exist in the hundreds of
/// thousands, where per-node trees cost several times the payload. Inserts
/// shift the tail, so this is for small, mostly-append key sets.
template <typename K, typename V>
class FlatMap {
public:
    using value_type = std::pair<K, V>;
    using const_iterator = typename std::vector<value_type>::const_iterator;
    using const_reverse_iterator = typename std::vector<value_type>::const_reverse_iterator;

    FlatMap() = default;
    FlatMap(std::initializer_list<value_type> init) {
        for (const auto& [k, v] : init) (*this)[k] = v;
    }

    V& operator[](const K& key) {
        auto it = lower_bound_mut(key);
        if (it == data_.end() || it->first != key) it = data_.insert(it, {key, V{}});
        return it->second;
    }

    const V& at(const K& key) const {
        auto it = find(key);
        if (it == end()) throw std::out_of_range("FlatMap::at: missing key");
        return it->second;
    }

    const_iterator find(const K& key) const {
        auto it = lower_bound(key);
        return (it != end() && it->first == key) ? it : end();
    }

    const_iterator lower_bound(const K& key) const {
        return std::lower_bound(data_.begin(), data_.end(), key,
                                [](const value_type& a, const K& b) { return a.first < b; });
    }

    const_iterator upper_bound(const K& key) const {
        return std::upper_bound(data_.begin(), data_.end(), key,
                                [](const K& a, const value_type& b) { return a < b.first; });
    }

    std::size_t count(const K& key) const { return find(key) == end() ? 0 : 1; }

    const_iterator begin() const { return data_.begin(); }
    const_iterator end() const { return data_.end(); }
    const_reverse_iterator rbegin() const { return data_.rbegin(); }
    const_reverse_iterator rend() const { return data_.rend(); }

    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    void clear() { data_.clear(); }
    void reserve(std::size_t n) { data_.reserve(n); }

    bool operator==(const FlatMap&) const = default;

private:
    typename std::vector<value_type>::iterator lower_bound_mut(const K& key) {
        return std::lower_bound(data_.begin(), data_.end(), key,
                                [](const value_type& a, const K& b) { return a.first < b; });
    }

    std::vector<value_type> data_;
};

}  // namespace impactrank
