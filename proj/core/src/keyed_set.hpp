#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace graftlab::detail {

// Set of real 4-vectors identified up to a tolerance. Coordinates are
// snapped to a grid; when a coordinate lies close to a cell boundary the
// neighbouring cell is probed as well, so two nearby copies never land in
// different cells unnoticed.
class KeyedSet {
public:
    explicit KeyedSet(double quantum, std::size_t reserve = 0) : q_(quantum) {
        if (reserve) map_.reserve(reserve);
    }

    // Returns true if v was new (and inserts it).
    bool insert(const std::array<double, 4>& v) {
        std::array<std::int64_t, 4> key{};
        std::array<std::int64_t, 4> alt{};
        int ambiguous = 0;
        std::array<int, 4> which{};
        for (int i = 0; i < 4; ++i) {
            double s = v[i] / q_;
            double f = std::floor(s);
            double frac = s - f;
            key[i] = static_cast<std::int64_t>(frac < 0.5 ? f : f + 1.0);
            alt[i] = key[i];
            if (std::abs(frac - 0.5) < kMargin) {
                alt[i] = frac < 0.5 ? key[i] + 1 : key[i] - 1;
                which[ambiguous++] = i;
            }
        }
        if (map_.count(key)) return false;
        for (int mask = 1; mask < (1 << ambiguous); ++mask) {
            auto probe = key;
            for (int j = 0; j < ambiguous; ++j)
                if (mask & (1 << j)) probe[which[j]] = alt[which[j]];
            if (map_.count(probe)) return false;
        }
        map_.emplace(key, 0);
        return true;
    }

    std::size_t size() const { return map_.size(); }

private:
    static constexpr double kMargin = 0.05;
    struct Hash {
        std::size_t operator()(const std::array<std::int64_t, 4>& k) const {
            std::uint64_t h = 0x9e3779b97f4a7c15ULL;
            for (auto x : k) {
                h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
                h *= 0xbf58476d1ce4e5b9ULL;
            }
            return static_cast<std::size_t>(h ^ (h >> 31));
        }
    };
    double q_;
    std::unordered_map<std::array<std::int64_t, 4>, char, Hash> map_;
};

}  // namespace graftlab::detail
