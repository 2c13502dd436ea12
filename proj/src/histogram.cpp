#include "betamix/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace betamix {

Axis Axis::continuous(double origin, double width, std::size_t bin_count) {
    if (!std::isfinite(origin) || !(width > 0.0) || !std::isfinite(width)) {
        throw std::invalid_argument("Axis: width must be positive and finite");
    }
    if (bin_count < 1) throw std::invalid_argument("Axis: bin_count must be at least 1");
    return Axis{Kind::Continuous, origin, width, bin_count, 0};
}

Axis Axis::spanning(double lo, double hi, std::size_t bin_count) {
    if (bin_count < 1) throw std::invalid_argument("Axis: bin_count must be at least 1");
    if (!(hi >= lo)) throw std::invalid_argument("Axis: empty range");
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bin_count) : 1.0;
    return continuous(lo, width, bin_count);
}

Axis Axis::discrete(std::size_t alphabet, bool collapsed) {
    if (alphabet < 1) throw std::invalid_argument("Axis: alphabet must be non-empty");
    return Axis{Kind::Discrete, 0.0, 1.0, collapsed ? std::size_t{1} : alphabet, alphabet};
}

std::optional<std::size_t> Axis::bin_of(double x) const noexcept {
    if (std::isnan(x)) return std::nullopt;
    if (kind == Kind::Discrete) {
        if (x < 0.0 || x >= static_cast<double>(alphabet) || x != std::floor(x)) return std::nullopt;
        return bin_count == 1 ? 0 : static_cast<std::size_t>(x);
    }
    if (x < origin) return std::nullopt;
    const double t = std::floor((x - origin) / width);
    if (t < static_cast<double>(bin_count)) return static_cast<std::size_t>(t);
    // Last bin is closed; allow rounding in origin + width*count.
    const double top = upper();
    if (x <= top + 1e-12 * std::max(1.0, std::abs(top))) return bin_count - 1;
    return std::nullopt;
}

BinGrid::BinGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw std::invalid_argument("BinGrid: need at least one axis");
    for (const Axis& a : axes_) {
        if (cells_ > std::numeric_limits<std::uint64_t>::max() / a.bin_count) {
            throw std::length_error("BinGrid: cell count exceeds 64-bit index space");
        }
        cells_ *= a.bin_count;
    }
}

BinGrid BinGrid::repeated(const Axis& axis, std::size_t dims) {
    return BinGrid(std::vector<Axis>(dims, axis));
}

double BinGrid::cell_volume() const noexcept {
    double v = 1.0;
    for (const Axis& a : axes_) v *= a.width;
    return v;
}

std::uint64_t BinGrid::pack(std::span<const std::size_t> index) const {
    if (index.size() != axes_.size()) throw std::invalid_argument("BinGrid::pack: wrong index length");
    std::uint64_t key = 0;
    std::uint64_t stride = 1;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (index[i] >= axes_[i].bin_count) throw std::out_of_range("BinGrid::pack: index out of range");
        key += index[i] * stride;
        stride *= axes_[i].bin_count;
    }
    return key;
}

std::vector<std::size_t> BinGrid::unpack(std::uint64_t key) const {
    if (key >= cells_) throw std::out_of_range("BinGrid::unpack: key out of range");
    std::vector<std::size_t> index(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        index[i] = static_cast<std::size_t>(key % axes_[i].bin_count);
        key /= axes_[i].bin_count;
    }
    return index;
}

SparseHistogram SparseHistogram::from_masses(BinGrid grid, std::vector<Entry> masses) {
    std::sort(masses.begin(), masses.end());
    std::vector<Entry> kept;
    kept.reserve(masses.size());
    double total = 0.0;
    for (const auto& [key, m] : masses) {
        if (key >= grid.cell_count()) throw std::out_of_range("SparseHistogram: key outside grid");
        if (!(m >= 0.0)) throw std::invalid_argument("SparseHistogram: negative or NaN mass");
        if (!kept.empty() && kept.back().first == key) {
            throw std::invalid_argument("SparseHistogram: duplicate key " + std::to_string(key));
        }
        if (m == 0.0) continue;
        kept.emplace_back(key, m);
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("SparseHistogram: masses sum to " + std::to_string(total) + ", not 1");
    }
    return SparseHistogram(std::move(grid), std::move(kept), 0);
}

double SparseHistogram::mass(std::uint64_t key) const noexcept {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                                     [](const Entry& e, std::uint64_t k) { return e.first < k; });
    return (it != entries_.end() && it->first == key) ? it->second : 0.0;
}

double SparseHistogram::total_mass() const noexcept {
    double s = 0.0;
    for (const auto& e : entries_) s += e.second;
    return s;
}

SparseHistogram build_histogram(const PointSet& points, const BinGrid& grid) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("build_histogram: no points");
    if (points.dims != grid.dims()) throw std::invalid_argument("build_histogram: point dimension does not match grid");

    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = points.row(i);
        std::uint64_t key = 0;
        std::uint64_t stride = 1;
        for (std::size_t k = 0; k < grid.dims(); ++k) {
            const Axis& axis = grid.axes()[k];
            const auto b = axis.bin_of(row[k]);
            if (!b) {
                throw std::out_of_range("build_histogram: point " + std::to_string(i) + " lies outside the grid on axis " +
                                        std::to_string(k));
            }
            key += *b * stride;
            stride *= axis.bin_count;
        }
        keys[i] = key;
    }
    std::sort(keys.begin(), keys.end());

    std::vector<SparseHistogram::Entry> entries;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && keys[j] == keys[i]) ++j;
        entries.emplace_back(keys[i], static_cast<double>(j - i) / static_cast<double>(n));
        i = j;
    }
    return SparseHistogram(grid, std::move(entries), n);
}

double l1_distance(const SparseHistogram& p, const SparseHistogram& q) {
    if (!(p.grid() == q.grid())) throw std::invalid_argument("l1_distance: histograms live on different grids");
    const auto a = p.entries();
    const auto b = q.entries();
    double sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            sum += a[i++].second;
        } else if (i == a.size() || b[j].first < a[i].first) {
            sum += b[j++].second;
        } else {
            sum += std::abs(a[i++].second - b[j++].second);
        }
    }
    return sum;
}

double independence_l1(const SparseHistogram& joint, const SparseHistogram& marginal) {
    const std::size_t d = marginal.grid().dims();
    if (joint.grid().dims() != 2 * d) {
        throw std::invalid_argument("independence_l1: joint must have twice the marginal's axes");
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (!(joint.grid().axis(k) == marginal.grid().axis(k)) ||
            !(joint.grid().axis(d + k) == marginal.grid().axis(k))) {
            throw std::invalid_argument("independence_l1: axis " + std::to_string(k) + " differs between joint and marginal");
        }
    }
    const std::uint64_t block = marginal.grid().cell_count();
    double sum = 0.0;
    for (const auto& [key, j] : joint.entries()) {
        const double product = marginal.mass(key % block) * marginal.mass(key / block);
        sum += std::abs(j - product) - product;
    }
    const double total = marginal.total_mass();
    return std::clamp(sum + total * total, 0.0, 2.0);
}

}  // namespace betamix
