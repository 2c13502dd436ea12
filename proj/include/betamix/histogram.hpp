#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace betamix {

/// One coordinate of a product grid.
///
/// Continuous axes split [origin, origin + width*bin_count] into half-open
/// bins [e, e + width) with the last bin closed. Discrete axes map symbol s
/// of an alphabet to bin s, or every symbol to bin 0 when collapsed to a
/// single bin.
struct Axis {
    enum class Kind { Continuous, Discrete };

    Kind kind = Kind::Continuous;
    double origin = 0.0;
    double width = 1.0;
    std::size_t bin_count = 1;
    std::size_t alphabet = 0;

    static Axis continuous(double origin, double width, std::size_t bin_count);
    /// Bins anchored at lo spanning to hi. A degenerate range (lo == hi)
    /// gets unit width so every point lands in bin 0.
    static Axis spanning(double lo, double hi, std::size_t bin_count);
    static Axis discrete(std::size_t alphabet, bool collapsed = false);

    [[nodiscard]] std::optional<std::size_t> bin_of(double x) const noexcept;
    [[nodiscard]] double upper() const noexcept { return origin + width * static_cast<double>(bin_count); }

    bool operator==(const Axis&) const = default;
};

/// Product of axes; multi-indices are packed mixed-radix with axis 0 as the
/// least significant digit.
class BinGrid {
public:
    /// Throws std::length_error when the cell count overflows 64 bits.
    explicit BinGrid(std::vector<Axis> axes);
    static BinGrid repeated(const Axis& axis, std::size_t dims);

    [[nodiscard]] std::size_t dims() const noexcept { return axes_.size(); }
    [[nodiscard]] const std::vector<Axis>& axes() const noexcept { return axes_; }
    [[nodiscard]] const Axis& axis(std::size_t i) const { return axes_.at(i); }
    [[nodiscard]] std::uint64_t cell_count() const noexcept { return cells_; }
    /// Volume of one cell (product of widths; 1 for discrete axes).
    [[nodiscard]] double cell_volume() const noexcept;

    [[nodiscard]] std::uint64_t pack(std::span<const std::size_t> index) const;
    [[nodiscard]] std::vector<std::size_t> unpack(std::uint64_t key) const;

    bool operator==(const BinGrid& other) const { return axes_ == other.axes_; }

private:
    std::vector<Axis> axes_;
    std::uint64_t cells_ = 1;
};

/// n points of dimension `dims`, stored row-major.
struct PointSet {
    std::size_t dims = 0;
    std::vector<double> coords;

    [[nodiscard]] std::size_t size() const noexcept { return dims == 0 ? 0 : coords.size() / dims; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span<const double>(coords).subspan(i * dims, dims);
    }
};

/// Histogram on a BinGrid holding only occupied cells, sorted by packed key.
class SparseHistogram {
public:
    using Entry = std::pair<std::uint64_t, double>;

    /// Histogram from explicit cell probabilities, e.g. an exact law.
    /// Zero masses are dropped; the rest must be positive and sum to 1.
    static SparseHistogram from_masses(BinGrid grid, std::vector<Entry> masses);

    [[nodiscard]] const BinGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t sample_count() const noexcept { return sample_count_; }
    [[nodiscard]] double mass(std::uint64_t key) const noexcept;
    [[nodiscard]] double density(std::uint64_t key) const noexcept { return mass(key) / grid_.cell_volume(); }
    [[nodiscard]] double total_mass() const noexcept;

private:
    friend SparseHistogram build_histogram(const PointSet&, const BinGrid&);
    SparseHistogram(BinGrid grid, std::vector<Entry> entries, std::size_t samples)
        : grid_(std::move(grid)), entries_(std::move(entries)), sample_count_(samples) {}

    BinGrid grid_;
    std::vector<Entry> entries_;
    std::size_t sample_count_ = 0;
};

/// mass(b) = (#points in b) / (#points). Throws std::invalid_argument on empty
/// input or a dimension mismatch and std::out_of_range for a point outside
/// the grid (the message carries the point's index).
[[nodiscard]] SparseHistogram build_histogram(const PointSet& points, const BinGrid& grid);

/// Sum over the union of supports of |p(b) - q(b)|; equals the L1 distance of
/// the piecewise-constant densities. Grids must match.
[[nodiscard]] double l1_distance(const SparseHistogram& p, const SparseHistogram& q);

/// Sum over all (b1, b2) of |J(b1,b2) - M(b1) M(b2)| where J lives on the 2d
/// axes (M's axes twice). Evaluated over J's support only:
///   sum_{J>0} (|J - M M| - M M) + (sum M)^2.
[[nodiscard]] double independence_l1(const SparseHistogram& joint, const SparseHistogram& marginal);

}  // namespace betamix
