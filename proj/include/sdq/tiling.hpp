#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "sdq/core.hpp"
#include "sdq/errors.hpp"
#include "sdq/simulate.hpp"

namespace sdq::tiling {

struct TileOptions {
    long long burn_in = 1000;
    double eps_cover = 0.02;
};

struct MultiplicityReport {
    std::map<int, std::uint64_t> histogram;  // multiplicity -> number of cells
    std::uint64_t visited_cells = 0;
    std::uint64_t total_cells = 0;
    double covered_fraction = 0.0;
    double mult1_fraction = 0.0;   // among visited cells
    bool certified = false;
};

// Midpoint function lambda(v') of the unit-interval sections of a
// v_m-connected tile, together with the Fourier coefficients of the
// first-variable average of the projection G_Gamma.
struct MidpointFunction {
    int order = 0;
    int grid = 0;
    std::vector<double> lambda;   // G^{m-1} samples (single entry for m = 1)
    std::vector<double> gbar;     // G samples of the first-variable average
    std::vector<std::complex<double>> fourier;  // coefficients 0..n_fourier
    double min_section_span = 0.0;
    double max_section_span = 0.0;

    // Nearest-sample lambda lookup for a point v' on the (m-1)-torus.
    double lambda_at(std::span<const double> vprime) const;
    // Periodic linear interpolation, m = 2 only.
    double lambda_interp(double v1) const;
};

// G_Gamma(v) = <v_m - lambda(v')>_0 + lambda(v'); differs from v_m by an
// exact integer.
double g_gamma(const MidpointFunction& mp, std::span<const double> v);

// Occupancy grid over the m-torus recording, per cell, the set of integer
// lattice offsets at which trajectory states were observed. Ingestion is an
// associative reduction, so partial tiles over trajectory chunks can be
// merged in any order.
class TorusTile {
  public:
    TorusTile(int order, int grid);

    void ingest(const double* u);
    void ingest(std::span<const double> u) { ingest(u.data()); }
    void merge(const TorusTile& other);

    int order() const { return m_; }
    int grid() const { return grid_; }
    std::uint64_t samples() const { return samples_; }
    double eps_cover() const { return eps_cover_; }
    void set_eps_cover(double eps) { eps_cover_ = eps; dirty_ = true; }

    MultiplicityReport multiplicity_report() const;

    // True iff every last-coordinate section of the occupied set fits in an
    // interval of length <= 1 - 1/G + tol with contiguous integer offsets.
    // m = 1 returns true by convention. Throws MultiplicityError when the
    // tile is not certified single.
    bool vm_connected(double tol = -1.0) const;

    // Throws ConnectivityError / MultiplicityError when preconditions fail.
    MidpointFunction extract_midpoint(int n_fourier = -1) const;

    // <v>_Gamma for a torus point: resolves the integer offset of each
    // coordinate through the recorded section extents (cells as fallback).
    StateVector project(std::span<const double> torus_point) const;

    // Fraction of occupied (cell, offset) representatives whose image under
    // the modulator map lands on an occupied (cell, offset).
    double invariance_fraction(const Modulator& mod) const;

    void export_csv(std::ostream& out) const;
    void export_pgm(std::ostream& out) const;  // order 2 only

  private:
    friend TorusTile build_tile(const Trajectory&, int, const TileOptions&);

    struct ColumnStat {
        double lo = 0.0, hi = 0.0;
        std::uint64_t count = 0;
        std::vector<int> k_set;  // sorted distinct last-coordinate offsets
    };
    struct RowStat {
        double lo = 0.0, hi = 0.0;
        std::uint64_t count = 0;
    };
    using OffsetEntry = std::pair<std::int64_t, std::uint64_t>;

    size_t cell_index(const double* t) const;
    size_t column_index(const double* t) const;
    const ColumnStat* nearest_column(size_t col) const;
    bool certified() const;
    int cell_multiplicity(size_t idx) const;
    // All (offset, count) entries of a cell; empty when unvisited.
    std::vector<OffsetEntry> cell_entries(size_t idx) const;

    int m_;
    int grid_;
    double eps_cover_ = 0.02;
    std::uint64_t samples_ = 0;
    // Two-tier cell store: the first offset of each cell lives inline;
    // multi-offset cells spill into a side map keyed by cell index.
    std::vector<std::int64_t> cell_key_;        // kEmptyCell when unvisited
    std::vector<std::uint64_t> cell_count_;
    std::unordered_map<size_t, std::vector<OffsetEntry>> spill_;
    std::vector<ColumnStat> cols_;   // G^{m-1}
    std::vector<RowStat> rows_;      // order 2 only: first-coordinate extents
    mutable bool dirty_ = true;
    mutable bool certified_cache_ = false;
};

// Populates a tile from the post-burn-in part of a trajectory. Throws
// UnderSampledError when fewer than half of the cells are visited.
TorusTile build_tile(const Trajectory& traj, int grid, const TileOptions& opts = {});

// Diagnostic: iterates a point cloud sampled uniformly from the box
// [lo, hi] and returns the surviving points after `iters` steps, flattened.
std::vector<double> iterate_box_cloud(const Modulator& mod, const StateVector& lo,
                                      const StateVector& hi, int n_points, int iters,
                                      std::uint64_t seed);

}  // namespace sdq::tiling
