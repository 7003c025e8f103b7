#include "sdq/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "sdq/arith.hpp"

namespace sdq::tiling {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxTileOrder = 3;
constexpr int kOffsetBits = 21;  // packed offsets cover |k| < 2^20
constexpr std::int64_t kEmptyCell = std::numeric_limits<std::int64_t>::min();

std::int64_t pack_offset(const int* k, int m) {
    std::int64_t key = 0;
    for (int j = 0; j < m; ++j) {
        auto shifted = static_cast<std::int64_t>(k[j]) + (1 << 20);
        key |= shifted << (j * kOffsetBits);
    }
    return key;
}

void unpack_offset(std::int64_t key, int m, int* k) {
    for (int j = 0; j < m; ++j) {
        auto shifted = (key >> (j * kOffsetBits)) & ((1 << kOffsetBits) - 1);
        k[j] = static_cast<int>(shifted) - (1 << 20);
    }
}

void insert_sorted_unique(std::vector<int>& v, int k) {
    auto it = std::lower_bound(v.begin(), v.end(), k);
    if (it == v.end() || *it != k) v.insert(it, k);
}

}  // namespace

TorusTile::TorusTile(int order, int grid) : m_(order), grid_(grid) {
    if (order < 1 || order > kMaxTileOrder)
        throw ArgumentError("tile order must be between 1 and 3");
    if (grid < 2) throw ArgumentError("tile grid must be >= 2");
    double total = std::pow(static_cast<double>(grid), order);
    if (total > 1.5e8) throw ArgumentError("tile grid too large");
    cell_key_.assign(static_cast<size_t>(total), kEmptyCell);
    cell_count_.assign(static_cast<size_t>(total), 0);
    size_t n_cols = 1;
    for (int j = 0; j < m_ - 1; ++j) n_cols *= static_cast<size_t>(grid);
    cols_.resize(n_cols);
    if (m_ == 2) rows_.resize(static_cast<size_t>(grid));
}

size_t TorusTile::cell_index(const double* t) const {
    size_t idx = 0;
    size_t stride = 1;
    for (int j = 0; j < m_; ++j) {
        auto c = static_cast<int>(t[j] * grid_);
        if (c >= grid_) c = grid_ - 1;
        if (c < 0) c = 0;
        idx += static_cast<size_t>(c) * stride;
        stride *= static_cast<size_t>(grid_);
    }
    return idx;
}

size_t TorusTile::column_index(const double* t) const {
    size_t idx = 0;
    size_t stride = 1;
    for (int j = 0; j < m_ - 1; ++j) {
        auto c = static_cast<int>(t[j] * grid_);
        if (c >= grid_) c = grid_ - 1;
        if (c < 0) c = 0;
        idx += static_cast<size_t>(c) * stride;
        stride *= static_cast<size_t>(grid_);
    }
    return idx;
}

int TorusTile::cell_multiplicity(size_t idx) const {
    if (cell_key_[idx] == kEmptyCell) return 0;
    auto it = spill_.find(idx);
    return it == spill_.end() ? 1 : static_cast<int>(it->second.size());
}

std::vector<TorusTile::OffsetEntry> TorusTile::cell_entries(size_t idx) const {
    if (cell_key_[idx] == kEmptyCell) return {};
    auto it = spill_.find(idx);
    if (it != spill_.end()) return it->second;
    return {{cell_key_[idx], cell_count_[idx]}};
}

void TorusTile::ingest(const double* u) {
    double t[kMaxTileOrder];
    int k[kMaxTileOrder];
    for (int j = 0; j < m_; ++j) {
        t[j] = arith::frac(u[j]);
        double kj = u[j] - t[j];  // exact integer
        if (std::abs(kj) >= (1 << 20))
            throw ArgumentError("state offset out of packable range");
        k[j] = static_cast<int>(kj);
    }
    size_t idx = cell_index(t);
    std::int64_t key = pack_offset(k, m_);
    if (cell_key_[idx] == kEmptyCell) {
        cell_key_[idx] = key;
        cell_count_[idx] = 1;
    } else if (cell_key_[idx] == key && !spill_.count(idx)) {
        ++cell_count_[idx];
    } else {
        auto& entries = spill_[idx];
        if (entries.empty())
            entries.push_back({cell_key_[idx], cell_count_[idx]});
        auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const OffsetEntry& e) { return e.first == key; });
        if (it != entries.end())
            ++it->second;
        else
            entries.push_back({key, 1});
        ++cell_count_[idx];  // total visits, mirrored for the PGM path
    }

    ColumnStat& col = cols_[column_index(t)];
    double um = u[m_ - 1];
    if (col.count == 0) {
        col.lo = col.hi = um;
    } else {
        col.lo = std::min(col.lo, um);
        col.hi = std::max(col.hi, um);
    }
    ++col.count;
    insert_sorted_unique(col.k_set, k[m_ - 1]);

    if (m_ == 2) {
        auto c1 = static_cast<int>(t[1] * grid_);
        if (c1 >= grid_) c1 = grid_ - 1;
        RowStat& row = rows_[static_cast<size_t>(c1)];
        if (row.count == 0) {
            row.lo = row.hi = u[0];
        } else {
            row.lo = std::min(row.lo, u[0]);
            row.hi = std::max(row.hi, u[0]);
        }
        ++row.count;
    }
    ++samples_;
    dirty_ = true;
}

void TorusTile::merge(const TorusTile& other) {
    if (other.m_ != m_ || other.grid_ != grid_)
        throw ArgumentError("cannot merge tiles of different shape");
    for (size_t i = 0; i < cell_key_.size(); ++i) {
        for (const auto& [key, count] : other.cell_entries(i)) {
            // Reuse the ingest bookkeeping for each (offset, count) batch.
            if (cell_key_[i] == kEmptyCell) {
                cell_key_[i] = key;
                cell_count_[i] = count;
                continue;
            }
            if (cell_key_[i] == key && !spill_.count(i)) {
                cell_count_[i] += count;
                continue;
            }
            auto& entries = spill_[i];
            if (entries.empty()) entries.push_back({cell_key_[i], cell_count_[i]});
            auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const OffsetEntry& e) { return e.first == key; });
            if (it != entries.end())
                it->second += count;
            else
                entries.push_back({key, count});
            cell_count_[i] += count;
        }
    }
    for (size_t i = 0; i < cols_.size(); ++i) {
        const ColumnStat& src = other.cols_[i];
        if (src.count == 0) continue;
        ColumnStat& dst = cols_[i];
        if (dst.count == 0) {
            dst = src;
        } else {
            dst.lo = std::min(dst.lo, src.lo);
            dst.hi = std::max(dst.hi, src.hi);
            dst.count += src.count;
            for (int kk : src.k_set) insert_sorted_unique(dst.k_set, kk);
        }
    }
    for (size_t i = 0; i < rows_.size(); ++i) {
        const RowStat& src = other.rows_[i];
        if (src.count == 0) continue;
        RowStat& dst = rows_[i];
        if (dst.count == 0) {
            dst = src;
        } else {
            dst.lo = std::min(dst.lo, src.lo);
            dst.hi = std::max(dst.hi, src.hi);
            dst.count += src.count;
        }
    }
    samples_ += other.samples_;
    dirty_ = true;
}

MultiplicityReport TorusTile::multiplicity_report() const {
    MultiplicityReport rep;
    rep.total_cells = cell_key_.size();
    for (size_t i = 0; i < cell_key_.size(); ++i) {
        int mult = cell_multiplicity(i);
        if (mult == 0) continue;
        ++rep.visited_cells;
        ++rep.histogram[mult];
    }
    auto it1 = rep.histogram.find(1);
    double m1 = it1 == rep.histogram.end() ? 0.0 : static_cast<double>(it1->second);
    rep.covered_fraction =
        rep.total_cells ? static_cast<double>(rep.visited_cells) / rep.total_cells : 0.0;
    rep.mult1_fraction =
        rep.visited_cells ? m1 / static_cast<double>(rep.visited_cells) : 0.0;
    rep.certified = rep.mult1_fraction >= 1.0 - eps_cover_ &&
                    rep.covered_fraction >= 1.0 - eps_cover_;
    return rep;
}

bool TorusTile::certified() const {
    if (dirty_) {
        certified_cache_ = multiplicity_report().certified;
        dirty_ = false;
    }
    return certified_cache_;
}

bool TorusTile::vm_connected(double tol) const {
    if (!certified())
        throw MultiplicityError("tile is not certified as a single tile");
    if (m_ == 1) return true;  // no v' coordinate; connected by convention
    if (tol < 0.0) tol = 1.5 / grid_;
    const double max_span = 1.0 - 1.0 / grid_ + tol;
    for (const ColumnStat& col : cols_) {
        if (col.count == 0) continue;
        if (col.hi - col.lo > max_span) return false;
        if (!col.k_set.empty() &&
            col.k_set.back() - col.k_set.front() + 1 != static_cast<int>(col.k_set.size()))
            return false;
    }
    return true;
}

const TorusTile::ColumnStat* TorusTile::nearest_column(size_t col) const {
    if (cols_[col].count > 0) return &cols_[col];
    auto g = static_cast<long long>(grid_);
    if (m_ == 2) {  // 1-d circular search
        for (long long d = 1; d <= g / 2; ++d) {
            size_t a = static_cast<size_t>((static_cast<long long>(col) + d) % g);
            size_t b = static_cast<size_t>((static_cast<long long>(col) - d + g) % g);
            if (cols_[a].count > 0) return &cols_[a];
            if (cols_[b].count > 0) return &cols_[b];
        }
    } else if (m_ == 3) {  // expanding Chebyshev rings on the 2-torus
        long long x = static_cast<long long>(col) % g;
        long long y = static_cast<long long>(col) / g;
        for (long long r = 1; r <= 2; ++r)
            for (long long d1 = -r; d1 <= r; ++d1)
                for (long long d2 = -r; d2 <= r; ++d2) {
                    if (std::max(std::llabs(d1), std::llabs(d2)) != r) continue;
                    size_t ni = static_cast<size_t>((x + d1 + g) % g) +
                                static_cast<size_t>((y + d2 + g) % g) * static_cast<size_t>(g);
                    if (cols_[ni].count > 0) return &cols_[ni];
                }
    }
    return nullptr;
}

MidpointFunction TorusTile::extract_midpoint(int n_fourier) const {
    if (!vm_connected())
        throw ConnectivityError("tile sections are not connected unit intervals");
    if (n_fourier < 0) n_fourier = grid_ / 4;

    MidpointFunction mp;
    mp.order = m_;
    mp.grid = grid_;
    mp.min_section_span = std::numeric_limits<double>::infinity();
    mp.max_section_span = 0.0;

    if (m_ == 1) {
        const ColumnStat& col = cols_[0];
        if (col.count == 0) throw UnderSampledError("no samples in tile");
        mp.lambda = {(col.lo + col.hi) / 2.0};
        mp.min_section_span = mp.max_section_span = col.hi - col.lo;
    } else {
        mp.lambda.assign(cols_.size(), 0.0);
        std::vector<char> have(cols_.size(), 0);
        for (size_t i = 0; i < cols_.size(); ++i) {
            if (cols_[i].count == 0) continue;
            mp.lambda[i] = (cols_[i].lo + cols_[i].hi) / 2.0;
            have[i] = 1;
            double span = cols_[i].hi - cols_[i].lo;
            mp.min_section_span = std::min(mp.min_section_span, span);
            mp.max_section_span = std::max(mp.max_section_span, span);
        }
        // Fill unvisited columns from occupied neighbours (wraps around).
        for (int pass = 0; pass < grid_; ++pass) {
            bool missing = false;
            for (size_t i = 0; i < have.size(); ++i) {
                if (have[i]) continue;
                double acc = 0.0;
                int n = 0;
                size_t g = grid_;
                size_t x = i % g, rest = i / g;
                for (int d : {-1, 1}) {
                    size_t xi = (x + g + static_cast<size_t>(d)) % g;
                    size_t ni = rest * g + xi;
                    if (have[ni]) { acc += mp.lambda[ni]; ++n; }
                }
                if (m_ == 3) {
                    size_t y = rest;
                    for (int d : {-1, 1}) {
                        size_t yi = (y + g + static_cast<size_t>(d)) % g;
                        size_t ni = yi * g + x;
                        if (have[ni]) { acc += mp.lambda[ni]; ++n; }
                    }
                }
                if (n > 0) {
                    mp.lambda[i] = acc / n;
                    have[i] = 2;  // filled this pass; usable next pass
                } else {
                    missing = true;
                }
            }
            for (auto& h : have)
                if (h == 2) h = 1;
            if (!missing) break;
        }
    }

    // First-variable average of G_Gamma on a grid of size G.
    mp.gbar.assign(static_cast<size_t>(grid_), 0.0);
    if (m_ == 1) {
        double lam = mp.lambda[0];
        for (int j = 0; j < grid_; ++j) {
            double v = (j + 0.5) / grid_;
            mp.gbar[j] = arith::frac0(v - lam) + lam;
        }
    } else if (m_ == 2) {
        mp.gbar = mp.lambda;
    } else {  // m == 3: average the second coordinate
        for (int j = 0; j < grid_; ++j) {
            double acc = 0.0;
            for (int c2 = 0; c2 < grid_; ++c2)
                acc += mp.lambda[static_cast<size_t>(j) +
                                 static_cast<size_t>(c2) * static_cast<size_t>(grid_)];
            mp.gbar[j] = acc / grid_;
        }
    }

    mp.fourier.resize(static_cast<size_t>(n_fourier) + 1);
    for (int n = 0; n <= n_fourier; ++n) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < grid_; ++j) {
            double ang = -2.0 * kPi * n * (j + 0.5) / grid_;
            acc += mp.gbar[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        mp.fourier[n] = acc / static_cast<double>(grid_);
    }
    return mp;
}

double MidpointFunction::lambda_at(std::span<const double> vprime) const {
    if (order == 1) return lambda[0];
    size_t idx = 0, stride = 1;
    for (int j = 0; j < order - 1; ++j) {
        auto c = static_cast<int>(arith::frac(vprime[j]) * grid);
        if (c >= grid) c = grid - 1;
        idx += static_cast<size_t>(c) * stride;
        stride *= static_cast<size_t>(grid);
    }
    return lambda[idx];
}

double MidpointFunction::lambda_interp(double v1) const {
    if (order != 2) throw OrderError("lambda_interp is defined for order 2");
    double pos = arith::frac(v1) * grid - 0.5;  // samples sit at cell centres
    double fl = std::floor(pos);
    double w = pos - fl;
    auto i0 = static_cast<long long>(fl);
    long long g = grid;
    size_t a = static_cast<size_t>(((i0 % g) + g) % g);
    size_t b = static_cast<size_t>((((i0 + 1) % g) + g) % g);
    return (1.0 - w) * lambda[a] + w * lambda[b];
}

double g_gamma(const MidpointFunction& mp, std::span<const double> v) {
    if (static_cast<int>(v.size()) != mp.order)
        throw ArgumentError("point dimension does not match tile order");
    double lam = mp.lambda_at(v.first(static_cast<size_t>(mp.order - 1)));
    double vm = v[mp.order - 1];
    double k = std::floor(vm - lam + 0.5);
    return vm - k;  // equals <v_m - lambda>_0 + lambda; offset is exact
}

StateVector TorusTile::project(std::span<const double> torus_point) const {
    if (static_cast<int>(torus_point.size()) != m_)
        throw ArgumentError("point dimension does not match tile order");
    if (!certified())
        throw MultiplicityError("projection requires a certified single tile");

    double t[kMaxTileOrder];
    for (int j = 0; j < m_; ++j) t[j] = arith::frac(torus_point[j]);

    StateVector u(static_cast<size_t>(m_));
    const double slack = 1.0 / grid_;

    // Last coordinate through the column extent.
    const ColumnStat* col = nearest_column(column_index(t));
    if (col == nullptr) throw UnderSampledError("no occupied column near point");
    double lam = (col->lo + col->hi) / 2.0;
    double um = t[m_ - 1] - std::floor(t[m_ - 1] - lam + 0.5);
    if (um - col->hi > slack && um - 1.0 >= col->lo - slack) um -= 1.0;
    else if (col->lo - um > slack && um + 1.0 <= col->hi + slack) um += 1.0;
    u[m_ - 1] = um;
    if (m_ == 1) return u;

    if (m_ == 2) {
        auto c1 = static_cast<int>(t[1] * grid_);
        if (c1 >= grid_) c1 = grid_ - 1;
        const RowStat& row = rows_[static_cast<size_t>(c1)];
        if (row.count > 0 && row.hi - row.lo <= 1.0 + slack) {
            double kap = (row.lo + row.hi) / 2.0;
            double u1 = t[0] - std::floor(t[0] - kap + 0.5);
            if (u1 - row.hi > slack && u1 - 1.0 >= row.lo - slack) u1 -= 1.0;
            else if (row.lo - u1 > slack && u1 + 1.0 <= row.hi + slack) u1 += 1.0;
            u[0] = u1;
            return u;
        }
    }

    // Fallback: majority offset of the containing cell (or a close neighbour).
    auto lookup = [&](size_t idx) -> std::int64_t {
        auto entries = cell_entries(idx);
        if (entries.empty()) return kEmptyCell;
        const auto* best = &entries[0];
        for (const auto& e : entries)
            if (e.second > best->second) best = &e;
        return best->first;
    };
    size_t idx = cell_index(t);
    std::int64_t key = lookup(idx);
    if (key == kEmptyCell) {
        int c[kMaxTileOrder];
        for (int j = 0; j < m_; ++j) {
            c[j] = static_cast<int>(t[j] * grid_);
            if (c[j] >= grid_) c[j] = grid_ - 1;
        }
        for (int d1 = -1; d1 <= 1 && key == kEmptyCell; ++d1)
            for (int d2 = -1; d2 <= (m_ >= 2 ? 1 : -1) && key == kEmptyCell; ++d2)
                for (int d3 = -1; d3 <= (m_ >= 3 ? 1 : -1) && key == kEmptyCell; ++d3) {
                    int cc[kMaxTileOrder] = {0, 0, 0};
                    cc[0] = (c[0] + d1 + grid_) % grid_;
                    if (m_ >= 2) cc[1] = (c[1] + d2 + grid_) % grid_;
                    if (m_ >= 3) cc[2] = (c[2] + d3 + grid_) % grid_;
                    size_t ni = 0, stride = 1;
                    for (int j = 0; j < m_; ++j) {
                        ni += static_cast<size_t>(cc[j]) * stride;
                        stride *= static_cast<size_t>(grid_);
                    }
                    key = lookup(ni);
                }
    }
    if (key == kEmptyCell) throw UnderSampledError("no occupied cell near point");
    int k[kMaxTileOrder];
    unpack_offset(key, m_, k);
    for (int j = 0; j + 1 < m_; ++j) u[j] = t[j] + k[j];
    return u;
}

double TorusTile::invariance_fraction(const Modulator& mod) const {
    if (mod.order != m_) throw ArgumentError("modulator order does not match tile");
    std::uint64_t total = 0, hits = 0;
    int k[kMaxTileOrder];
    for (size_t idx = 0; idx < cell_key_.size(); ++idx) {
        if (cell_key_[idx] == kEmptyCell) continue;
        double t[kMaxTileOrder];
        size_t rem = idx;
        for (int j = 0; j < m_; ++j) {
            t[j] = (static_cast<double>(rem % grid_) + 0.5) / grid_;
            rem /= static_cast<size_t>(grid_);
        }
        for (const auto& [key, count] : cell_entries(idx)) {
            (void)count;
            unpack_offset(key, m_, k);
            StateVector v(static_cast<size_t>(m_));
            for (int j = 0; j < m_; ++j) v[j] = t[j] + k[j];
            StateVector w = modulator_map(mod, v);
            double tw[kMaxTileOrder];
            int kw[kMaxTileOrder];
            for (int j = 0; j < m_; ++j) {
                tw[j] = arith::frac(w[j]);
                kw[j] = static_cast<int>(w[j] - tw[j]);
            }
            std::int64_t want = pack_offset(kw, m_);
            auto entries = cell_entries(cell_index(tw));
            bool found = std::any_of(entries.begin(), entries.end(),
                                     [&](const OffsetEntry& e) { return e.first == want; });
            ++total;
            if (found) ++hits;
        }
    }
    return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

void TorusTile::export_csv(std::ostream& out) const {
    for (int j = 0; j < m_; ++j) out << "cell_" << j + 1 << ",";
    for (int j = 0; j < m_; ++j) out << "k_" << j + 1 << ",";
    out << "count\n";
    int k[kMaxTileOrder];
    for (size_t idx = 0; idx < cell_key_.size(); ++idx) {
        if (cell_key_[idx] == kEmptyCell) continue;
        int c[kMaxTileOrder];
        size_t rem = idx;
        for (int j = 0; j < m_; ++j) {
            c[j] = static_cast<int>(rem % grid_);
            rem /= static_cast<size_t>(grid_);
        }
        for (const auto& [key, count] : cell_entries(idx)) {
            unpack_offset(key, m_, k);
            for (int j = 0; j < m_; ++j) out << c[j] << ",";
            for (int j = 0; j < m_; ++j) out << k[j] << ",";
            out << count << "\n";
        }
    }
}

void TorusTile::export_pgm(std::ostream& out) const {
    if (m_ != 2) throw OrderError("PGM export is defined for order 2");
    int max_mult = 1;
    for (size_t i = 0; i < cell_key_.size(); ++i)
        max_mult = std::max(max_mult, cell_multiplicity(i));
    out << "P5\n" << grid_ << " " << grid_ << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(grid_));
    for (int y = grid_ - 1; y >= 0; --y) {  // top row = largest v2
        for (int x = 0; x < grid_; ++x) {
            size_t idx = static_cast<size_t>(x) +
                         static_cast<size_t>(y) * static_cast<size_t>(grid_);
            int mult = cell_multiplicity(idx);
            row[static_cast<size_t>(x)] =
                static_cast<unsigned char>(mult == 0 ? 0 : 255 * mult / max_mult);
        }
        out.write(reinterpret_cast<const char*>(row.data()), grid_);
    }
}

TorusTile build_tile(const Trajectory& traj, int grid, const TileOptions& opts) {
    TorusTile tile(traj.order(), grid);
    tile.eps_cover_ = opts.eps_cover;
    for (long long n = opts.burn_in; n <= traj.steps; ++n)
        tile.ingest(traj.state(n).data());
    MultiplicityReport rep = tile.multiplicity_report();
    if (rep.covered_fraction < 0.5)
        throw UnderSampledError("fewer than half of the tile cells were visited");
    return tile;
}

std::vector<double> iterate_box_cloud(const Modulator& mod, const StateVector& lo,
                                      const StateVector& hi, int n_points, int iters,
                                      std::uint64_t seed) {
    mod.validate();
    const int m = mod.order;
    if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m)
        throw ArgumentError("box dimension does not match order");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out;
    StateVector u(static_cast<size_t>(m));
    for (int i = 0; i < n_points; ++i) {
        for (int j = 0; j < m; ++j) u[j] = lo[j] + (hi[j] - lo[j]) * unit(rng);
        bool alive = true;
        for (int it = 0; it < iters && alive; ++it) {
            modulator_step(mod, u.data());
            for (int j = 0; j < m; ++j)
                if (!(std::abs(u[j]) <= 1e6)) alive = false;
        }
        if (alive) out.insert(out.end(), u.begin(), u.end());
    }
    return out;
}

}  // namespace sdq::tiling
