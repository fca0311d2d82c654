#pragma once

#include "mbda/discriminant.hpp"
#include "mbda/tensor.hpp"

#include <string>
#include <vector>

namespace mbda {

/// Landmark positions on the 113-point face grid, tracked over T frames.
/// Point ids are 1-based and constant across frames; frames[f] is P x 2
/// (column 0 = x, column 1 = y) in pixel coordinates.
struct LandmarkTrack {
    std::vector<int> point_ids;
    std::vector<Matrix> frames;

    int point_count() const { return static_cast<int>(point_ids.size()); }
    int frame_count() const { return static_cast<int>(frames.size()); }
};

/// Named subset of grid point ids.
struct RegionSpec {
    std::string name;
    std::vector<int> ids;
};

/// The grid is laid out as 10 rows x 12 columns, ids 1..113 assigned row by
/// row (the last 7 lattice slots are unused).
inline constexpr int kGridPointCount = 113;
inline constexpr int kGridRows = 10;
inline constexpr int kGridCols = 12;

/// Ids covering an inclusive 1-based row/column window of the grid, skipping
/// slots beyond the 113th point.
std::vector<int> grid_region_ids(int row_begin, int row_end, int col_begin, int col_end);

/// Default editable regions: brow/eye band and mouth band of the grid.
RegionSpec upper_face_region();
RegionSpec lower_face_region();

/// Displacement matrix of a region over a resampled track: 2P' rows
/// (x displacements of every region point, then y displacements) by
/// t_target - 1 columns (frames 2..t_target minus frame 1).
Matrix displacement_matrix(const LandmarkTrack& track, const RegionSpec& region,
                           int t_target);

/// Two-directional biased fit of displacement matrices, realized as the
/// order-2 tensor fit. config.target_dims is replaced by {d_row, d_col}.
Subspace fit_geometric_subspace(const std::vector<Matrix>& positives,
                                const std::vector<Matrix>& negatives, Index d_row,
                                Index d_col, const MbdaConfig& config);

/// Projects a displacement matrix through the fitted subspace and flattens
/// the result in canonical order (row index fastest, i.e. column-major).
Vector geometric_feature(const Matrix& mat, const Subspace& s);

}  // namespace mbda
