#include "mbda/geometric.hpp"

#include "mbda/gabor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace mbda {

std::vector<int> grid_region_ids(int row_begin, int row_end, int col_begin, int col_end) {
    if (row_begin < 1 || row_end > kGridRows || row_begin > row_end || col_begin < 1 ||
        col_end > kGridCols || col_begin > col_end) {
        throw std::invalid_argument("grid_region_ids: window outside the grid");
    }
    std::vector<int> ids;
    for (int r = row_begin; r <= row_end; ++r) {
        for (int c = col_begin; c <= col_end; ++c) {
            const int id = (r - 1) * kGridCols + c;
            if (id <= kGridPointCount) {
                ids.push_back(id);
            }
        }
    }
    return ids;
}

RegionSpec upper_face_region() {
    return {"upper_face", grid_region_ids(1, 3, 2, 9)};
}

RegionSpec lower_face_region() {
    return {"lower_face", grid_region_ids(6, 8, 2, 9)};
}

Matrix displacement_matrix(const LandmarkTrack& track, const RegionSpec& region,
                           int t_target) {
    if (track.frame_count() < 2) {
        throw std::invalid_argument("displacement_matrix: track needs >= 2 frames");
    }
    if (region.ids.empty()) {
        throw std::invalid_argument("displacement_matrix: empty region");
    }
    for (const Matrix& f : track.frames) {
        if (f.rows() != track.point_count() || f.cols() != 2) {
            throw std::invalid_argument("displacement_matrix: malformed track frame");
        }
    }

    std::unordered_map<int, Index> row_of_id;
    for (Index i = 0; i < track.point_count(); ++i) {
        row_of_id[track.point_ids[static_cast<size_t>(i)]] = i;
    }
    std::vector<Index> rows;
    rows.reserve(region.ids.size());
    for (int id : region.ids) {
        const auto it = row_of_id.find(id);
        if (it == row_of_id.end()) {
            throw std::invalid_argument("displacement_matrix: point id " +
                                        std::to_string(id) + " missing from track");
        }
        rows.push_back(it->second);
    }

    const std::vector<Index> picks = resample_indices(track.frame_count(), t_target);
    const Matrix& first = track.frames[static_cast<size_t>(picks.front())];
    const Index p = static_cast<Index>(rows.size());
    Matrix out(2 * p, t_target - 1);
    for (int f = 1; f < t_target; ++f) {
        const Matrix& frame = track.frames[static_cast<size_t>(picks[static_cast<size_t>(f)])];
        for (Index i = 0; i < p; ++i) {
            const Index r = rows[static_cast<size_t>(i)];
            out(i, f - 1) = frame(r, 0) - first(r, 0);
            out(p + i, f - 1) = frame(r, 1) - first(r, 1);
        }
    }
    return out;
}

Subspace fit_geometric_subspace(const std::vector<Matrix>& positives,
                                const std::vector<Matrix>& negatives, Index d_row,
                                Index d_col, const MbdaConfig& config) {
    std::vector<Tensor> pos;
    pos.reserve(positives.size());
    for (const Matrix& m : positives) {
        pos.push_back(matrix_as_tensor(m));
    }
    std::vector<Tensor> neg;
    neg.reserve(negatives.size());
    for (const Matrix& m : negatives) {
        neg.push_back(matrix_as_tensor(m));
    }
    MbdaConfig fit_config = config;
    fit_config.target_dims = {d_row, d_col};
    return fit_mbda(pos, neg, fit_config);
}

Vector geometric_feature(const Matrix& mat, const Subspace& s) {
    return vectorize(project(matrix_as_tensor(mat), s));
}

}  // namespace mbda
