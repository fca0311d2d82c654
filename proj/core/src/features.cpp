#include "mbda/features.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mbda {

Method method_from_string(const std::string& name) {
    if (name == "mbda") return Method::kMbda;
    if (name == "twodbda_bda") return Method::kTwodbdaBda;
    if (name == "mda") return Method::kMda;
    if (name == "geometric_only") return Method::kGeometricOnly;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected mbda, twodbda_bda, mda, or geometric_only)");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::kMbda: return "mbda";
        case Method::kTwodbdaBda: return "twodbda_bda";
        case Method::kMda: return "mda";
        case Method::kGeometricOnly: return "geometric_only";
    }
    throw std::logic_error("method_name: bad enum");
}

std::vector<Method> all_methods() {
    return {Method::kMbda, Method::kTwodbdaBda, Method::kMda, Method::kGeometricOnly};
}

PipelineConfig pipeline_config_from(const ConfigMap& config) {
    PipelineConfig c;
    c.t_target = config.get_int("t_target", c.t_target);
    c.downsample = config.get_int("downsample", static_cast<int>(c.downsample));
    c.gabor_orientations = config.get_int("gabor_orientations", static_cast<int>(c.gabor_orientations));
    c.gabor_scales = config.get_int("gabor_scales", static_cast<int>(c.gabor_scales));
    c.gabor_base_wavelength = config.get_double("gabor_base_wavelength", c.gabor_base_wavelength);
    std::vector<int> dims = config.get_int_list("appearance_dims", {});
    if (!dims.empty()) {
        c.appearance_dims.assign(dims.begin(), dims.end());
    }
    c.geometric_rows = config.get_int("geometric_rows", static_cast<int>(c.geometric_rows));
    c.geometric_cols = config.get_int("geometric_cols", static_cast<int>(c.geometric_cols));
    c.slice_rows = config.get_int("slice_rows", static_cast<int>(c.slice_rows));
    c.slice_cols = config.get_int("slice_cols", static_cast<int>(c.slice_cols));
    c.bda_rank = config.get_int("bda_rank", static_cast<int>(c.bda_rank));
    c.bda_preselect = config.get_int("bda_preselect", static_cast<int>(c.bda_preselect));
    c.mbda_max_iterations = config.get_int("mbda_max_iterations", c.mbda_max_iterations);
    c.mbda_tolerance = config.get_double("mbda_tolerance", c.mbda_tolerance);
    c.mbda_gamma = config.get_double("mbda_gamma", c.mbda_gamma);
    c.mbda_sqrt_weighting = config.get_bool("mbda_sqrt_weighting", c.mbda_sqrt_weighting);
    c.svm_c = config.get_double("svm_c", c.svm_c);
    c.svm_c_positive = config.get_double("svm_c_positive", c.svm_c_positive);
    c.svm_gamma = config.get_double("svm_gamma", c.svm_gamma);
    c.svm_tol = config.get_double("svm_tol", c.svm_tol);
    c.upper_aus = config.get_int_list("upper_aus", c.upper_aus);
    c.use_geometric = config.get_bool("use_geometric", c.use_geometric);
    return c;
}

GaborBank bank_from(const PipelineConfig& config) {
    return make_bank(config.gabor_orientations, config.gabor_scales,
                     config.gabor_base_wavelength);
}

PreparedSample prepare_sample(const SequenceSample& sample, const GaborBank& bank,
                              const PipelineConfig& config, bool need_appearance) {
    PreparedSample out;
    out.id = sample.id;
    out.subject = sample.subject;
    out.test_split = sample.split == "test";
    out.labels = sample.labels;
    if (need_appearance)
        out.appearance =
            difference_tensor(sample.frames, bank, config.t_target, config.downsample);
    out.disp_upper = displacement_matrix(sample.track, upper_face_region(), config.t_target);
    out.disp_lower = displacement_matrix(sample.track, lower_face_region(), config.t_target);
    return out;
}

namespace {

MbdaConfig mbda_config_for(const PipelineConfig& config, std::vector<Index> target_dims) {
    MbdaConfig c;
    c.target_dims = std::move(target_dims);
    c.max_iterations = config.mbda_max_iterations;
    c.tolerance = config.mbda_tolerance;
    c.gamma = config.mbda_gamma;
    c.sqrt_weighting = config.mbda_sqrt_weighting;
    return c;
}

void split_by_label(const std::vector<const PreparedSample*>& samples, int au,
                    std::vector<const PreparedSample*>* pos,
                    std::vector<const PreparedSample*>* neg) {
    for (const PreparedSample* s : samples)
        (s->labels.count(au) ? *pos : *neg).push_back(s);
    if (pos->empty()) throw std::invalid_argument("no positive samples for AU " + std::to_string(au));
    if (neg->empty()) throw std::invalid_argument("no negative samples for AU " + std::to_string(au));
}

Matrix slice_of(const Tensor& t, Index kernel, Index frame) {
    Matrix m(t.dim(0), t.dim(1));
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) m(r, c) = t.at({r, c, kernel, frame});
    return m;
}

std::vector<Tensor> appearance_tensors(const std::vector<const PreparedSample*>& group) {
    std::vector<Tensor> out;
    out.reserve(group.size());
    for (const PreparedSample* s : group) {
        if (s->appearance.order() != 4)
            throw std::invalid_argument("appearance tensors were not prepared");
        out.push_back(s->appearance);
    }
    return out;
}

// Projects every (kernel, frame) slice through its fitted map and
// concatenates the vectorized results, kernel-major.
Vector slice_concat(const ArmModel& model, const Tensor& t) {
    const Index kernels = t.dim(2);
    const Index frames = t.dim(3);
    if (static_cast<std::size_t>(kernels * frames) != model.slices.size())
        throw std::invalid_argument("slice count does not match the fitted transforms");
    std::vector<Vector> parts;
    parts.reserve(model.slices.size());
    Index total = 0;
    for (Index k = 0; k < kernels; ++k) {
        for (Index f = 0; f < frames; ++f) {
            const Subspace& s = model.slices[static_cast<std::size_t>(k * frames + f)];
            parts.push_back(vectorize(project(matrix_as_tensor(slice_of(t, k, f)), s)));
            total += parts.back().size();
        }
    }
    Vector out(total);
    Index at = 0;
    for (const Vector& p : parts) {
        out.segment(at, p.size()) = p;
        at += p.size();
    }
    return out;
}

Vector select_coords(const std::vector<Index>& selection, const Vector& x) {
    if (selection.empty()) return x;
    Vector out(static_cast<Index>(selection.size()));
    for (std::size_t i = 0; i < selection.size(); ++i) out[static_cast<Index>(i)] = x[selection[i]];
    return out;
}

// Pooled per-coordinate standard deviation of one feature segment.
double segment_std(const std::vector<Vector>& features, Index begin, Index len) {
    if (len == 0 || features.empty()) return 0.0;
    Vector mean = Vector::Zero(len);
    for (const Vector& f : features) mean += f.segment(begin, len);
    mean /= static_cast<double>(features.size());
    double sum = 0.0;
    for (const Vector& f : features) sum += (f.segment(begin, len) - mean).squaredNorm();
    return std::sqrt(sum / (static_cast<double>(features.size()) * static_cast<double>(len)));
}

}  // namespace

Vector arm_feature(const ArmModel& model, const PreparedSample& sample, bool upper_region) {
    std::vector<Vector> parts;
    if (!model.appearance.mats.empty())
        parts.push_back(model.appearance_scale *
                        vectorize(project(sample.appearance, model.appearance)));
    if (!model.slices.empty()) {
        Vector concat = select_coords(model.selection, slice_concat(model, sample.appearance));
        if (concat.size() != model.bda.rows())
            throw std::invalid_argument("feature dim mismatch against the fitted vector map");
        parts.push_back(model.appearance_scale * (model.bda.transpose() * concat));
    }
    if (!model.geometric.mats.empty()) {
        const Matrix& disp = upper_region ? sample.disp_upper : sample.disp_lower;
        parts.push_back(model.geometric_scale * geometric_feature(disp, model.geometric));
    }
    if (parts.empty()) throw std::invalid_argument("arm_feature: empty model");
    Index total = 0;
    for (const Vector& p : parts) total += p.size();
    Vector out(total);
    Index at = 0;
    for (const Vector& p : parts) {
        out.segment(at, p.size()) = p;
        at += p.size();
    }
    return out;
}

BuiltFeatures build_arm_features(const std::vector<const PreparedSample*>& samples, int au,
                                 Method method, const PipelineConfig& config) {
    std::vector<const PreparedSample*> pos, neg;
    split_by_label(samples, au, &pos, &neg);
    const bool upper = std::find(config.upper_aus.begin(), config.upper_aus.end(), au) !=
                       config.upper_aus.end();

    BuiltFeatures out;

    if (method == Method::kMbda || method == Method::kMda) {
        std::vector<Tensor> pos_t = appearance_tensors(pos);
        std::vector<Tensor> neg_t = appearance_tensors(neg);
        MbdaConfig c = mbda_config_for(config, config.appearance_dims);
        out.model.appearance =
            method == Method::kMbda ? fit_mbda(pos_t, neg_t, c) : fit_mda(pos_t, neg_t, c);
    } else if (method == Method::kTwodbdaBda) {
        std::vector<Tensor> pos_t = appearance_tensors(pos);
        std::vector<Tensor> neg_t = appearance_tensors(neg);
        const Index kernels = pos_t[0].dim(2);
        const Index frames = pos_t[0].dim(3);
        MbdaConfig slice_cfg = mbda_config_for(config, {config.slice_rows, config.slice_cols});
        for (Index k = 0; k < kernels; ++k) {
            for (Index f = 0; f < frames; ++f) {
                std::vector<Tensor> ps, ns;
                ps.reserve(pos_t.size());
                ns.reserve(neg_t.size());
                for (const Tensor& t : pos_t) ps.push_back(matrix_as_tensor(slice_of(t, k, f)));
                for (const Tensor& t : neg_t) ns.push_back(matrix_as_tensor(slice_of(t, k, f)));
                out.model.slices.push_back(fit_mbda(ps, ns, slice_cfg));
            }
        }

        std::vector<Vector> pos_concat, neg_concat;
        for (const PreparedSample* s : pos)
            pos_concat.push_back(slice_concat(out.model, s->appearance));
        for (const PreparedSample* s : neg)
            neg_concat.push_back(slice_concat(out.model, s->appearance));

        const Index dim = pos_concat[0].size();
        std::vector<Index> keep_all(static_cast<std::size_t>(dim));
        std::iota(keep_all.begin(), keep_all.end(), 0);
        out.model.selection = keep_all;
        if (config.bda_preselect > 0 && config.bda_preselect < dim) {
            // Keep the coordinates with the largest training variance; ties
            // resolve to the lower index, and the kept set stays sorted.
            Vector mean = Vector::Zero(dim);
            for (const Vector& v : pos_concat) mean += v;
            for (const Vector& v : neg_concat) mean += v;
            mean /= static_cast<double>(pos_concat.size() + neg_concat.size());
            Vector var = Vector::Zero(dim);
            for (const Vector& v : pos_concat) var += (v - mean).cwiseAbs2();
            for (const Vector& v : neg_concat) var += (v - mean).cwiseAbs2();
            std::vector<Index> order(static_cast<std::size_t>(dim));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](Index a, Index b) { return var[a] > var[b]; });
            order.resize(static_cast<std::size_t>(config.bda_preselect));
            std::sort(order.begin(), order.end());
            out.model.selection = order;
            for (Vector& v : pos_concat) v = select_coords(out.model.selection, v);
            for (Vector& v : neg_concat) v = select_coords(out.model.selection, v);
        }

        const Index rank = std::min<Index>(config.bda_rank, pos_concat[0].size());
        MbdaConfig bda_cfg = mbda_config_for(config, {});
        out.model.bda = fit_bda(pos_concat, neg_concat, static_cast<int>(rank), bda_cfg);
    }

    if (config.use_geometric || method == Method::kGeometricOnly) {
        std::vector<Matrix> pos_d, neg_d;
        for (const PreparedSample* s : pos) pos_d.push_back(upper ? s->disp_upper : s->disp_lower);
        for (const PreparedSample* s : neg) neg_d.push_back(upper ? s->disp_upper : s->disp_lower);
        MbdaConfig geo_cfg = mbda_config_for(config, {});
        out.model.geometric = fit_geometric_subspace(pos_d, neg_d, config.geometric_rows,
                                                     config.geometric_cols, geo_cfg);
    }

    out.features.reserve(samples.size());
    for (const PreparedSample* s : samples) out.features.push_back(arm_feature(out.model, *s, upper));

    // Equalize the pooled variance of the two parts on the given samples.
    Index app_len = 0;
    if (!out.model.appearance.mats.empty()) {
        app_len = 1;
        for (Index d : out.model.appearance.output_dims()) app_len *= d;
    } else if (!out.model.slices.empty()) {
        app_len = out.model.bda.cols();
    }
    const Index geo_len = out.features[0].size() - app_len;
    const double app_std = segment_std(out.features, 0, app_len);
    const double geo_std = segment_std(out.features, app_len, geo_len);
    out.model.appearance_scale = app_std > 1e-12 ? 1.0 / app_std : 1.0;
    out.model.geometric_scale = geo_std > 1e-12 ? 1.0 / geo_std : 1.0;
    for (Vector& f : out.features) {
        f.head(app_len) *= out.model.appearance_scale;
        f.tail(geo_len) *= out.model.geometric_scale;
    }
    return out;
}

BuiltFeatures build_mbda_features(const std::vector<const PreparedSample*>& samples, int au,
                                  const PipelineConfig& config) {
    return build_arm_features(samples, au, Method::kMbda, config);
}

BuiltFeatures build_2dbda_bda_features(const std::vector<const PreparedSample*>& samples, int au,
                                       const PipelineConfig& config) {
    return build_arm_features(samples, au, Method::kTwodbdaBda, config);
}

}  // namespace mbda
