#include "mbda/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mbda {

namespace {

double gaussian_kernel(const Vector& a, const Vector& b, double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

// Platt's sequential minimal optimization, made deterministic: the
// second-choice heuristic breaks |E1-E2| ties on the lowest index and the
// fallback scans start at a fixed offset instead of a random one.
class Smo {
public:
    Smo(const std::vector<Vector>& x, const std::vector<int>& labels, const SvmConfig& config)
        : x_(x), tol_(config.tol) {
        const Index n = static_cast<Index>(x.size());
        y_.resize(n);
        box_.resize(n);
        for (Index i = 0; i < n; ++i) {
            y_[i] = static_cast<double>(labels[static_cast<std::size_t>(i)]);
            box_[i] = (y_[i] > 0 && config.c_positive > 0) ? config.c_positive : config.c;
        }
        gamma_ = config.gamma;
        kernel_.resize(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j <= i; ++j)
                kernel_(i, j) = kernel_(j, i) =
                    gaussian_kernel(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)], gamma_);
        alpha_ = Vector::Zero(n);
        error_ = -y_;  // f(x) == 0 everywhere before training
    }

    void run() {
        const Index n = alpha_.size();
        bool examine_all = true;
        int changed = 0;
        for (int sweep = 0; sweep < kMaxSweeps && (changed > 0 || examine_all); ++sweep) {
            changed = 0;
            for (Index i = 0; i < n; ++i) {
                if (examine_all || unbound(i)) changed += examine(i);
            }
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
    }

    SvmModel model() const {
        const Index n = alpha_.size();
        std::vector<Index> kept;
        for (Index i = 0; i < n; ++i)
            if (alpha_[i] > 1e-12 * box_[i]) kept.push_back(i);
        SvmModel m;
        m.support_vectors.resize(static_cast<Index>(kept.size()),
                                 x_.empty() ? 0 : x_[0].size());
        m.dual_coefs.resize(static_cast<Index>(kept.size()));
        for (std::size_t r = 0; r < kept.size(); ++r) {
            m.support_vectors.row(static_cast<Index>(r)) =
                x_[static_cast<std::size_t>(kept[r])].transpose();
            m.dual_coefs[static_cast<Index>(r)] = alpha_[kept[r]] * y_[kept[r]];
        }
        m.bias = bias_;
        m.gamma = gamma_;
        m.c = box_.maxCoeff();
        return m;
    }

private:
    static constexpr int kMaxSweeps = 10000;

    bool unbound(Index i) const { return alpha_[i] > 0 && alpha_[i] < box_[i]; }

    int examine(Index i2) {
        const double y2 = y_[i2];
        const double a2 = alpha_[i2];
        const double e2 = error_[i2];
        const double r2 = e2 * y2;
        const bool violates = (r2 < -tol_ && a2 < box_[i2]) || (r2 > tol_ && a2 > 0);
        if (!violates) return 0;
        const Index n = alpha_.size();

        Index best = -1;
        double best_gap = -1.0;
        for (Index i = 0; i < n; ++i) {
            if (!unbound(i)) continue;
            const double gap = std::abs(error_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && step(best, i2)) return 1;

        for (Index k = 0; k < n; ++k) {
            const Index i = (i2 + 1 + k) % n;
            if (unbound(i) && step(i, i2)) return 1;
        }
        for (Index k = 0; k < n; ++k) {
            const Index i = (i2 + 1 + k) % n;
            if (step(i, i2)) return 1;
        }
        return 0;
    }

    bool step(Index i1, Index i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = error_[i1], e2 = error_[i2];
        const double s = y1 * y2;
        double low, high;
        if (s < 0) {
            low = std::max(0.0, a2 - a1);
            high = std::min(box_[i2], box_[i1] + a2 - a1);
        } else {
            low = std::max(0.0, a1 + a2 - box_[i1]);
            high = std::min(box_[i2], a1 + a2);
        }
        if (low >= high) return false;

        const double k11 = kernel_(i1, i1), k12 = kernel_(i1, i2), k22 = kernel_(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2_new;
        if (eta > 0) {
            a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, low, high);
        } else {
            // Flat or concave direction: compare the restricted objective at
            // the two clip endpoints.
            const double f1 = y1 * (e1 - bias_) - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * (e2 - bias_) - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - low);
            const double h1 = a1 + s * (a2 - high);
            const double obj_low = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 +
                                   0.5 * low * low * k22 + s * low * l1 * k12;
            const double obj_high = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 +
                                    0.5 * high * high * k22 + s * high * h1 * k12;
            if (obj_low < obj_high - 1e-12)
                a2_new = low;
            else if (obj_low > obj_high + 1e-12)
                a2_new = high;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        a1_new = std::clamp(a1_new, 0.0, box_[i1]);

        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);
        const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0 && a1_new < box_[i1])
            b_new = b1;
        else if (a2_new > 0 && a2_new < box_[i2])
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        error_ += d1 * kernel_.col(i1) + d2 * kernel_.col(i2);
        error_.array() += b_new - bias_;
        bias_ = b_new;
        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        return true;
    }

    const std::vector<Vector>& x_;
    Vector y_, box_, alpha_, error_;
    Matrix kernel_;
    double bias_ = 0.0;
    double gamma_ = 0.0;
    double tol_ = 1e-3;
};

}  // namespace

double default_gamma(const std::vector<Vector>& features) {
    if (features.empty()) throw std::invalid_argument("default_gamma: no features");
    const Index dim = features[0].size();
    if (dim == 0) throw std::invalid_argument("default_gamma: empty feature vectors");
    Vector mean = Vector::Zero(dim);
    for (const Vector& f : features) {
        if (f.size() != dim) throw std::invalid_argument("default_gamma: inconsistent dims");
        mean += f;
    }
    mean /= static_cast<double>(features.size());
    double pooled = 0.0;
    for (const Vector& f : features) pooled += (f - mean).squaredNorm();
    pooled /= static_cast<double>(features.size()) * static_cast<double>(dim);
    if (pooled <= 0.0) return 1.0 / static_cast<double>(dim);
    return 1.0 / (static_cast<double>(dim) * pooled);
}

SvmModel train_svm(const std::vector<Vector>& features, const std::vector<int>& labels,
                   const SvmConfig& config) {
    if (features.empty()) throw std::invalid_argument("train_svm: no samples");
    if (features.size() != labels.size())
        throw std::invalid_argument("train_svm: feature/label count mismatch");
    if (config.c <= 0 || config.gamma <= 0 || config.tol <= 0)
        throw std::invalid_argument("train_svm: c, gamma, and tol must be positive");
    const Index dim = features[0].size();
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != dim)
            throw std::invalid_argument("train_svm: inconsistent feature dims");
        if (!features[i].allFinite())
            throw std::invalid_argument("train_svm: non-finite feature");
        if (labels[i] == 1)
            has_pos = true;
        else if (labels[i] == -1)
            has_neg = true;
        else
            throw std::invalid_argument("train_svm: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw std::invalid_argument("train_svm: single-class input");

    Smo smo(features, labels, config);
    smo.run();
    return smo.model();
}

double decision(const SvmModel& model, const Vector& x) {
    if (x.size() != model.support_vectors.cols())
        throw std::invalid_argument("decision: feature dim mismatch");
    double value = model.bias;
    for (Index i = 0; i < model.support_vectors.rows(); ++i)
        value += model.dual_coefs[i] *
                 std::exp(-model.gamma * (model.support_vectors.row(i).transpose() - x).squaredNorm());
    return value;
}

std::set<int> predict_au_set(const std::map<int, SvmModel>& detectors, const Vector& feature) {
    std::set<int> out;
    for (const auto& [au, model] : detectors)
        if (decision(model, feature) > 0) out.insert(au);
    return out;
}

Metrics evaluate(const std::vector<AuPrediction>& predictions) {
    if (predictions.empty()) throw std::invalid_argument("evaluate: no predictions");
    std::map<std::vector<int>, CombinationRow> rows;
    Metrics m;
    int extra_bearing = 0;
    for (const AuPrediction& p : predictions) {
        std::vector<int> key(p.truth.begin(), p.truth.end());
        CombinationRow& row = rows[key];
        if (row.total == 0) row.combination = key;
        ++row.total;
        ++m.total;

        const bool exact = p.predicted == p.truth;
        bool overlaps = false;
        bool has_extra = false;
        for (int au : p.predicted) {
            if (p.truth.count(au))
                overlaps = true;
            else
                has_extra = true;
        }
        if (exact) {
            ++row.exact;
            ++m.exact_match;
        } else if (!overlaps) {
            ++row.disjoint;
            ++m.disjoint;
        } else {
            ++row.partial;
            ++m.partial;
        }
        if (has_extra) {
            ++row.extras;
            ++extra_bearing;
        }
    }
    m.recognition_rate = static_cast<double>(m.exact_match) / static_cast<double>(m.total);
    m.false_alarm_rate = static_cast<double>(extra_bearing) / static_cast<double>(m.total);
    m.rows.reserve(rows.size());
    for (auto& [key, row] : rows) m.rows.push_back(std::move(row));
    return m;
}

std::string render_metrics_text(const Metrics& metrics) {
    auto label = [](const std::vector<int>& combo) {
        std::string s;
        for (std::size_t i = 0; i < combo.size(); ++i) {
            if (i) s += '+';
            s += std::to_string(combo[i]);
        }
        return s.empty() ? std::string("(none)") : s;
    };
    std::size_t width = 5;
    for (const CombinationRow& row : metrics.rows) width = std::max(width, label(row.combination).size());

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width) + 2) << "AUs" << std::right
        << std::setw(7) << "Total" << std::setw(7) << "Exact" << std::setw(9) << "Partial"
        << std::setw(10) << "Disjoint" << std::setw(8) << "Extras" << '\n';
    for (const CombinationRow& row : metrics.rows) {
        out << std::left << std::setw(static_cast<int>(width) + 2) << label(row.combination)
            << std::right << std::setw(7) << row.total << std::setw(7) << row.exact
            << std::setw(9) << row.partial << std::setw(10) << row.disjoint << std::setw(8)
            << row.extras << '\n';
    }
    out << std::left << std::setw(static_cast<int>(width) + 2) << "Total" << std::right
        << std::setw(7) << metrics.total << std::setw(7) << metrics.exact_match << std::setw(9)
        << metrics.partial << std::setw(10) << metrics.disjoint << '\n';
    out << std::fixed << std::setprecision(1);
    out << "Recognition rate (R): " << 100.0 * metrics.recognition_rate << "%\n";
    out << "False alarm rate (F): " << 100.0 * metrics.false_alarm_rate << "%\n";
    return out.str();
}

}  // namespace mbda
