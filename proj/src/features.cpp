#include "tnr/features.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tnr/errors.hpp"

namespace tnr {

void FeatureSet::validate(double norm_tolerance) const {
    const int dim = local_dim();
    for (std::size_t i = 0; i < features.size(); ++i) {
        const Feature& f = features[i];
        const std::string where = "feature " + std::to_string(i) + ": ";
        if (f.descriptor.size() != dim) throw ConfigError(where + "descriptor dimension differs");
        if (std::abs(f.descriptor.cast<double>().norm() - 1.0) > norm_tolerance)
            throw ConfigError(where + "descriptor is not unit-norm");
        if (!(f.score >= 0.0f)) throw ConfigError(where + "negative score");
        if (f.position.x() < 0.0f || f.position.y() < 0.0f ||
            f.position.x() > static_cast<float>(image_size.width) ||
            f.position.y() > static_cast<float>(image_size.height))
            throw ConfigError(where + "position outside image bounds");
    }
    const double gnorm = global_descriptor.cast<double>().norm();
    const bool zero_ok = features.empty() && gnorm == 0.0;
    if (!zero_ok && std::abs(gnorm - 1.0) > norm_tolerance)
        throw ConfigError("global descriptor is not unit-norm");
}

bool operator==(const Feature& a, const Feature& b) {
    return a.position == b.position && a.score == b.score && a.descriptor.size() == b.descriptor.size() &&
           a.descriptor == b.descriptor;
}

bool operator==(const FeatureSet& a, const FeatureSet& b) {
    return a.image_size == b.image_size && a.features == b.features &&
           a.global_descriptor.size() == b.global_descriptor.size() &&
           a.global_descriptor == b.global_descriptor;
}

namespace {

Eigen::MatrixXd descriptor_matrix(const FeatureSet& set, int dim) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(set.size()), dim);
    for (std::size_t i = 0; i < set.size(); ++i)
        m.row(static_cast<Eigen::Index>(i)) = set.features[i].descriptor.cast<double>().transpose();
    return m;
}

}  // namespace

std::vector<Match> match_mutual_nn(const FeatureSet& query, const FeatureSet& reference) {
    if (query.empty() || reference.empty()) return {};
    const int dim = query.local_dim();
    if (reference.local_dim() != dim)
        throw ConfigError("descriptor dimension mismatch: " + std::to_string(dim) + " vs " +
                          std::to_string(reference.local_dim()));

    const Eigen::MatrixXd q = descriptor_matrix(query, dim);
    const Eigen::MatrixXd r = descriptor_matrix(reference, dim);
    // Squared Euclidean distances, n_query x n_reference.
    Eigen::MatrixXd d2 = -2.0 * (q * r.transpose());
    d2.colwise() += q.rowwise().squaredNorm();
    d2.rowwise() += r.rowwise().squaredNorm().transpose();

    const Eigen::Index nq = d2.rows();
    const Eigen::Index nr = d2.cols();
    std::vector<Eigen::Index> best_ref(static_cast<std::size_t>(nq));
    std::vector<Eigen::Index> best_query(static_cast<std::size_t>(nr), 0);
    std::vector<double> best_query_d(static_cast<std::size_t>(nr), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < nq; ++i) {
        Eigen::Index arg = 0;
        double best = d2(i, 0);
        for (Eigen::Index j = 0; j < nr; ++j) {
            const double d = d2(i, j);
            if (d < best) {
                best = d;
                arg = j;
            }
            // Strict comparison keeps the lowest query index on ties.
            if (d < best_query_d[static_cast<std::size_t>(j)]) {
                best_query_d[static_cast<std::size_t>(j)] = d;
                best_query[static_cast<std::size_t>(j)] = i;
            }
        }
        best_ref[static_cast<std::size_t>(i)] = arg;
    }

    std::vector<Match> matches;
    for (Eigen::Index i = 0; i < nq; ++i) {
        const Eigen::Index j = best_ref[static_cast<std::size_t>(i)];
        if (best_query[static_cast<std::size_t>(j)] != i) continue;
        const Feature& fq = query.features[static_cast<std::size_t>(i)];
        const Feature& fr = reference.features[static_cast<std::size_t>(j)];
        Match m;
        m.query_index = static_cast<std::size_t>(i);
        m.reference_index = static_cast<std::size_t>(j);
        m.weight = static_cast<double>(fq.score) + static_cast<double>(fr.score);
        m.displacement = (fr.position.cast<double>() - fq.position.cast<double>());
        matches.push_back(m);
    }
    return matches;
}

Eigen::VectorXf global_descriptor_from_locals(std::span<const Feature> features, int global_dim) {
    if (features.empty()) throw UnusableFrameError("no local features to pool");
    if (global_dim <= 0) throw ConfigError("global descriptor dimension must be positive");
    const Eigen::Index dim = features.front().descriptor.size();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    for (const Feature& f : features) {
        if (f.descriptor.size() != dim) throw ConfigError("descriptor dimension mismatch while pooling");
        sum += f.descriptor.cast<double>();
    }
    const Eigen::VectorXd mean = sum / static_cast<double>(features.size());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(global_dim);
    const Eigen::Index n = std::min<Eigen::Index>(dim, global_dim);
    g.head(n) = mean.head(n);
    const double norm = g.norm();
    if (!(norm > 1e-9)) throw UnusableFrameError("pooled descriptor has zero norm");
    return (g / norm).cast<float>();
}

double cosine_similarity(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
    if (a.size() != b.size()) throw ConfigError("global descriptor dimension mismatch");
    return a.cast<double>().dot(b.cast<double>());
}

FeatureSet strongest_features(const FeatureSet& set, std::size_t cap) {
    if (cap == 0 || set.size() <= cap) return set;
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return set.features[a].score > set.features[b].score;
    });
    order.resize(cap);
    std::sort(order.begin(), order.end());
    FeatureSet out;
    out.image_size = set.image_size;
    out.global_descriptor = set.global_descriptor;
    out.features.reserve(cap);
    for (std::size_t i : order) out.features.push_back(set.features[i]);
    return out;
}

}  // namespace tnr
