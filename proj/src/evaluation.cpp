#include "fit2/felm_training.hpp"
#include "fit2/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fit2
{

double ConfusionMatrix::accuracy() const
{
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(tp() + tn()) / static_cast<double>(n);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other)
{
    for (int a = 0; a < 2; ++a)
        for (int p = 0; p < 2; ++p)
            counts[a][p] += other.counts[a][p];
    return *this;
}

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels)
{
    require_same_size(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(predictions.size()),
                      "confusion_matrix");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if ((labels[i] != 0 && labels[i] != 1) || (predictions[i] != 0 && predictions[i] != 1))
            throw ValidationError("confusion_matrix: labels must be 0 or 1");
        ++cm.counts[labels[i]][predictions[i]];
    }
    return cm;
}

ConfusionMatrix confusion_matrix(const Eigen::Ref<const Vector>& scores, const Eigen::Ref<const Vector>& targets,
                                 double threshold)
{
    require_same_size(targets.size(), scores.size(), "confusion_matrix");
    std::vector<int> pred(static_cast<std::size_t>(scores.size()));
    std::vector<int> lab(pred.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        pred[static_cast<std::size_t>(i)] = static_cast<int>(classify_score(scores(i), threshold));
        lab[static_cast<std::size_t>(i)] = targets(i) != 0.0 ? 1 : 0;
    }
    return confusion_matrix(pred, lab);
}

std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t folds, std::uint64_t seed)
{
    data.validate();
    if (folds < 2)
        throw ValidationError("cross-validation needs at least 2 folds");
    if (folds > data.samples())
        throw ValidationError("cross-validation: " + std::to_string(folds) + " folds exceed the " +
                              std::to_string(data.samples()) + " samples");

    // Canonical order: by label, then lexicographically by features. Fold
    // membership then depends on the rows' contents, not their positions.
    std::vector<std::size_t> order(data.samples());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        if (data.T(ia) != data.T(ib))
            return data.T(ia) < data.T(ib);
        for (Eigen::Index k = 0; k < data.X.cols(); ++k)
            if (data.X(ia, k) != data.X(ib, k))
                return data.X(ia, k) < data.X(ib, k);
        return false;
    });

    std::vector<std::size_t> fold_of(data.samples());
    Rng rng(seed, "folds");
    // Round-robin continues across classes, so per-fold class counts differ by
    // at most one and every fold is non-empty even when a class has fewer
    // members than there are folds (leave-one-out).
    std::size_t next = 0;
    for (double label : {0.0, 1.0}) {
        std::vector<std::size_t> members;
        for (std::size_t i : order)
            if (data.T(static_cast<Eigen::Index>(i)) == label)
                members.push_back(i);
        for (std::size_t i = members.size(); i > 1; --i)
            std::swap(members[i - 1], members[rng.below(i)]);
        for (std::size_t i : members)
            fold_of[i] = next++ % folds;
    }
    return fold_of;
}

EvalReport cross_validate(const Dataset& data, const TrainConfig& cfg, Trainer trainer, std::size_t folds)
{
    const auto fold_of = stratified_folds(data, folds, cfg.seed);

    // Rows in canonical order so each fold's matrices do not depend on row order.
    std::vector<std::size_t> order(data.samples());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (Eigen::Index k = 0; k < data.X.cols(); ++k)
            if (data.X(static_cast<Eigen::Index>(a), k) != data.X(static_cast<Eigen::Index>(b), k))
                return data.X(static_cast<Eigen::Index>(a), k) < data.X(static_cast<Eigen::Index>(b), k);
        return data.T(static_cast<Eigen::Index>(a)) < data.T(static_cast<Eigen::Index>(b));
    });

    EvalReport report;
    report.trainer = to_string(trainer);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows;
        std::vector<std::size_t> test_rows;
        for (std::size_t i : order)
            (fold_of[i] == f ? test_rows : train_rows).push_back(i);
        const Dataset train_set = data.subset(train_rows);
        const Dataset test_set = data.subset(test_rows);

        const TrainResult trained = train(trainer, train_set, cfg);
        FoldReport fr;
        fr.train_seconds = trained.train_seconds;
        fr.train_confusion = confusion_matrix(predict_rows(trained.model, train_set.X), train_set.T);
        fr.test_confusion = confusion_matrix(predict_rows(trained.model, test_set.X), test_set.T);
        fr.train_accuracy = fr.train_confusion.accuracy();
        fr.test_accuracy = fr.test_confusion.accuracy();
        report.test_confusion += fr.test_confusion;
        report.folds.push_back(fr);
    }

    const double k = static_cast<double>(folds);
    for (const auto& fr : report.folds) {
        report.mean_train_accuracy += fr.train_accuracy / k;
        report.mean_test_accuracy += fr.test_accuracy / k;
        report.mean_train_seconds += fr.train_seconds / k;
    }
    double var = 0.0;
    for (const auto& fr : report.folds)
        var += (fr.test_accuracy - report.mean_test_accuracy) * (fr.test_accuracy - report.mean_test_accuracy);
    report.std_test_accuracy = std::sqrt(var / (k - 1.0));
    return report;
}

} // namespace fit2
