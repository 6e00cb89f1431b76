#include <algorithm>

#include "vulnprio/triage.hpp"

namespace vulnprio::triage {
namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::size_t class_index(std::span<const int> classes, int category) {
    auto it = std::find(classes.begin(), classes.end(), category);
    if (it == classes.end()) {
        throw MlError(MlError::Kind::InvalidLabel, "category " + std::to_string(category) + " is not in the class list");
    }
    return static_cast<std::size_t>(it - classes.begin());
}

}  // namespace

EvalReport report_from_confusion(std::span<const int> classes,
                                 const std::vector<std::vector<std::size_t>>& confusion) {
    const std::size_t k = classes.size();
    if (confusion.size() != k ||
        std::any_of(confusion.begin(), confusion.end(), [k](const auto& row) { return row.size() != k; })) {
        throw MlError(MlError::Kind::DimensionMismatch, "confusion matrix must be square over the class list");
    }

    EvalReport report;
    report.confusion = confusion;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < k; ++i) {
        ClassMetrics m;
        m.category = classes[i];
        for (std::size_t j = 0; j < k; ++j) {
            m.support += confusion[i][j];
            m.predicted += confusion[j][i];
        }
        const std::size_t tp = confusion[i][i];
        correct += tp;
        report.total += m.support;
        m.precision = ratio(tp, m.predicted);
        m.recall = ratio(tp, m.support);
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        report.per_class.push_back(m);
    }
    if (report.total == 0) throw MlError(MlError::Kind::EmptyTestSet, "no examples to evaluate");

    // Single-label: every miss is one FP and one FN, so micro P = R = accuracy.
    report.accuracy = ratio(correct, report.total);
    const double micro_p = ratio(correct, report.total);
    const double micro_r = ratio(correct, report.total);
    report.micro_f = micro_p + micro_r > 0.0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;

    std::size_t active = 0;
    double macro_sum = 0.0;
    double weighted_sum = 0.0;
    for (const ClassMetrics& m : report.per_class) {
        if (m.support == 0 && m.predicted == 0) continue;
        ++active;
        macro_sum += m.f1;
        weighted_sum += m.f1 * static_cast<double>(m.support);
    }
    report.macro_f = active == 0 ? 0.0 : macro_sum / static_cast<double>(active);
    report.weighted_f = weighted_sum / static_cast<double>(report.total);
    return report;
}

EvalReport evaluate_predictions(std::span<const int> classes, std::span<const int> truth,
                                std::span<const int> predicted) {
    if (truth.size() != predicted.size()) {
        throw MlError(MlError::Kind::DimensionMismatch, "truth and prediction counts differ");
    }
    if (truth.empty()) throw MlError(MlError::Kind::EmptyTestSet, "test set is empty");
    std::vector<std::vector<std::size_t>> confusion(classes.size(), std::vector<std::size_t>(classes.size(), 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++confusion[class_index(classes, truth[i])][class_index(classes, predicted[i])];
    }
    return report_from_confusion(classes, confusion);
}

EvalReport evaluate(const LinearModel& model, std::span<const LabeledDocument> test_set) {
    if (test_set.empty()) throw MlError(MlError::Kind::EmptyTestSet, "test set is empty");
    std::vector<int> truth;
    std::vector<int> predicted;
    truth.reserve(test_set.size());
    predicted.reserve(test_set.size());
    for (const LabeledDocument& doc : test_set) {
        truth.push_back(doc.label);
        predicted.push_back(predict(model, featurize(model.vocabulary, doc.text)).category);
    }
    return evaluate_predictions(model.classes, truth, predicted);
}

}  // namespace vulnprio::triage
