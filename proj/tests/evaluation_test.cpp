#include <gtest/gtest.h>

#include <random>

#include "vulnprio/triage.hpp"

using namespace vulnprio::triage;
using Matrix = std::vector<std::vector<std::size_t>>;

namespace {

constexpr int kThree[] = {0, 1, 2};
constexpr int kTwo[] = {0, 1};

}  // namespace

TEST(Evaluate, PerfectPredictions) {
    const std::vector<int> y = {0, 1, 2, 2, 1, 0, 0};
    const EvalReport r = evaluate_predictions(kThree, y, y);
    EXPECT_DOUBLE_EQ(r.micro_f, 1.0);
    EXPECT_DOUBLE_EQ(r.macro_f, 1.0);
    EXPECT_DOUBLE_EQ(r.weighted_f, 1.0);
}

// Expected values below are exact fractions worked out by hand from each
// matrix (rows = truth, columns = prediction).
TEST(Evaluate, HandComputedThreeClassMatrix) {
    const EvalReport r = report_from_confusion(kThree, Matrix{{2, 1, 0}, {0, 2, 0}, {1, 0, 4}});
    EXPECT_NEAR(r.per_class[0].precision, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.per_class[0].recall, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.per_class[0].f1, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.per_class[1].precision, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.per_class[1].recall, 1.0, 1e-9);
    EXPECT_NEAR(r.per_class[1].f1, 0.8, 1e-9);
    EXPECT_NEAR(r.per_class[2].precision, 1.0, 1e-9);
    EXPECT_NEAR(r.per_class[2].recall, 0.8, 1e-9);
    EXPECT_NEAR(r.per_class[2].f1, 8.0 / 9.0, 1e-9);
    EXPECT_NEAR(r.micro_f, 0.8, 1e-9);
    EXPECT_NEAR(r.macro_f, 106.0 / 135.0, 1e-9);
    EXPECT_NEAR(r.weighted_f, 181.0 / 225.0, 1e-9);
    EXPECT_EQ(r.per_class[0].support, 3u);
    EXPECT_EQ(r.per_class[1].support, 2u);
    EXPECT_EQ(r.per_class[2].support, 5u);
}

TEST(Evaluate, HandComputedBinaryMatrix) {
    const EvalReport r = report_from_confusion(kTwo, Matrix{{5, 0}, {3, 2}});
    EXPECT_NEAR(r.per_class[0].f1, 10.0 / 13.0, 1e-9);
    EXPECT_NEAR(r.per_class[1].f1, 4.0 / 7.0, 1e-9);
    EXPECT_NEAR(r.micro_f, 0.7, 1e-9);
    EXPECT_NEAR(r.macro_f, 61.0 / 91.0, 1e-9);
    EXPECT_NEAR(r.weighted_f, 61.0 / 91.0, 1e-9);
}

TEST(Evaluate, NeverPredictedClassScoresZero) {
    const EvalReport r = report_from_confusion(kThree, Matrix{{3, 0, 1}, {2, 0, 0}, {0, 0, 4}});
    EXPECT_EQ(r.per_class[1].precision, 0.0);
    EXPECT_EQ(r.per_class[1].f1, 0.0);
    EXPECT_NEAR(r.per_class[0].f1, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.per_class[2].f1, 8.0 / 9.0, 1e-9);
    EXPECT_NEAR(r.micro_f, 0.7, 1e-9);
    EXPECT_NEAR(r.macro_f, 14.0 / 27.0, 1e-9);
    EXPECT_NEAR(r.weighted_f, 28.0 / 45.0, 1e-9);
}

TEST(Evaluate, AbsentClassLeftOutOfMacroAverage) {
    const EvalReport r = report_from_confusion(kThree, Matrix{{3, 1, 0}, {1, 3, 0}, {0, 0, 0}});
    EXPECT_NEAR(r.macro_f, 0.75, 1e-9);
    EXPECT_NEAR(r.weighted_f, 0.75, 1e-9);
}

TEST(Evaluate, ConfusionRowsMatchSupports) {
    const std::vector<int> truth = {0, 0, 1, 2, 2, 2, 1};
    const std::vector<int> pred = {0, 1, 1, 2, 0, 2, 2};
    const EvalReport r = evaluate_predictions(kThree, truth, pred);
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t row = 0;
        for (std::size_t v : r.confusion[i]) row += v;
        EXPECT_EQ(row, r.per_class[i].support);
    }
    EXPECT_EQ(r.total, 7u);
}

TEST(Evaluate, MicroFEqualsAccuracyOnRandomPredictions) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + uniform_below(rng, 200);
        std::vector<int> truth(n);
        std::vector<int> pred(n);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<int>(uniform_below(rng, 3));
            pred[i] = static_cast<int>(uniform_below(rng, 3));
            correct += truth[i] == pred[i];
        }
        const EvalReport r = evaluate_predictions(kThree, truth, pred);
        ASSERT_NEAR(r.micro_f, static_cast<double>(correct) / static_cast<double>(n), 1e-12);
        ASSERT_DOUBLE_EQ(r.micro_f, r.accuracy);
        for (const auto& c : r.per_class) {
            ASSERT_GE(c.f1, 0.0);
            ASSERT_LE(c.f1, 1.0);
        }
    }
}

TEST(Evaluate, MacroEqualsWeightedWhenSupportsEqual) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t per_class = 1 + uniform_below(rng, 20);
        std::vector<int> truth;
        std::vector<int> pred;
        for (int c = 0; c < 3; ++c) {
            for (std::size_t i = 0; i < per_class; ++i) {
                truth.push_back(c);
                pred.push_back(static_cast<int>(uniform_below(rng, 3)));
            }
        }
        const EvalReport r = evaluate_predictions(kThree, truth, pred);
        ASSERT_NEAR(r.macro_f, r.weighted_f, 1e-12);
    }
}

TEST(Evaluate, EmptyTestSetRejected) {
    try {
        evaluate_predictions(kThree, {}, {});
        FAIL();
    } catch (const MlError& e) {
        EXPECT_EQ(e.kind(), MlError::Kind::EmptyTestSet);
    }
    LinearModel model;
    EXPECT_THROW(evaluate(model, {}), MlError);
}

TEST(Evaluate, UnknownCategoryRejected) {
    const std::vector<int> truth = {0, 3};
    const std::vector<int> pred = {0, 0};
    EXPECT_THROW(evaluate_predictions(kThree, truth, pred), MlError);
}
