#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "synthetic_corpus.hpp"
#include "vulnprio/scoring.hpp"
#include "vulnprio/triage.hpp"

using namespace vulnprio;
using namespace vulnprio::scoring;

namespace {

const std::filesystem::path kFixtures = std::filesystem::path(VULNPRIO_FIXTURE_DIR) / "sample";

CveId id(const char* text) { return *CveId::parse(text); }
Decimal dec(const char* text) { return *Decimal::parse(text); }

struct SampleTrio {
    std::vector<feed::CveRecord> records;
    wx::WxTable wx;
    std::map<CveId, feed::LabeledExample> labels;
    std::vector<feed::AssetContext> assets;
};

SampleTrio load_sample() {
    SampleTrio t;
    t.records = feed::load_cve_records(kFixtures / "cves.jsonl");
    t.wx = wx::count_wx(feed::merge_references(feed::load_exploit_refs(kFixtures / "exploits.jsonl").groups, t.records));
    const auto labels = feed::load_labels(kFixtures / "labels.jsonl");
    t.labels = feed::index_labels(labels);
    t.assets = feed::load_asset_context(kFixtures / "assets.jsonl");
    return t;
}

const ScoredVulnerability& find(const ScoringResult& r, const char* cve) {
    for (const auto& s : r.scored) {
        if (s.cve == id(cve)) return s;
    }
    throw std::runtime_error(std::string("not scored: ") + cve);
}

TriageLabels labels(int u, int o) { return {*utility_from_int(u), *opportune_from_int(o), Labeler::SME}; }

}  // namespace

TEST(ThreatScore, SampleRowsExact) {
    const EnvironmentalFactors neutral;
    EXPECT_EQ(threat_score(cvss::Score::parse("8.1"), 26, labels(2, 0), neutral), dec("102.3"));
    EXPECT_EQ(threat_score(cvss::Score::parse("7.5"), 2, labels(0, 0), neutral), dec("9.5"));
    EXPECT_EQ(threat_score(cvss::Score::parse("6.8"), 0, labels(2, 1), neutral), dec("40.8"));
}

TEST(ThreatScore, MultiplierTable) {
    EXPECT_EQ(utility_multiplier(Utility::NotUseful), 1);
    EXPECT_EQ(utility_multiplier(Utility::Chaining), 2);
    EXPECT_EQ(utility_multiplier(Utility::Objective), 3);
    EXPECT_EQ(opportune_multiplier(Opportune::No), 1);
    EXPECT_EQ(opportune_multiplier(Opportune::Yes), 2);
    const cvss::Score five = cvss::Score::parse("5.0");
    for (int u = 0; u <= 2; ++u) {
        for (int o = 0; o <= 1; ++o) {
            EXPECT_EQ(threat_score(five, 0, labels(u, o), {}), Decimal::from_integer(5) * ((u + 1) * (o + 1)));
        }
    }
}

TEST(ThreatScore, NeutralCaseEqualsCvss) {
    for (int tenths = 0; tenths <= 100; ++tenths) {
        const auto s = cvss::Score::from_tenths(tenths);
        ASSERT_EQ(threat_score(s, 0, labels(0, 0), {}), s.to_decimal());
    }
}

TEST(ThreatScore, StrictlyMonotone) {
    std::mt19937_64 rng(31337);
    const EnvWeights weights;
    const std::array<Exposure, 2> exposures = {Exposure::Public, Exposure::Private};
    const std::array<Criticality, 3> crits = {Criticality::Low, Criticality::Medium, Criticality::High};
    int checked = 0;
    while (checked < 10000) {
        const auto s = cvss::Score::from_tenths(static_cast<int>(triage::uniform_below(rng, 101)));
        const std::uint64_t wx = triage::uniform_below(rng, 500);
        if (s.tenths() == 0 && wx == 0) continue;
        const int u = static_cast<int>(triage::uniform_below(rng, 3));
        const int o = static_cast<int>(triage::uniform_below(rng, 2));
        std::optional<feed::AssetContext> ctx;
        if (triage::uniform_below(rng, 2) == 1) {
            ctx = feed::AssetContext{"a", id("CVE-2021-1000"), exposures[triage::uniform_below(rng, 2)],
                                     crits[triage::uniform_below(rng, 3)]};
        }
        const EnvironmentalFactors env = env_factor(ctx, weights);
        const Decimal base = threat_score(s, wx, labels(u, o), env);

        const Decimal step = env.product * ((u + 1) * (o + 1));
        ASSERT_EQ(threat_score(s, wx + 1, labels(u, o), env), base + step);
        if (u < 2) ASSERT_GT(threat_score(s, wx, labels(u + 1, o), env), base);
        if (o < 1) ASSERT_GT(threat_score(s, wx, labels(u, o + 1), env), base);
        ++checked;
    }
}

TEST(ThreatScore, UnboundedForLargeWx) {
    EXPECT_EQ(threat_score(cvss::Score::parse("10.0"), 1'000'000, labels(2, 1), {}), dec("6000060.0"));
}

TEST(EnvFactor, DefaultTable) {
    const EnvWeights weights;
    EXPECT_EQ(env_factor(std::nullopt, weights).product, Decimal::from_integer(1));
    const feed::AssetContext exposed{"gw", id("CVE-2017-0143"), Exposure::Public, Criticality::High};
    EXPECT_EQ(env_factor(exposed, weights).product, dec("2.25"));
    const feed::AssetContext internal{"ci", id("CVE-2017-0143"), Exposure::Private, Criticality::Low};
    EXPECT_EQ(env_factor(internal, weights).product, Decimal::from_integer(1));
    const feed::AssetContext medium{"db", id("CVE-2017-0143"), Exposure::Public, Criticality::Medium};
    EXPECT_EQ(env_factor(medium, weights).product, dec("1.8"));
}

TEST(EnvFactor, RejectsBadWeights) {
    EnvWeights weights;
    weights.criticality_high = Decimal{};
    EXPECT_THROW(env_factor(std::nullopt, weights), ScoringError);
    weights = EnvWeights{};
    weights.exposure_public = dec("-1.5");
    EXPECT_THROW(weights.validate(), ScoringError);
    weights = EnvWeights{};
    weights.exposure_public = dec("1.23456");
    EXPECT_THROW(weights.validate(), ScoringError);
    weights.exposure_public = dec("1.2345");
    EXPECT_NO_THROW(weights.validate());
}

TEST(ScorePortfolio, SampleFixtureWithoutContext) {
    const SampleTrio t = load_sample();
    const ScoringResult r = score_portfolio(t.records, t.wx, t.labels, {}, EnvWeights{});
    ASSERT_EQ(r.scored.size(), 3u);
    EXPECT_EQ(find(r, "CVE-2017-0143").threat_score, dec("102.3"));
    EXPECT_EQ(find(r, "CVE-2019-11324").threat_score, dec("9.5"));
    EXPECT_EQ(find(r, "CVE-2020-27256").threat_score, dec("40.8"));
    EXPECT_GT(find(r, "CVE-2020-27256").threat_score, find(r, "CVE-2019-11324").threat_score);
    EXPECT_EQ(find(r, "CVE-2017-0143").wx.count, 26u);
    EXPECT_TRUE(r.warnings.empty());
    for (std::size_t i = 0; i < r.scored.size(); ++i) EXPECT_EQ(r.scored[i].cve, t.records[i].id);
}

TEST(ScorePortfolio, AssetContextScalesScores) {
    const SampleTrio t = load_sample();
    const ScoringResult r = score_portfolio(t.records, t.wx, t.labels, t.assets, EnvWeights{});
    EXPECT_EQ(find(r, "CVE-2017-0143").threat_score, dec("230.175"));  // 102.3 * 2.25
    EXPECT_EQ(find(r, "CVE-2019-11324").threat_score, dec("9.5"));
    EXPECT_EQ(find(r, "CVE-2020-27256").env.product, Decimal::from_integer(1));
}

TEST(ScorePortfolio, HighestContextWins) {
    const SampleTrio t = load_sample();
    std::vector<feed::AssetContext> contexts = {
        {"a", id("CVE-2019-11324"), Exposure::Private, Criticality::Medium},
        {"b", id("CVE-2019-11324"), Exposure::Public, Criticality::Low},
    };
    const ScoringResult r = score_portfolio(t.records, t.wx, t.labels, contexts, EnvWeights{});
    EXPECT_EQ(find(r, "CVE-2019-11324").env.product, dec("1.5"));
}

TEST(ScorePortfolio, NeutralRecordEqualsCvss) {
    feed::CveRecord rec{id("CVE-2022-0001"), "x", cvss::parse_vector("AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"), {}, {}};
    feed::LabeledExample label{rec.id, "", Utility::NotUseful, Opportune::No, Labeler::SME, {}};
    const std::vector<feed::CveRecord> records = {rec};
    const ScoringResult r = score_portfolio(records, {}, {{rec.id, label}}, {}, EnvWeights{});
    EXPECT_EQ(r.scored[0].threat_score, dec("9.8"));
}

TEST(ScorePortfolio, EmptyPortfolio) {
    EXPECT_TRUE(score_portfolio({}, {}, {}, {}, EnvWeights{}).scored.empty());
}

TEST(ScorePortfolio, MissingLabelsNamed) {
    SampleTrio t = load_sample();
    t.labels.erase(id("CVE-2019-11324"));
    try {
        score_portfolio(t.records, t.wx, t.labels, {}, EnvWeights{});
        FAIL();
    } catch (const ScoringError& e) {
        EXPECT_EQ(e.kind(), ScoringError::Kind::MissingLabels);
        EXPECT_EQ(e.missing_labels(), std::vector<CveId>{id("CVE-2019-11324")});
        EXPECT_NE(std::string(e.what()).find("CVE-2019-11324"), std::string::npos);
    }
}

TEST(ScorePortfolio, MissingCvssNamed) {
    SampleTrio t = load_sample();
    t.records[1].vector.reset();
    t.records[1].published_score.reset();
    try {
        score_portfolio(t.records, t.wx, t.labels, {}, EnvWeights{});
        FAIL();
    } catch (const ScoringError& e) {
        EXPECT_EQ(e.kind(), ScoringError::Kind::MissingCvss);
        EXPECT_EQ(e.missing_cvss(), std::vector<CveId>{t.records[1].id});
    }
}

TEST(ScorePortfolio, PublishedScoreUsedWithoutVector) {
    SampleTrio t = load_sample();
    t.records[0].vector.reset();
    const ScoringResult r = score_portfolio(t.records, t.wx, t.labels, {}, EnvWeights{});
    EXPECT_EQ(r.scored[0].cvss_origin, CvssOrigin::Published);
    EXPECT_EQ(r.scored[0].threat_score, dec("102.3"));
}

TEST(ScorePortfolio, VectorBeatsDisagreeingPublishedScore) {
    SampleTrio t = load_sample();
    t.records[0].published_score = cvss::Score::parse("9.3");
    const ScoringResult r = score_portfolio(t.records, t.wx, t.labels, {}, EnvWeights{});
    EXPECT_EQ(r.scored[0].cvss.value, cvss::Score::parse("8.1"));
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("9.3"), std::string::npos);
}

TEST(ScorePortfolio, PredictorFillsGapsAndMarksSource) {
    SampleTrio t = load_sample();
    t.labels.erase(id("CVE-2020-27256"));
    int calls = 0;
    const LabelPredictor predictor = [&](const feed::CveRecord&) -> std::optional<TriageLabels> {
        ++calls;
        return TriageLabels{Utility::Objective, Opportune::Yes, Labeler::SME};
    };
    const ScoringResult r = score_portfolio(t.records, t.wx, t.labels, {}, EnvWeights{}, predictor);
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(find(r, "CVE-2020-27256").labels.source, Labeler::Model);
    EXPECT_EQ(find(r, "CVE-2020-27256").threat_score, dec("40.8"));
    EXPECT_EQ(find(r, "CVE-2017-0143").labels.source, Labeler::SME);
}

TEST(ScorePortfolio, PartialModelLabelIsNotEnough) {
    SampleTrio t = load_sample();
    auto& label = t.labels.at(id("CVE-2019-11324"));
    label.opportune.reset();
    label.labeler = Labeler::Model;
    EXPECT_THROW(score_portfolio(t.records, t.wx, t.labels, {}, EnvWeights{}), ScoringError);
}

TEST(ScorePortfolio, SyntheticThousandAllScored) {
    const auto p = vulnprio::testing::synthetic_portfolio(1000, 0.05, 42);
    const auto labels = feed::index_labels(p.labels);
    const ScoringResult r = score_portfolio(p.records, wx::count_wx(p.references), labels, {}, EnvWeights{});
    ASSERT_EQ(r.scored.size(), 1000u);
    std::size_t exploited = 0;
    for (const auto& s : r.scored) {
        exploited += s.wx.count > 0;
        ASSERT_EQ(s.threat_score, threat_score(s.cvss.value, s.wx.count, s.labels, s.env));
    }
    EXPECT_EQ(exploited, 50u);
}
