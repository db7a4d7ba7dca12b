#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using nnec::Dataset;
using nnec::LoadOptions;

TEST(ParseDelimited, ReadsPlainNumbers) {
    const auto d = nnec::parse_delimited("1,2\n3,4\n5,6\n");
    EXPECT_EQ(d.n(), 3u);
    EXPECT_EQ(d.d(), 2u);
    EXPECT_FALSE(d.labels);
    EXPECT_EQ(d.points(2, 1), 6.0);
}

TEST(ParseDelimited, SplitsLabelColumn) {
    LoadOptions opt;
    opt.label_column = std::size_t{1};
    const auto d = nnec::parse_delimited("1,2\n3,4\n5,6", opt);
    EXPECT_EQ(d.d(), 1u);
    EXPECT_EQ(d.points(1, 0), 3.0);
    ASSERT_TRUE(d.labels);
    EXPECT_EQ(*d.labels, (std::vector<int>{0, 1, 2}));
}

TEST(ParseDelimited, LabelColumnByHeaderName) {
    LoadOptions opt;
    opt.has_header = true;
    opt.label_column = std::string("cls");
    const auto d = nnec::parse_delimited("a,cls,b\n1,y,2\n3,x,4\n5,y,6\n", opt);
    EXPECT_EQ(d.d(), 2u);
    EXPECT_EQ(*d.labels, (std::vector<int>{1, 0, 1}));
    EXPECT_EQ(d.points(2, 1), 6.0);
}

TEST(ParseDelimited, NumericLabelsEncodeInNumericOrder) {
    LoadOptions opt;
    opt.label_column = std::size_t{0};
    const auto d = nnec::parse_delimited("10,0\n9,1\n2,2\n", opt);
    EXPECT_EQ(*d.labels, (std::vector<int>{2, 1, 0}));
}

TEST(ParseDelimited, BadCellNamesRowAndColumn) {
    try {
        nnec::parse_delimited("1,2\n3,abc\n");
        FAIL() << "expected ParseError";
    } catch (const nnec::ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_EQ(e.column(), 2u);
        EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
    }
}

TEST(ParseDelimited, RejectsRaggedRowsAndEmptyInput) {
    EXPECT_THROW(nnec::parse_delimited("1,2\n3\n"), nnec::ParseError);
    EXPECT_THROW(nnec::parse_delimited(""), nnec::ValidationError);
    EXPECT_THROW(nnec::parse_delimited("1,2\n"), nnec::ValidationError);
    EXPECT_THROW(nnec::parse_delimited("1,nan\n2,3\n"), nnec::ParseError);
}

TEST(ParseDelimited, OtherDelimiters) {
    LoadOptions opt;
    opt.delimiter = '\t';
    const auto d = nnec::parse_delimited("1\t2\n3\t4\n", opt);
    EXPECT_EQ(d.d(), 2u);
}

TEST(LoadDelimited, MissingAndEmptyFiles) {
    const auto dir = fixture::scratch("load");
    EXPECT_THROW(nnec::load_delimited((dir / "none.csv").string()), nnec::IoError);
    fixture::write(dir / "empty.csv", "");
    EXPECT_THROW(nnec::load_delimited((dir / "empty.csv").string()), nnec::ValidationError);
    fixture::write(dir / "bad.csv", "1,2\nx,3\n");
    try {
        nnec::load_delimited((dir / "bad.csv").string());
        FAIL();
    } catch (const nnec::ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.csv"), std::string::npos);
        EXPECT_EQ(e.row(), 2u);
        EXPECT_EQ(e.column(), 1u);
    }
}

TEST(Standardize, SampleStandardDeviation) {
    Dataset d;
    d.points = fixture::column({0, 2});
    const auto s = nnec::standardize(d);
    EXPECT_DOUBLE_EQ(s.points(0, 0), 0.0);
    EXPECT_NEAR(s.points(1, 0), std::sqrt(2.0), 1e-15);
}

TEST(Standardize, ConstantColumnUnchanged) {
    Dataset d;
    d.points = fixture::column({5, 5, 5});
    EXPECT_EQ(nnec::standardize(d).points, d.points);
}

TEST(Standardize, IdempotentOnUnitVariance) {
    std::mt19937_64 rng(3);
    Dataset d;
    d.points = fixture::uniform(40, 3, rng);
    const auto once = nnec::standardize(d);
    const auto twice = nnec::standardize(once);
    EXPECT_LE((once.points - twice.points).cwiseAbs().maxCoeff(), 1e-12);
}

namespace {

double pairwise_max_error(const nnec::PointMatrix& a, const nnec::PointMatrix& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.rows(); ++j) {
            worst = std::max(worst, std::abs(std::sqrt(oracle::sq_dist(a, i, j)) - std::sqrt(oracle::sq_dist(b, i, j))));
        }
    }
    return worst;
}

}  // namespace

TEST(PcaReduce, IdentityWhenNarrow) {
    std::mt19937_64 rng(1);
    Dataset d;
    d.points = fixture::uniform(10, 2, rng);
    EXPECT_EQ(nnec::pca_reduce(d, 100).points, d.points);
}

TEST(PcaReduce, LineInThreeDimensionsKeepsDistances) {
    Dataset d;
    d.points.resize(25, 3);
    for (Eigen::Index i = 0; i < 25; ++i) {
        const double t = 0.37 * static_cast<double>(i * i % 17) - 2.0;
        d.points.row(i) << 1.0 + 2.0 * t, -0.5 * t, 3.0 + t;
    }
    const auto r = nnec::pca_reduce(d, 1);
    ASSERT_EQ(r.d(), 1u);
    EXPECT_LE(pairwise_max_error(d.points, r.points), 1e-9);
}

TEST(PcaReduce, ScoresHaveDescendingVarianceAndSignConvention) {
    std::mt19937_64 rng(11);
    Dataset d;
    d.points = fixture::uniform(60, 6, rng);
    d.points.col(0) *= 5.0;
    d.points.col(3) *= 3.0;
    const auto r = nnec::pca_reduce(d, 4);
    ASSERT_EQ(r.d(), 4u);
    std::vector<double> var;
    for (Eigen::Index c = 0; c < 4; ++c) {
        const auto col = r.points.col(c);
        EXPECT_NEAR(col.mean(), 0.0, 1e-12);
        var.push_back(col.squaredNorm());
    }
    for (std::size_t c = 1; c < var.size(); ++c) {
        EXPECT_GE(var[c - 1], var[c]);
    }
}

TEST(PcaReduce, RankDeficientInputKeepsDistances) {
    std::mt19937_64 rng(5);
    Dataset d;
    d.points = fixture::uniform(30, 5, rng);
    nnec::Dataset wide = d;
    wide.points.conservativeResize(Eigen::NoChange, 6);
    wide.points.col(5) = d.points.col(0) - d.points.col(1);
    EXPECT_LE(pairwise_max_error(wide.points, nnec::pca_reduce(wide, 5).points), 1e-9);
}

TEST(Preprocess, Deterministic) {
    std::mt19937_64 rng(9);
    Dataset d;
    d.points = fixture::uniform(50, 8, rng);
    const auto a = nnec::preprocess(d, 3);
    const auto b = nnec::preprocess(d, 3);
    EXPECT_EQ(nnec::content_hash(a.points), nnec::content_hash(b.points));
    EXPECT_EQ(a.points, b.points);
}

TEST(ContentHash, SensitiveToShapeAndValues) {
    const auto a = fixture::column({1, 2, 3, 4});
    nnec::PointMatrix b = a;
    b.resize(2, 2);
    b << 1, 2, 3, 4;
    EXPECT_NE(nnec::content_hash(a), nnec::content_hash(b));
    nnec::PointMatrix c = a;
    c(3, 0) = std::nextafter(4.0, 5.0);
    EXPECT_NE(nnec::content_hash(a), nnec::content_hash(c));
    EXPECT_EQ(nnec::content_hash(a).size(), 16u);
}

TEST(Dataset, ValidateRejectsBadShapes) {
    Dataset d;
    d.points = fixture::column({1});
    EXPECT_THROW(d.validate(), nnec::ValidationError);
    d.points = fixture::column({1, 2});
    d.labels = std::vector<int>{0};
    EXPECT_THROW(d.validate(), nnec::ValidationError);
}
