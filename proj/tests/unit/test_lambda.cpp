#include <gtest/gtest.h>

#include "nnec/lambda.hpp"

using nnec::Lambda;

TEST(Lambda, ParsesDecimalsExactly) {
    EXPECT_EQ(Lambda::parse("2"), Lambda(2, 1));
    EXPECT_EQ(Lambda::parse("1.2"), Lambda(6, 5));
    EXPECT_EQ(Lambda::parse("0.5"), Lambda(1, 2));
    EXPECT_EQ(Lambda::parse(".25"), Lambda(1, 4));
    EXPECT_EQ(Lambda::parse("2.0"), Lambda::from_tenths(20));
}

TEST(Lambda, ParsesFractions) {
    EXPECT_EQ(Lambda::parse("4/3"), Lambda(4, 3));
    EXPECT_EQ(Lambda::parse("10/6"), Lambda(5, 3));
}

TEST(Lambda, RejectsMalformedInput) {
    for (const char* s : {"", ".", "-1", "1e3", "abc", "1.2.3", "0", "0/3", "3/0", "1.0000001", "+2"}) {
        EXPECT_THROW(Lambda::parse(s), nnec::ValidationError) << s;
    }
}

TEST(Lambda, OrdersByValue) {
    EXPECT_LT(Lambda(4, 3), Lambda(7, 5));
    EXPECT_GT(Lambda(3, 1), Lambda(29, 10));
    EXPECT_EQ(Lambda(6, 4) <=> Lambda(3, 2), std::strong_ordering::equal);
}

TEST(Lambda, AddsExactly) {
    EXPECT_EQ(Lambda(1, 3) + Lambda(1, 6), Lambda(1, 2));
    EXPECT_EQ((Lambda(4, 3) + Lambda(1, 3)).to_string(), "5/3");
}

TEST(Lambda, ApproximatesToThousandths) {
    EXPECT_EQ(Lambda::approximate(1.4), Lambda(7, 5));
    EXPECT_EQ(Lambda::approximate(1.0 / 3.0), Lambda(333, 1000));
    EXPECT_THROW(Lambda::approximate(0.0), nnec::ValidationError);
    EXPECT_THROW(Lambda::approximate(std::nan("")), nnec::ValidationError);
}

TEST(Lambda, Formats) {
    EXPECT_EQ(Lambda(2, 1).to_string(), "2");
    EXPECT_EQ(Lambda(8, 5).to_string(), "8/5");
    EXPECT_DOUBLE_EQ(Lambda(8, 5).value(), 1.6);
}
