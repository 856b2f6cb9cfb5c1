#include <billiards/scalar.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace billiards;
using Q = Rational;

TEST(Rational, StoredInLowestTerms) {
    Q q(6, -4);
    EXPECT_EQ(q.numerator(), -3);
    EXPECT_EQ(q.denominator(), 2);
    EXPECT_EQ(q.str(), "-3/2");
    EXPECT_EQ(Q(10, 5).str(), "2");
}

TEST(Rational, ZeroDenominatorThrows) { EXPECT_THROW(Q(1, 0), std::invalid_argument); }

TEST(Rational, ParsesLiterals) {
    EXPECT_EQ(Q::parse("115/1778"), Q(115, 1778));
    EXPECT_EQ(Q::parse(" -7 "), Q(-7));
    EXPECT_EQ(Q::parse("2.75"), Q(11, 4));
    EXPECT_EQ(Q::parse("-0.5"), Q(-1, 2));
    EXPECT_EQ(Q::parse(".25"), Q(1, 4));
    EXPECT_EQ(Q::parse("45/2"), Q(45, 2));
}

TEST(Rational, RejectsMalformedLiterals) {
    EXPECT_THROW(Q::parse("p/0"), std::invalid_argument);
    EXPECT_THROW(Q::parse("3/0"), std::invalid_argument);
    EXPECT_THROW(Q::parse(""), std::invalid_argument);
    EXPECT_THROW(Q::parse("1/2/3"), std::invalid_argument);
    EXPECT_THROW(Q::parse("abc"), std::invalid_argument);
    EXPECT_THROW(Q::parse("1.-5"), std::invalid_argument);
}

TEST(Rational, ArithmeticStaysCanonical) {
    Q a(1, 6), b(1, 3);
    EXPECT_EQ(a + b, Q(1, 2));
    EXPECT_EQ((a + b).denominator(), 2);
    EXPECT_EQ(a - b, Q(-1, 6));
    EXPECT_EQ(a * b, Q(1, 18));
    EXPECT_EQ(a / b, Q(1, 2));
    EXPECT_THROW(a / Q(0), std::domain_error);
    EXPECT_LT(a, b);
    EXPECT_EQ(-a, Q(-1, 6));
}

TEST(Rational, FromDoubleIsExact) {
    EXPECT_EQ(Q::from_double(0.375), Q(3, 8));
    EXPECT_EQ(Q::from_double(0.1).to_double(), 0.1);
    EXPECT_THROW(Q::from_double(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST(Rational, FieldAxiomsOnRandomValues) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> d(-50, 50), den(1, 40);
    for (int i = 0; i < 500; ++i) {
        Q a(d(rng), den(rng)), b(d(rng), den(rng)), c(d(rng), den(rng));
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        if (!b.is_zero()) {
            EXPECT_EQ((a / b) * b, a);
        }
        EXPECT_GT(a.denominator(), 0);
    }
}

TEST(ScalarTraits, FloatSignUsesScaledTolerance) {
    using F = ScalarTraits<double>;
    EXPECT_EQ(F::sign(1e-10), 0);
    EXPECT_EQ(F::sign(1e-8), 1);
    EXPECT_EQ(F::sign(-5e-9, 10.0), 0);
    EXPECT_EQ(F::sign(-5e-8, 10.0), -1);
    EXPECT_FALSE(F::exact);
    EXPECT_TRUE(ScalarTraits<Q>::exact);
    EXPECT_EQ(ScalarTraits<Q>::sign(Q(-1, 1000000000)), -1);
}
