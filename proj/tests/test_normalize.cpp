#include <gtest/gtest.h>

#include "sqlion/codec.hpp"
#include "sqlion/normalize.hpp"
#include "sqlion/rng.hpp"
#include "test_support.hpp"

using namespace sqlion;
using sqlion::testing::random_bytes;

TEST(Normalize, EmptyInput) {
    auto q = normalize("");
    EXPECT_EQ(q.l1, "");
    EXPECT_EQ(q.l2, "");
}

TEST(Normalize, InlineCommentEvasionCollapses) { EXPECT_EQ(normalize("uNiOn/**/all").l1, "unionall"); }

TEST(Normalize, ClassicTautology) {
    auto q = normalize("' or 1 = 1--");
    EXPECT_EQ(q.l1, "'or1=1--");
    EXPECT_EQ(q.l2, "'1=1--");
}

TEST(Normalize, CommentsStayVisibleOnSymbolicProjection) {
    auto q = normalize("union/*x*/select");
    EXPECT_EQ(q.l1, "unionselect");
    EXPECT_EQ(q.l2, "/**/");
}

TEST(Normalize, UnterminatedCommentRunsToEnd) { EXPECT_EQ(normalize("1 or/* 1=1").l1, "1or"); }

TEST(Normalize, CommentOpenerSplitByWhitespace) {
    EXPECT_EQ(normalize("a/ *b*/c").l1, "ac");
    EXPECT_EQ(normalize("//**/*x*/").l1, "");
}

TEST(Normalize, SymbolicProjectionDecodesOnce) {
    EXPECT_EQ(normalize("%27%20OR%201%3D1").l2, "'1=1");
    EXPECT_EQ(normalize("%2527").l2, "%27");
    EXPECT_EQ(normalize("&#39;&quot;&lt;&#x3e;").l2, "'\"<>");
    EXPECT_EQ(normalize("&amp;lt;").l2, "&;");
}

TEST(Normalize, MalformedEscapesPassThrough) {
    EXPECT_EQ(normalize("%zz%4").l2, "%%4");
    EXPECT_EQ(normalize("&unknown;&#;&#xZZ;").l2, "&;&#;&#;");
    EXPECT_EQ(normalize("&#1114112;").l2, "&#1114112;");
}

TEST(Normalize, WhitespaceClassIsRemoved) {
    auto q = normalize("a\tb\rc\nd\fe\vf g");
    EXPECT_EQ(q.l1, "abcdefg");
}

TEST(IsNormalForm, Examples) {
    EXPECT_TRUE(is_normal_form({"'or1=1--", ""}));
    EXPECT_FALSE(is_normal_form({"A B", ""}));
    EXPECT_FALSE(is_normal_form({"union/**/select", ""}));
}

TEST(Codec, PercentEncodeRoundTrip) {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        std::string s = random_bytes(rng, 40);
        EXPECT_EQ(codec::percent_decode(codec::percent_encode(s, "\t ,")), s);
    }
}

class NormalizeProperty : public ::testing::Test {
protected:
    Rng rng{20240601};
};

TEST_F(NormalizeProperty, Idempotent) {
    for (int i = 0; i < 2000; ++i) {
        std::string raw = random_bytes(rng, 64);
        auto l1 = normalize(raw).l1;
        ASSERT_EQ(normalize(l1).l1, l1) << codec::percent_encode(raw);
        ASSERT_TRUE(is_normal_form(normalize(raw)));
    }
}

TEST_F(NormalizeProperty, CaseInsensitive) {
    for (int i = 0; i < 2000; ++i) {
        std::string raw = random_bytes(rng, 64);
        std::string upper = raw;
        for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        ASSERT_EQ(normalize(raw).l1, normalize(upper).l1) << codec::percent_encode(raw);
    }
}

TEST_F(NormalizeProperty, WhitespaceInsensitive) {
    static const std::string spaces = " \t\r\n\f\v";
    for (int i = 0; i < 2000; ++i) {
        std::string raw = random_bytes(rng, 48);
        std::string spaced;
        for (char c : raw) {
            spaced.push_back(c);
            if (rng.chance(1, 3)) spaced.push_back(spaces[rng.below(spaces.size())]);
        }
        ASSERT_EQ(normalize(raw).l1, normalize(spaced).l1) << codec::percent_encode(raw);
    }
}

TEST_F(NormalizeProperty, ProjectionAlphabets) {
    for (int i = 0; i < 2000; ++i) {
        std::string raw = random_bytes(rng, 64);
        auto q = normalize(raw);
        for (unsigned char c : q.l2) ASSERT_FALSE(codec::is_ascii_alpha(c) || codec::is_space(c));
        for (unsigned char c : q.l1) ASSERT_FALSE((c >= 'A' && c <= 'Z') || codec::is_space(c));
        ASSERT_EQ(q.l1.find("/*"), std::string::npos);
    }
}

TEST_F(NormalizeProperty, Deterministic) {
    for (int i = 0; i < 200; ++i) {
        std::string raw = random_bytes(rng, 64);
        ASSERT_EQ(normalize(raw), normalize(raw));
    }
}
