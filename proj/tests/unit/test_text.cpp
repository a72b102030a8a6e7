#include <gtest/gtest.h>

#include <random>
#include <string>

#include "memforge/corpus.hpp"
#include "memforge/digest.hpp"
#include "memforge/text.hpp"

using memforge::hash_document;
using memforge::normalize_text;

TEST(NormalizeText, CollapsesPunctuationAndCase) {
    EXPECT_EQ(normalize_text("  High-Grade   Tumor. "), "high grade tumor");
    EXPECT_EQ(normalize_text("Ki-67 (MIB-1)"), "ki 67 mib 1");
    EXPECT_EQ(normalize_text(""), "");
}

TEST(NormalizeText, CompatibilityFormsFold) {
    // Fullwidth letters and the "fi" ligature fold under NFKC.
    EXPECT_EQ(normalize_text("\xEF\xBC\xA7\xEF\xBC\xA2\xEF\xBC\xAD"), "gbm");
    EXPECT_EQ(normalize_text("\xEF\xAC\x81" "brosis"), "fibrosis");
    EXPECT_EQ(normalize_text("Tumor\xC2\xA0\tGrade\n"), "tumor grade");
    EXPECT_EQ(normalize_text("!!!"), "");
}

TEST(NormalizeText, IdempotentOnFuzzedCorpus) {
    std::mt19937_64 rng(1234);
    // Mix of ASCII, punctuation, Latin-1, Greek, CJK, ligatures, combining marks.
    const std::vector<std::string> atoms{
        "a", "Z", "9", " ", "\t", "-", ".", "(", ")", "\xC3\x89", "\xC3\x9F", "\xCE\xA3",
        "\xCE\xB1", "\xE4\xB8\xAD", "\xEF\xAC\x81", "\xCC\x81", "\xE2\x85\xA0", "\xC4\xB0",
        "\xEF\xBC\xA1", "\xE2\x91\xA0", "\xC2\xB5", "\xE1\xBA\x9E", "'", "\xE2\x80\x94"};
    std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
    std::uniform_int_distribution<int> len(0, 24);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        for (int n = len(rng); n > 0; --n) s += atoms[pick(rng)];
        const std::string once = normalize_text(s);
        ASSERT_EQ(normalize_text(once), once) << "input: " << s;
        ASSERT_EQ(once.find("  "), std::string::npos);
        if (!once.empty()) {
            ASSERT_NE(once.front(), ' ');
            ASSERT_NE(once.back(), ' ');
        }
    }
}

// Reference digests computed independently with Python's hashlib.
TEST(HashDocument, MatchesReferenceSha256) {
    EXPECT_EQ(hash_document("").hex(),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(hash_document("a").hex(),
              "ca978112ca1bbdcafac231b39a23dc4da786eff8147c4e72b9807785afee48bb");
    EXPECT_EQ(hash_document("b").hex(),
              "3e23e8160039594a33894f6564e1b1348bbd7a0088d42c4acb73eeaed59c009d");
    EXPECT_EQ(hash_document("glioblastoma").hex(),
              "305256e32c276e9ce94061412cd2c07bb3ff3212dec37458c11918a3de1a8f58");
}

TEST(HashDocument, DeterministicAndDiscriminating) {
    EXPECT_EQ(hash_document("same text"), hash_document("same text"));
    EXPECT_NE(hash_document("a"), hash_document("b"));
}

TEST(Digest, HexRoundTrip) {
    const auto d = hash_document("round trip");
    const auto back = memforge::Digest::from_hex(d.hex());
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, d);
    EXPECT_FALSE(memforge::Digest::from_hex("zz").has_value());
    EXPECT_FALSE(memforge::Digest::from_hex(std::string(64, 'g')).has_value());
}

TEST(Document, DigestTracksNormalizedText) {
    const auto doc = memforge::make_document("pmid:1", "  GBM shows NECROSIS. ");
    EXPECT_EQ(doc.normalized_text, "gbm shows necrosis");
    EXPECT_EQ(doc.digest, hash_document(doc.normalized_text));
    EXPECT_EQ(normalize_text(doc.normalized_text), doc.normalized_text);
}
