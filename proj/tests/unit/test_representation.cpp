#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "intimacy/error.hpp"
#include "intimacy/random.hpp"
#include "intimacy/representation.hpp"

namespace intimacy {
namespace {

std::size_t occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string words(const std::string& stem, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += stem + std::to_string(i);
  }
  return out;
}

TEST(Render, JointMatchesTableByteForByte) {
  for (const auto& row : testing::representation_rows()) {
    const TweetRecord record{"r", row.original, row.language, 2.0};
    EXPECT_EQ(render(record, std::string_view(row.translated), Strategy::joint).text, row.joint)
        << row.language;
  }
}

TEST(Render, OriginalAndTranslated) {
  const auto& row = testing::representation_rows()[2];
  const TweetRecord record{"r", row.original, row.language, 2.0};
  EXPECT_EQ(render(record, std::string_view(row.translated), Strategy::translated).text,
            "@user It's normal when it doesn't work out");
  EXPECT_EQ(render(record, std::nullopt, Strategy::original).text, row.original);
}

TEST(Render, EnglishJointRepeatsText) {
  const TweetRecord record{"r", "hello", "en", 2.0};
  EXPECT_EQ(render(record, std::nullopt, Strategy::joint).text, "hello </s></s> hello");
  EXPECT_EQ(render(record, std::nullopt, Strategy::translated).text, "hello");
}

TEST(Render, MissingTranslationPolicy) {
  const TweetRecord record{"r7", "hola", "es", 2.0};
  try {
    render(record, std::nullopt, Strategy::translated);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::rendering);
    EXPECT_EQ(e.subjects(), std::vector<std::string>{"r7"});
  }
  EXPECT_EQ(render(record, std::nullopt, Strategy::joint, MissingTranslation::fallback_original).text,
            "hola </s></s> hola");
}

TEST(Render, SeparatorInTextIsRenderingError) {
  const TweetRecord record{"r", "a </s></s> b", "es", 2.0};
  try {
    render(record, std::string_view("c"), Strategy::joint);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::rendering);
  }
}

TEST(RenderDataset, KeepsOrderAndHandlesEmpty) {
  EXPECT_TRUE(render_dataset(Dataset{}, {}, Strategy::joint).empty());
  Dataset d{{{"b", "x", "en", 1.0}, {"a", "hola", "es", 1.0}}};
  const auto out = render_dataset(d, {{"a", "hello"}}, Strategy::joint);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].record_id, "b");
  EXPECT_EQ(out[1].text, "hola </s></s> hello");
}

TEST(Strategy, NamesRoundTrip) {
  for (auto s : {Strategy::original, Strategy::translated, Strategy::joint}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_strategy("both"), Error);
}

TEST(Truncate, ShortInputUnchanged) {
  const RenderedInput in{"r", Strategy::original, words("w", 10)};
  EXPECT_EQ(truncate(in, 128), in);
}

TEST(Truncate, JointTrimsTranslatedSideFirst) {
  // 80 + separator + 80 = 161 tokens; a 128 budget leaves 128 − 80 − 1 = 47
  // tokens for the English side.
  const RenderedInput in{"r", Strategy::joint, words("o", 80) + " </s></s> " + words("t", 80)};
  const auto out = truncate(in, 128);
  const auto parts = split_joint(out.text);
  ASSERT_TRUE(parts);
  EXPECT_EQ(parts->first, words("o", 80));
  EXPECT_EQ(parts->second, words("t", 47));
  EXPECT_EQ(occurrences(out.text, kSeparator), 1u);
}

TEST(Truncate, OriginalSideTrimmedOnceTranslatedIsExhausted) {
  const RenderedInput in{"r", Strategy::joint, words("o", 20) + " </s></s> " + words("t", 5)};
  const auto out = truncate(in, 10);
  EXPECT_EQ(out.text, words("o", 9) + " </s></s> ");
  EXPECT_EQ(occurrences(out.text, kSeparator), 1u);
}

TEST(Truncate, PlainInputDropsTrailingWords) {
  const RenderedInput in{"r", Strategy::translated, words("w", 30)};
  EXPECT_EQ(truncate(in, 8).text, words("w", 8));
  EXPECT_THROW(truncate(in, 7), Error);
}

TEST(Truncate, JointInvariantsHoldForRandomInputs) {
  SeededRng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t a = 1 + rng.below(150);
    const std::size_t b = 1 + rng.below(150);
    const std::size_t budget = 8 + rng.below(200);
    const std::string original = words("o", a);
    const std::string translated = words("t", b);
    const RenderedInput in{"r", Strategy::joint, original + " </s></s> " + translated};
    const auto out = truncate(in, budget);
    EXPECT_EQ(occurrences(out.text, kSeparator), 1u);
    EXPECT_LE(whitespace_token_count(out.text), std::max<std::size_t>(budget, 1));
    const auto parts = split_joint(out.text);
    ASSERT_TRUE(parts);
    EXPECT_TRUE(original.starts_with(parts->first));
    EXPECT_TRUE(translated.starts_with(parts->second));
    // The original side is only cut when the English side is already empty.
    if (parts->first.size() < original.size()) EXPECT_TRUE(parts->second.empty());
  }
}

TEST(SplitJoint, RecoversBothHalves) {
  for (const auto& row : testing::representation_rows()) {
    const auto parts = split_joint(row.joint);
    ASSERT_TRUE(parts);
    EXPECT_EQ(parts->first, row.original);
    EXPECT_EQ(parts->second, row.translated);
  }
  EXPECT_FALSE(split_joint("no separator"));
}

TEST(Tsv, EscapeRoundTrip) {
  for (const std::string s : {"plain", "tab\there", "new\nline", "back\\slash\\t", "cr\r\n", ""}) {
    const auto escaped = escape_tsv_field(s);
    EXPECT_EQ(escaped.find('\t'), std::string::npos);
    EXPECT_EQ(escaped.find('\n'), std::string::npos);
    EXPECT_EQ(unescape_tsv_field(escaped), s);
  }
  testing::TempDir dir("tsv");
  const std::vector<RenderedInput> inputs{{"1", Strategy::joint, "a\tb </s></s> c"},
                                          {"2", Strategy::joint, "x\\ny"}};
  write_rendered_tsv(dir / "in.tsv", inputs);
  EXPECT_EQ(read_rendered_tsv(dir / "in.tsv"), inputs);
}

}  // namespace
}  // namespace intimacy
