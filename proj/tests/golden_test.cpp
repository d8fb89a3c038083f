#include "support/transcript.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

// Set TESSERA_UPDATE_GOLDEN=1 to rewrite the expected transcripts.
class GoldenTranscript : public ::testing::TestWithParam<std::string> {};

TEST_P(GoldenTranscript, MatchesByteForByte) {
    const std::string model = GetParam();
    const auto commands = testutil::read_file(testutil::golden_path(model, ".commands.jsonl"));
    ASSERT_FALSE(commands.empty());
    const auto actual = testutil::run_transcript(commands);
    const auto path = testutil::golden_path(model, ".transcript.jsonl");
    if (const char* update = std::getenv("TESSERA_UPDATE_GOLDEN"); update && std::string(update) == "1") {
        std::ofstream(path, std::ios::binary) << actual;
    }
    EXPECT_EQ(actual, testutil::read_file(path));
    EXPECT_EQ(actual, testutil::run_transcript(commands));
}

INSTANTIATE_TEST_SUITE_P(Models, GoldenTranscript, ::testing::Values("game_of_life", "pastoral", "institutions"));
