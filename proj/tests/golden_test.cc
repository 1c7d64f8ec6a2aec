// Replays the protocol transcripts in tests/golden against SessionHub and
// compares every server frame byte for byte. With PROXSIM_REGENERATE_GOLDEN
// set, the expected frames are rewritten from the current implementation.
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "proxsim/session/session.h"
#include "session_driver.h"
#include "test_util.h"

namespace proxsim {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

const fs::path kGoldenDir = fs::path(PROXSIM_TEST_DATA) / "golden";

struct Transcript {
  ordered_json header;
  std::vector<ordered_json> ops;  // everything but recv lines
  std::vector<ordered_json> lines;
};

Transcript load(const fs::path& path) {
  Transcript t;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line);
    t.lines.push_back(j);
    if (j["op"] == "hub") {
      t.header = j;
    } else if (j["op"] != "recv") {
      t.ops.push_back(j);
    }
  }
  return t;
}

ordered_json recv(ClientId client, const std::string& text) {
  return {{"op", "recv"}, {"client", client}, {"text", text}};
}

// Runs the ops and returns the full transcript they produce.
std::vector<ordered_json> play(const Transcript& t) {
  SessionConfig defaults = make_session_config(t.header.at("condition").get<std::string>(),
                                               t.header.at("seed").get<std::uint64_t>());
  defaults.debug = t.header.value("debug", false);
  defaults.practice = t.header.value("practice", false);
  defaults.practice_tasks = t.header.value("practice_tasks", 4);
  SessionHub hub(defaults);

  std::vector<ordered_json> out{t.header};
  auto emit = [&](const std::vector<SessionHub::Outbound>& frames) {
    for (const auto& f : frames) out.push_back(recv(f.client, f.text));
  };
  std::map<ClientId, std::string> session_of;
  for (const ordered_json& op : t.ops) {
    out.push_back(op);
    const std::string kind = op["op"];
    if (kind == "send") {
      const ClientId client = op["client"];
      const auto frames = hub.handle_message(client, op["text"].get<std::string>());
      for (const auto& f : frames) {
        const auto j = ordered_json::parse(f.text);
        if (j["type"] == "config") session_of[client] = j["session"];
      }
      emit(frames);
    } else if (kind == "tick") {
      for (int i = 0, n = op.value("count", 1); i < n; ++i) emit(hub.tick_all());
    } else if (kind == "drive") {
      // Steer with the straight-line client until the session ends; only
      // the frames of the final tick are kept.
      const ClientId client = op["client"];
      Session* session = hub.find(session_of.at(client));
      long long seq = op.value("first_seq", 1);
      auto frames = hub.tick_all();
      while (!session->finished()) {
        for (const auto& f : frames) {
          if (f.client == client) hub.handle_message(client, test::steer_message(f.text, seq++));
        }
        frames = hub.tick_all();
      }
      emit(frames);
    } else {
      ADD_FAILURE() << "unknown op " << kind;
    }
  }
  return out;
}

class GoldenTranscript : public ::testing::TestWithParam<std::string> {};

TEST_P(GoldenTranscript, FramesMatchByteForByte) {
  const fs::path path = kGoldenDir / (GetParam() + ".jsonl");
  const Transcript t = load(path);
  const std::vector<ordered_json> actual = play(t);

  if (std::getenv("PROXSIM_REGENERATE_GOLDEN")) {
    std::ofstream out(path);
    for (const auto& j : actual) out << j.dump() << '\n';
    GTEST_SKIP() << "regenerated " << path;
  }

  ASSERT_EQ(actual.size(), t.lines.size()) << "frame count differs";
  for (std::size_t i = 0; i < actual.size(); ++i) {
    EXPECT_EQ(actual[i].dump(), t.lines[i].dump()) << path.filename() << " line " << i + 1;
  }
}

std::vector<std::string> transcripts() {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(kGoldenDir)) {
    if (e.path().extension() == ".jsonl") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

INSTANTIATE_TEST_SUITE_P(Protocol, GoldenTranscript, ::testing::ValuesIn(transcripts()),
                         [](const auto& info) { return info.param; });

// Facts the transcripts must show regardless of their exact bytes.
TEST(GoldenContent, TranscriptsCoverTheProtocol) {
  std::set<std::string> seen;
  for (const std::string& name : transcripts()) {
    for (const auto& line : load(kGoldenDir / (name + ".jsonl")).lines) {
      if (line["op"] != "recv") continue;
      const auto frame = ordered_json::parse(line["text"].get<std::string>());
      std::string type = frame["type"];
      if (type == "error") type += ":" + frame["code"].get<std::string>();
      seen.insert(type);
    }
  }
  for (const char* want : {"config", "state", "trial_done", "error:bad_json", "error:bad_type",
                           "error:not_joined", "error:bad_input", "error:session_over"}) {
    EXPECT_TRUE(seen.contains(want)) << want;
  }
}

TEST(GoldenContent, ClampAndStaleTranscriptsShowTheRules) {
  auto states = [](const std::string& name) {
    std::vector<ordered_json> out;
    for (const auto& line : load(kGoldenDir / (name + ".jsonl")).lines) {
      if (line["op"] != "recv") continue;
      auto f = ordered_json::parse(line["text"].get<std::string>());
      if (f["type"] == "state") out.push_back(f);
    }
    return out;
  };
  auto pos = [](const ordered_json& f) {
    return Vec2{f["agents"][1]["x"].get<double>(), f["agents"][1]["y"].get<double>()};
  };
  const double step = TrialConfig{}.participant_phi.v_max * kTickSeconds;

  const auto clamp = states("input_clamp");
  ASSERT_GE(clamp.size(), 2u);
  EXPECT_NEAR((pos(clamp[1]) - pos(clamp[0])).norm(), step, 1e-12);

  const auto stale = states("stale_seq");
  ASSERT_GE(stale.size(), 3u);
  // seq 7 points to -x; the later seq 5 toward +x is discarded.
  EXPECT_LT(pos(stale[1]).x, pos(stale[0]).x);
  EXPECT_LT(pos(stale[2]).x, pos(stale[1]).x);
}

}  // namespace
}  // namespace proxsim
