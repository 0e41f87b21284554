// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "stylodet/corpus.hpp"
#include "stylodet/error.hpp"
#include "stylodet/rewrite.hpp"
#include "test_support.hpp"

using namespace stylodet;
using stylodet::test::TempDir;

namespace {

// Local chat-completions endpoint whose reply is computed from the user message.
class StubEndpoint {
 public:
  using Handler = std::function<std::pair<int, std::string>(const std::string& user, int call)>;

  explicit StubEndpoint(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      {
        std::lock_guard lock(mutex_);
        requests_.push_back(body);
        auth_ = req.get_header_value("Authorization");
      }
      const auto [status, content] = handler_(body["messages"][1]["content"].get<std::string>(), calls_++);
      res.status = status;
      const nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int calls() const { return calls_; }
  std::vector<nlohmann::json> requests() {
    std::lock_guard lock(mutex_);
    return requests_;
  }
  std::string auth() {
    std::lock_guard lock(mutex_);
    return auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  std::mutex mutex_;
  std::vector<nlohmann::json> requests_;
  std::string auth_;
};

std::string source_of(std::size_t chars) {
  // 100-character lines
  std::string text;
  for (std::size_t i = 0; text.size() < chars; ++i) {
    std::string line = "    int v" + std::to_string(i) + " = " + std::to_string(i) + ";";
    line.resize(99, ' ');
    text += line + "\n";
  }
  text.resize(chars);
  return text;
}

RewriteSettings settings_for(const StubEndpoint& stub) {
  RewriteSettings s;
  s.endpoint_url = stub.url();
  s.model_name = "stub-model";
  s.retry.initial_backoff = std::chrono::milliseconds(1);
  s.retry.max_backoff = std::chrono::milliseconds(4);
  s.timeout = std::chrono::seconds(10);
  return s;
}

StubEndpoint::Handler echo() {
  return [](const std::string& user, int) { return std::pair{200, user}; };
}

}  // namespace

TEST(ChunkSource, LineBoundaries) {
  EXPECT_EQ(chunk_source(source_of(3500), 4000).size(), 1u);
  const auto chunks = chunk_source(source_of(9000), 4000);
  ASSERT_EQ(chunks.size(), 3u);
  std::string joined;
  for (const auto& c : chunks) {
    EXPECT_LE(c.size(), 4000u);
    joined += c;
  }
  EXPECT_EQ(joined, source_of(9000));
  EXPECT_EQ(chunks[0].back(), '\n');
}

TEST(ChunkSource, OverlongLineIsCut) {
  const auto chunks = chunk_source(std::string(10, 'x') + "\n", 4);
  std::string joined;
  for (const auto& c : chunks) {
    EXPECT_LE(c.size(), 4u);
    joined += c;
  }
  EXPECT_EQ(joined, std::string(10, 'x') + "\n");
}

TEST(StripCodeFences, Variants) {
  EXPECT_EQ(strip_code_fences("```java\nclass A {}\n```\n"), "class A {}\n");
  EXPECT_EQ(strip_code_fences("Here you go:\n```\nint x;\n```\nDone."), "int x;\n");
  EXPECT_EQ(strip_code_fences("class A {}\n"), "class A {}\n");
  EXPECT_EQ(strip_code_fences("```java\na\n```\ntext\n```java\nb\n```"), "a\nb\n");
}

TEST(RewriteSettings, ValidationAndJson) {
  RewriteSettings s;
  EXPECT_THROW(s.validate(), InputError);
  s.endpoint_url = "https://api.example.com/v1/chat/completions";
  s.model_name = "m";
  EXPECT_NO_THROW(s.validate());
  s.prompt.clear();
  EXPECT_THROW(s.validate(), InputError);
  s.prompt = "p";
  s.max_chars_per_request = 0;
  EXPECT_THROW(s.validate(), InputError);

  const auto gcj = RewriteSettings::from_json({{"endpoint", "http://h/x"}, {"model", "m"}, {"prompt", "gcj"}});
  EXPECT_EQ(gcj.prompt, kGptGcjPrompt);
  EXPECT_EQ(RewriteSettings::from_json(gcj.to_json()).to_json(), gcj.to_json());
  EXPECT_EQ(RewriteSettings{}.prompt, kGptDatasetPrompt);
}

TEST(RewriteSettings, EnvironmentOverride) {
  RewriteSettings s;
  s.endpoint_url = "http://config/";
  ::setenv(std::string(kEndpointEnv).c_str(), "http://env/", 1);
  ::setenv(std::string(kModelEnv).c_str(), "env-model", 1);
  s.apply_environment();
  ::unsetenv(std::string(kEndpointEnv).c_str());
  ::unsetenv(std::string(kModelEnv).c_str());
  EXPECT_EQ(s.endpoint_url, "http://env/");
  EXPECT_EQ(s.model_name, "env-model");
}

TEST(RewriteText, SmallFileOneRequest) {
  StubEndpoint stub(echo());
  ChatClient client(stub.url(), "secret", std::chrono::seconds(10));
  const std::string src = source_of(3500);
  const auto out = rewrite_text(src, settings_for(stub), client);
  EXPECT_EQ(out.requests, 1u);
  EXPECT_EQ(stub.calls(), 1);
  EXPECT_EQ(out.text, src);
  const auto req = stub.requests().at(0);
  EXPECT_EQ(req["model"], "stub-model");
  EXPECT_EQ(req["messages"][0]["role"], "system");
  EXPECT_EQ(req["messages"][0]["content"], kGptDatasetPrompt);
  EXPECT_EQ(stub.auth(), "Bearer secret");
}

TEST(RewriteText, LargeFileThreeRequestsInOrder) {
  StubEndpoint stub(echo());
  ChatClient client(stub.url(), "", std::chrono::seconds(10));
  const std::string src = source_of(9000);
  const auto out = rewrite_text(src, settings_for(stub), client);
  EXPECT_EQ(out.requests, 3u);
  EXPECT_EQ(stub.calls(), 3);
  EXPECT_EQ(out.text, src);
}

TEST(RewriteText, FencedReplyStrippedByteForByte) {
  const std::string inner = "public class A {\n\tint x = 1; // \"q\"\n}\n";
  StubEndpoint stub([&](const std::string&, int) { return std::pair{200, "Sure!\n```java\n" + inner + "```\n"}; });
  ChatClient client(stub.url(), "", std::chrono::seconds(10));
  EXPECT_EQ(rewrite_text("class A {}\n", settings_for(stub), client).text, inner);
}

TEST(RewriteText, RetriesTransientFailures) {
  StubEndpoint stub([](const std::string& user, int call) {
    return call < 2 ? std::pair{503, std::string("busy")} : std::pair{200, user};
  });
  ChatClient client(stub.url(), "", std::chrono::seconds(10));
  const auto out = rewrite_text("class A {}\n", settings_for(stub), client);
  EXPECT_EQ(out.attempts, 3u);
  EXPECT_EQ(out.text, "class A {}\n");
}

TEST(RewriteText, GivesUpAfterMaxAttempts) {
  StubEndpoint stub([](const std::string&, int) { return std::pair{500, std::string("down")}; });
  ChatClient client(stub.url(), "", std::chrono::seconds(10));
  auto s = settings_for(stub);
  s.retry.max_attempts = 3;
  EXPECT_THROW(rewrite_text("class A {}\n", s, client), TransportError);
  EXPECT_EQ(stub.calls(), 3);
}

TEST(RewriteText, EmptyReply) {
  StubEndpoint stub([](const std::string&, int) { return std::pair{200, std::string("```java\n```\n")}; });
  ChatClient client(stub.url(), "", std::chrono::seconds(10));
  try {
    rewrite_text("class A {}\n", settings_for(stub), client);
    FAIL() << "expected empty rewrite error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "empty rewrite");
  }
}

TEST(RewriteFiles, WritesOutputsAndRegistersManifestEntries) {
  StubEndpoint stub(echo());
  TempDir dir;
  write_text_file_atomic(dir / "in/A.java", "class A {}\n");
  write_text_file_atomic(dir / "in/B.java", "class B {}\n");
  std::vector<RewriteJob> jobs;
  for (const char* name : {"A.java", "B.java"}) {
    jobs.push_back({dir / "in" / name, dir / "llm/stub" / name, settings_for(stub)});
  }
  const auto errors = rewrite_files(jobs, BatchOptions{2, std::chrono::milliseconds(1)});
  for (const auto& e : errors) EXPECT_FALSE(e) << *e;
  EXPECT_EQ(read_text_file(dir / "llm/stub/B.java"), "class B {}\n");

  CorpusManifest manifest;
  manifest.root = dir.path().string();
  const auto& entry = register_rewrite(manifest, "llm/stub/A.java", "stub-model", "llm",
                                       read_text_file(dir / "llm/stub/A.java"));
  EXPECT_EQ(entry.origin, Origin::llm);
  EXPECT_EQ(entry.llm_model, "stub-model");
  EXPECT_EQ(entry.line_count, 1u);
}

TEST(RewriteFiles, UnreachableEndpointReportedPerFile) {
  TempDir dir;
  write_text_file_atomic(dir / "A.java", "class A {}\n");
  RewriteSettings s;
  s.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  s.model_name = "m";
  s.retry.max_attempts = 2;
  s.retry.initial_backoff = std::chrono::milliseconds(1);
  s.timeout = std::chrono::seconds(2);
  const std::vector<RewriteJob> jobs{{dir / "A.java", dir / "out/A.java", s}};
  const auto errors = rewrite_files(jobs, {});
  ASSERT_TRUE(errors[0]);
  EXPECT_FALSE(std::filesystem::exists(dir / "out/A.java"));
}
