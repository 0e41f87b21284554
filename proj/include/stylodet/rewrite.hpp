// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stylodet/corpus.hpp"
#include "stylodet/error.hpp"

namespace stylodet {

// Default rewrite instructions for the two corpus styles.
inline constexpr std::string_view kGptDatasetPrompt =
    "The messages I send you will be in Java code. I want you to rewrite all of it while maintaining "
    "functionality.";
inline constexpr std::string_view kGptGcjPrompt =
    "This is java code. Rewrite it entirely while maintaining functionality.";

inline constexpr std::string_view kEndpointEnv = "STYLODET_ENDPOINT";
inline constexpr std::string_view kModelEnv = "STYLODET_MODEL";

// Raised after the retry budget is spent on transport or HTTP failures.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};
};

struct RewriteSettings {
  std::string endpoint_url;  // OpenAI-compatible chat-completions URL
  std::string model_name;
  std::string prompt{kGptDatasetPrompt};
  std::size_t max_chars_per_request = 4000;
  std::string api_key_env = "OPENAI_API_KEY";
  RetryPolicy retry;
  std::chrono::seconds timeout{120};

  void validate() const;
  // Unset keys keep their defaults.
  static RewriteSettings from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  // STYLODET_ENDPOINT / STYLODET_MODEL take precedence over file values.
  void apply_environment();
};

struct RewriteJob {
  std::filesystem::path source_path;
  std::filesystem::path output_path;
  RewriteSettings settings;
};

// Splits on line boundaries so each chunk stays within max_chars; a single
// longer line is cut at max_chars.
std::vector<std::string> chunk_source(std::string_view text, std::size_t max_chars);

// Returns the contents of ``` fenced blocks (concatenated) or the text
// unchanged when it has no fences.
std::string strip_code_fences(std::string_view response);

// Minimal chat-completions client over cpp-httplib.
class ChatClient {
 public:
  ChatClient(std::string endpoint_url, std::string api_key, std::chrono::seconds timeout);

  // Single attempt. Throws TransportError on connection failure, non-2xx
  // status or an unparseable body.
  std::string complete(const std::string& model, const std::string& system_prompt, const std::string& user_content);

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

// Serialises request starts so consecutive requests are at least `interval`
// apart across all workers.
class RateLimiter {
 public:
  explicit RateLimiter(std::chrono::milliseconds interval) : interval_(interval) {}
  void acquire();

 private:
  std::mutex mutex_;
  std::chrono::milliseconds interval_;
  std::chrono::steady_clock::time_point next_{};
};

struct RewriteOutcome {
  std::string text;
  std::size_t requests = 0;  // chunks sent
  std::size_t attempts = 0;  // including retries
};

// Sends each chunk with retry and exponential backoff, strips fences and
// concatenates in order. Throws Error("empty rewrite") on an empty reply.
RewriteOutcome rewrite_text(std::string_view source, const RewriteSettings& settings, ChatClient& client,
                            RateLimiter* limiter = nullptr);

// Reads the source, rewrites it and writes output_path atomically.
RewriteOutcome rewrite_file(const RewriteJob& job, RateLimiter* limiter = nullptr);

struct BatchOptions {
  std::size_t parallelism = 2;
  std::chrono::milliseconds min_request_interval{0};
};

// Per-job error message, or nullopt on success.
std::vector<std::optional<std::string>> rewrite_files(std::span<const RewriteJob> jobs, const BatchOptions& options);

// Adds (or replaces) the llm-origin manifest entry for a rewritten file.
const FileEntry& register_rewrite(CorpusManifest& manifest, const std::string& relative_path,
                                  const std::string& model_name, const std::string& author, std::string_view text);

}  // namespace stylodet
