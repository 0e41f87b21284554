// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "stylodet/rewrite.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "stylodet/parallel.hpp"

namespace stylodet {

void RewriteSettings::validate() const {
  if (prompt.empty()) throw InputError("rewrite prompt must be non-empty");
  if (max_chars_per_request == 0) throw InputError("max_chars_per_request must be > 0");
  if (endpoint_url.empty()) throw InputError("rewrite endpoint is not configured");
  if (model_name.empty()) throw InputError("rewrite model is not configured");
  if (retry.max_attempts < 1) throw InputError("retry.max_attempts must be >= 1");
}

RewriteSettings RewriteSettings::from_json(const nlohmann::json& doc) {
  RewriteSettings s;
  try {
    s.endpoint_url = doc.value("endpoint", s.endpoint_url);
    s.model_name = doc.value("model", s.model_name);
    if (doc.contains("prompt")) {
      const auto p = doc["prompt"].get<std::string>();
      s.prompt = p == "gpt" ? std::string(kGptDatasetPrompt) : p == "gcj" ? std::string(kGptGcjPrompt) : p;
    }
    s.max_chars_per_request = doc.value("max_chars", s.max_chars_per_request);
    s.api_key_env = doc.value("api_key_env", s.api_key_env);
    s.timeout = std::chrono::seconds(doc.value("timeout_s", static_cast<long>(s.timeout.count())));
    if (doc.contains("retry")) {
      const auto& r = doc["retry"];
      s.retry.max_attempts = r.value("max_attempts", s.retry.max_attempts);
      s.retry.initial_backoff =
          std::chrono::milliseconds(r.value("initial_backoff_ms", static_cast<long>(s.retry.initial_backoff.count())));
      s.retry.multiplier = r.value("multiplier", s.retry.multiplier);
      s.retry.max_backoff =
          std::chrono::milliseconds(r.value("max_backoff_ms", static_cast<long>(s.retry.max_backoff.count())));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("rewrite settings: ") + ex.what());
  }
  return s;
}

nlohmann::json RewriteSettings::to_json() const {
  return {{"endpoint", endpoint_url},
          {"model", model_name},
          {"prompt", prompt},
          {"max_chars", max_chars_per_request},
          {"api_key_env", api_key_env},
          {"timeout_s", timeout.count()},
          {"retry",
           {{"max_attempts", retry.max_attempts},
            {"initial_backoff_ms", retry.initial_backoff.count()},
            {"multiplier", retry.multiplier},
            {"max_backoff_ms", retry.max_backoff.count()}}}};
}

void RewriteSettings::apply_environment() {
  if (const char* e = std::getenv(std::string(kEndpointEnv).c_str()); e && *e) endpoint_url = e;
  if (const char* m = std::getenv(std::string(kModelEnv).c_str()); m && *m) model_name = m;
}

std::vector<std::string> chunk_source(std::string_view text, std::size_t max_chars) {
  if (max_chars == 0) throw InputError("max_chars_per_request must be > 0");
  std::vector<std::string> chunks;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    std::string_view line = text.substr(pos, end - pos);
    pos = end;
    if (current.size() + line.size() <= max_chars) {
      current += line;
      continue;
    }
    if (!current.empty()) chunks.push_back(std::move(current));
    current.clear();
    while (line.size() > max_chars) {
      chunks.emplace_back(line.substr(0, max_chars));
      line.remove_prefix(max_chars);
    }
    current = std::string(line);
  }
  if (!current.empty()) chunks.push_back(std::move(current));
  return chunks;
}

std::string strip_code_fences(std::string_view response) {
  std::string out;
  bool inside = false;
  bool any_fence = false;
  std::size_t pos = 0;
  std::size_t block_start = 0;
  while (pos < response.size()) {
    const std::size_t nl = response.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? response.size() : nl + 1;
    std::string_view line = response.substr(pos, end - pos);
    const auto first = line.find_first_not_of(" \t");
    const bool fence = first != std::string_view::npos && line.substr(first).starts_with("```");
    if (fence) {
      any_fence = true;
      if (inside) out.append(response.substr(block_start, pos - block_start));
      else block_start = end;
      inside = !inside;
    }
    pos = end;
  }
  if (!any_fence) return std::string(response);
  if (inside) out.append(response.substr(block_start));
  return out;
}

// --- HTTP -----------------------------------------------------------------

ChatClient::ChatClient(std::string endpoint_url, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme_end = endpoint_url.find("://");
  if (scheme_end == std::string::npos) throw InputError("endpoint must be an http(s) URL: " + endpoint_url);
  const auto path_start = endpoint_url.find('/', scheme_end + 3);
  base_ = endpoint_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : endpoint_url.substr(path_start);
  if (path_ == "/") path_ = "/v1/chat/completions";
}

std::string ChatClient::complete(const std::string& model, const std::string& system_prompt,
                                 const std::string& user_content) {
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const nlohmann::json body{
      {"model", model},
      {"messages",
       {{{"role", "system"}, {"content", system_prompt}}, {{"role", "user"}, {"content", user_content}}}}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw TransportError("request to " + base_ + path_ + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  try {
    if (reply.is_discarded()) throw TransportError("endpoint returned invalid JSON");
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string{} : content.get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    throw TransportError(std::string("unexpected completion payload: ") + ex.what());
  }
}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

RewriteOutcome rewrite_text(std::string_view source, const RewriteSettings& settings, ChatClient& client,
                            RateLimiter* limiter) {
  if (source.empty()) throw InputError("cannot rewrite an empty source");
  RewriteOutcome outcome;
  for (const auto& chunk : chunk_source(source, settings.max_chars_per_request)) {
    std::string reply;
    auto backoff = settings.retry.initial_backoff;
    for (int attempt = 1;; ++attempt) {
      if (limiter) limiter->acquire();
      ++outcome.attempts;
      try {
        reply = client.complete(settings.model_name, settings.prompt, chunk);
        break;
      } catch (const TransportError&) {
        if (attempt >= settings.retry.max_attempts) throw;
        std::this_thread::sleep_for(backoff);
        backoff = std::min(settings.retry.max_backoff,
                           std::chrono::milliseconds(static_cast<long>(static_cast<double>(backoff.count()) *
                                                                       settings.retry.multiplier)));
      }
    }
    ++outcome.requests;
    std::string code = strip_code_fences(reply);
    if (code.find_first_not_of(" \t\r\n") == std::string::npos) throw Error("empty rewrite");
    if (!outcome.text.empty() && outcome.text.back() != '\n') outcome.text += '\n';
    outcome.text += code;
  }
  return outcome;
}

RewriteOutcome rewrite_file(const RewriteJob& job, RateLimiter* limiter) {
  job.settings.validate();
  const std::string source = read_text_file(job.source_path);
  const char* key = std::getenv(job.settings.api_key_env.c_str());
  ChatClient client(job.settings.endpoint_url, key ? key : "", job.settings.timeout);
  RewriteOutcome outcome = rewrite_text(source, job.settings, client, limiter);
  write_text_file_atomic(job.output_path, outcome.text);
  return outcome;
}

std::vector<std::optional<std::string>> rewrite_files(std::span<const RewriteJob> jobs, const BatchOptions& options) {
  std::vector<std::optional<std::string>> errors(jobs.size());
  RateLimiter limiter(options.min_request_interval);
  parallel_for(jobs.size(), std::max<std::size_t>(1, options.parallelism), [&](std::size_t i) {
    try {
      rewrite_file(jobs[i], &limiter);
    } catch (const std::exception& ex) {
      errors[i] = jobs[i].source_path.string() + ": " + ex.what();
    }
  });
  return errors;
}

const FileEntry& register_rewrite(CorpusManifest& manifest, const std::string& relative_path,
                                  const std::string& model_name, const std::string& author, std::string_view text) {
  FileEntry e;
  e.path = relative_path;
  e.author = author;
  e.origin = Origin::llm;
  e.llm_model = model_name;
  e.formatted = false;
  e.line_count = count_physical_lines(text);
  manifest.upsert(std::move(e));
  manifest.validate();
  return *manifest.find(relative_path);
}

}  // namespace stylodet
