#pragma once

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "librarylens/facets.hpp"
#include "librarylens/providers.hpp"

namespace librarylens {

// Generic chat-completion client: POSTs {"model", "messages", "temperature"}
// and reads choices[0].message.content (or a content[].text list).
class ChatCompletionClient : public LlmClient {
 public:
  explicit ChatCompletionClient(NormalizerConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("LLM endpoint is not configured");
    if (config_.api_key.empty()) throw ConfigError("LLM client requires an API key (LLM_API_KEY)");
  }

  std::string complete(const std::string& system_prompt, const std::string& user_prompt) override {
    auto url = detail::split_url(config_.endpoint);
    httplib::Client client(url.origin);
    const auto sec = config_.timeout_ms / 1000, usec = (config_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    json body{{"model", config_.model_id},
              {"temperature", 0},
              {"max_tokens", 4096},
              {"messages",
               json::array({{{"role", "system"}, {"content", system_prompt}},
                            {{"role", "user"}, {"content", user_prompt}}})}};
    httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) throw LlmError("LLM request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw LlmError("LLM returned HTTP " + std::to_string(res->status));
    try {
      auto doc = json::parse(res->body);
      if (doc.contains("choices")) return doc.at("choices").at(0).at("message").at("content").get<std::string>();
      if (doc.contains("content") && doc["content"].is_array()) {
        std::string out;
        for (const auto& part : doc["content"])
          if (part.value("type", "") == "text") out += part.value("text", "");
        return out;
      }
    } catch (const json::exception& e) {
      throw LlmError(std::string("malformed LLM response: ") + e.what());
    }
    throw LlmError("LLM response has no message content");
  }

 private:
  NormalizerConfig config_;
};

}  // namespace librarylens
