// Copyright 2026 The myolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "myolab/transport.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "httplib.h"
#include "json.hpp"
#include "myolab/util.h"

namespace myolab {

using nlohmann::json;

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig cfg;
  if (const char* v = std::getenv("MYOLAB_ENDPOINT_URL")) cfg.url = v;
  if (const char* v = std::getenv("MYOLAB_ENDPOINT_MODEL")) cfg.model = v;
  if (const char* v = std::getenv("MYOLAB_API_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("MYOLAB_ENDPOINT_TIMEOUT")) {
    cfg.timeout_s = std::atof(v);
  }
  return cfg;
}

HttpTransport::HttpTransport(EndpointConfig config)
    : config_(std::move(config)) {
  if (config_.url.empty()) {
    throw TransportError("endpoint url not configured (MYOLAB_ENDPOINT_URL)");
  }
}

std::string HttpTransport::post(const std::string& request_body) {
  // split scheme://host[:port]/path
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("malformed endpoint url: " + config_.url);
  }
  const auto path_begin = config_.url.find('/', scheme_end + 3);
  const std::string origin =
      path_begin == std::string::npos ? config_.url
                                      : config_.url.substr(0, path_begin);
  const std::string path =
      path_begin == std::string::npos ? "/" : config_.url.substr(path_begin);

  httplib::Client client(origin);
  client.set_connection_timeout(static_cast<int>(config_.timeout_s), 0);
  client.set_read_timeout(static_cast<int>(config_.timeout_s), 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post(path, headers, request_body, "application/json");
  if (!res) {
    throw TransportError("endpoint request failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("endpoint returned status " +
                         std::to_string(res->status) + ": " + res->body);
  }
  return res->body;
}

namespace {

std::string transcript_name(int counter, const char* kind) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d.%s.json", counter, kind);
  return buf;
}

}  // namespace

RecordingTransport::RecordingTransport(Transport& inner, std::string dir,
                                       int start_counter)
    : inner_(inner), dir_(std::move(dir)), counter_(start_counter) {
  std::filesystem::create_directories(dir_);
}

std::string RecordingTransport::post(const std::string& request_body) {
  const int id = counter_++;
  write_file_atomic(dir_ + "/" + transcript_name(id, "request"), request_body);
  const std::string response = inner_.post(request_body);
  write_file_atomic(dir_ + "/" + transcript_name(id, "response"), response);
  return response;
}

ReplayTransport::ReplayTransport(std::string dir) : dir_(std::move(dir)) {}

std::string ReplayTransport::post(const std::string& request_body) {
  const int id = counter_++;
  const std::string req_path = dir_ + "/" + transcript_name(id, "request");
  const std::string res_path = dir_ + "/" + transcript_name(id, "response");
  if (!std::filesystem::exists(req_path)) {
    throw TransportError("replay transcript exhausted at " + req_path);
  }
  const std::string recorded = read_file(req_path);
  if (recorded != request_body) {
    throw TransportError("replay request mismatch at " + req_path);
  }
  return read_file(res_path);
}

ScriptedTransport::ScriptedTransport(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ScriptedTransport::post(const std::string& request_body) {
  requests_.push_back(request_body);
  if (next_ >= responses_.size()) {
    throw TransportError("scripted transport exhausted");
  }
  return responses_[next_++];
}

std::string base64_encode(const std::string& bytes) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) |
                       (static_cast<uint8_t>(bytes[i + 1]) << 8) |
                       static_cast<uint8_t>(bytes[i + 2]);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back(alphabet[v & 63]);
  }
  if (i + 1 == bytes.size()) {
    const uint32_t v = static_cast<uint8_t>(bytes[i]) << 16;
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const uint32_t v = (static_cast<uint8_t>(bytes[i]) << 16) |
                       (static_cast<uint8_t>(bytes[i + 1]) << 8);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string build_chat_request(const std::string& model,
                               const std::vector<ChatMessage>& messages,
                               double temperature) {
  json body;
  body["model"] = model;
  body["temperature"] = temperature;
  body["messages"] = json::array();
  for (const auto& msg : messages) {
    json jm;
    jm["role"] = msg.role;
    jm["content"] = json::array();
    for (const auto& part : msg.parts) {
      if (part.kind == ContentPart::Kind::kText) {
        jm["content"].push_back({{"type", "text"}, {"text", part.text}});
      } else {
        jm["content"].push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url",
                "data:image/png;base64," + base64_encode(part.png_bytes)}}}});
      }
    }
    body["messages"].push_back(std::move(jm));
  }
  return body.dump();
}

bool validate_chat_request(const std::string& body, std::string* error) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return fail("request is not valid JSON");
  if (!j.is_object()) return fail("request must be a JSON object");
  if (!j.contains("model") || !j["model"].is_string()) {
    return fail("missing string field 'model'");
  }
  if (!j.contains("messages") || !j["messages"].is_array() ||
      j["messages"].empty()) {
    return fail("missing non-empty array field 'messages'");
  }
  for (const auto& m : j["messages"]) {
    if (!m.is_object() || !m.contains("role") || !m["role"].is_string()) {
      return fail("message missing string field 'role'");
    }
    const std::string role = m["role"];
    if (role != "system" && role != "user" && role != "assistant") {
      return fail("message role must be system|user|assistant");
    }
    if (!m.contains("content") || !m["content"].is_array()) {
      return fail("message missing array field 'content'");
    }
    for (const auto& part : m["content"]) {
      if (!part.is_object() || !part.contains("type")) {
        return fail("content part missing 'type'");
      }
      const std::string type = part["type"];
      if (type == "text") {
        if (!part.contains("text") || !part["text"].is_string()) {
          return fail("text part missing string field 'text'");
        }
      } else if (type == "image_url") {
        if (!part.contains("image_url") || !part["image_url"].is_object() ||
            !part["image_url"].contains("url") ||
            !part["image_url"]["url"].is_string()) {
          return fail("image part missing image_url.url");
        }
        const std::string url = part["image_url"]["url"];
        if (url.rfind("data:image/png;base64,", 0) != 0) {
          return fail("image url must be a png data url");
        }
      } else {
        return fail("content part type must be text|image_url");
      }
    }
  }
  if (j.contains("temperature") && !j["temperature"].is_number()) {
    return fail("'temperature' must be a number");
  }
  return true;
}

std::string extract_response_content(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw TransportError("response is not valid JSON");
  if (!j.contains("choices") || !j["choices"].is_array() ||
      j["choices"].empty()) {
    throw TransportError("response missing choices[0]");
  }
  const auto& choice = j["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw TransportError("response missing choices[0].message.content");
  }
  return choice["message"]["content"];
}

}  // namespace myolab
