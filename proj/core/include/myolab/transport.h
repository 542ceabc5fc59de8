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

#ifndef MYOLAB_TRANSPORT_H_
#define MYOLAB_TRANSPORT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace myolab {

// Endpoint configuration comes from the environment, never from flags, so
// credentials stay out of shell history.
struct EndpointConfig {
  std::string url;      // MYOLAB_ENDPOINT_URL, e.g. http://host:port/v1/chat/completions
  std::string model;    // MYOLAB_ENDPOINT_MODEL
  std::string api_key;  // MYOLAB_API_KEY
  double timeout_s = 60.0;  // MYOLAB_ENDPOINT_TIMEOUT

  static EndpointConfig from_env();
};

// Byte-level chat transport: request body in, response body out. Keeping the
// interface at the string level lets transcripts be logged and replayed
// verbatim.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post(const std::string& request_body) = 0;
};

// Blocking HTTP client for a chat-completions-style endpoint.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(EndpointConfig config);
  std::string post(const std::string& request_body) override;

 private:
  EndpointConfig config_;
};

// Tees every request/response pair to numbered files:
// <dir>/NNNN.request.json and <dir>/NNNN.response.json. start_counter lets a
// resumed run continue the numbering.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(Transport& inner, std::string dir, int start_counter = 0);
  std::string post(const std::string& request_body) override;

 private:
  Transport& inner_;
  std::string dir_;
  int counter_ = 0;
};

// Replays a recorded transcript in order. The incoming request must match
// the recorded one byte for byte; any divergence is a TransportError.
class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(std::string dir);
  std::string post(const std::string& request_body) override;

 private:
  std::string dir_;
  int counter_ = 0;
};

// Canned responses for tests.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::vector<std::string> responses);
  std::string post(const std::string& request_body) override;

  const std::vector<std::string>& requests() const { return requests_; }

 private:
  std::vector<std::string> responses_;
  std::vector<std::string> requests_;
  size_t next_ = 0;
};

// ---------------------------------------------------------------------------
// Request construction / validation (documented in docs/endpoint.md)
// ---------------------------------------------------------------------------

struct ContentPart {
  enum class Kind { kText, kImagePng } kind = Kind::kText;
  std::string text;        // kText
  std::string png_bytes;   // kImagePng, raw bytes (base64-encoded on the wire)
};

struct ChatMessage {
  std::string role;  // "system" | "user"
  std::vector<ContentPart> parts;
};

std::string build_chat_request(const std::string& model,
                               const std::vector<ChatMessage>& messages,
                               double temperature = 0.0);

// Checks the documented request schema; fills *error with the first problem.
bool validate_chat_request(const std::string& body, std::string* error);

// Extracts choices[0].message.content; throws TransportError on any other
// response shape.
std::string extract_response_content(const std::string& body);

std::string base64_encode(const std::string& bytes);

}  // namespace myolab

#endif  // MYOLAB_TRANSPORT_H_
