#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ddft/errors.hpp"

namespace ddft {

struct Message {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatParams {
    double temperature = 0.0;
    int max_tokens = 1000;
    int timeout_s = 60;
    int retries = 3;  // retry budget after the first attempt
};

// Uniform chat abstraction over subjects, the interviewer, and judges.
// Implementations must be safe under concurrent calls.
class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    virtual const std::string& id() const = 0;
    virtual const ChatParams& params() const = 0;
    virtual std::string complete(const std::vector<Message>& messages) = 0;
};

// Front door used by the protocol: validates the message list.
std::string chat(ChatEndpoint& endpoint, const std::vector<Message>& messages);

// FNV-1a over a canonical serialization; stable across runs and platforms.
std::uint64_t stable_hash64(std::string_view data);

// Digest of (endpoint_id, generation params, full message history). Transport
// knobs (timeout, retries) are excluded: they do not change the request.
std::string request_digest(const std::string& endpoint_id, const ChatParams& params,
                           const std::vector<Message>& messages);

// OpenAI-style chat-completions connector. The bearer token is read from the
// environment variable named in Options; credentials never appear in config
// files. Each call uses a fresh connection, so one instance may serve many
// sessions concurrently.
class HttpChatEndpoint final : public ChatEndpoint {
public:
    struct Options {
        std::string id;
        std::string model;
        std::string base_url;
        std::string path = "/v1/chat/completions";
        std::string api_key_env = "DDFT_API_KEY";
        ChatParams params;
        int backoff_ms = 500;
    };

    // status < 0 means the request never produced a response (connect/timeout).
    using Transport = std::function<std::pair<int, std::string>(const std::string& body_json)>;

    explicit HttpChatEndpoint(Options options, Transport transport = {});

    const std::string& id() const override { return options_.id; }
    const ChatParams& params() const override { return options_.params; }
    std::string complete(const std::vector<Message>& messages) override;

private:
    Options options_;
    Transport transport_;
};

// Record/replay store: digest -> recorded response, persisted as JSON Lines
// (one object per call: digest, request summary, response, timestamp).
// Writes are serialized; replay lookups are exact-match on digest.
class TranscriptStore {
public:
    TranscriptStore() = default;

    static std::shared_ptr<TranscriptStore> load(const std::filesystem::path& file);

    void open_append(const std::filesystem::path& file);
    void put(const std::string& digest, const std::string& request_summary,
             const std::string& response);
    std::optional<std::string> get(const std::string& digest) const;
    std::size_t size() const;

private:
    std::map<std::string, std::string> entries_;
    std::ofstream out_;
    mutable std::mutex mutex_;
};

// Wraps a live endpoint and persists every (digest -> response) pair.
class RecordingEndpoint final : public ChatEndpoint {
public:
    RecordingEndpoint(std::shared_ptr<ChatEndpoint> inner, std::shared_ptr<TranscriptStore> store);

    const std::string& id() const override { return inner_->id(); }
    const ChatParams& params() const override { return inner_->params(); }
    std::string complete(const std::vector<Message>& messages) override;

private:
    std::shared_ptr<ChatEndpoint> inner_;
    std::shared_ptr<TranscriptStore> store_;
};

// Serves recorded responses only; a miss is an error.
class ReplayEndpoint final : public ChatEndpoint {
public:
    ReplayEndpoint(std::string id, ChatParams params, std::shared_ptr<TranscriptStore> store);

    const std::string& id() const override { return id_; }
    const ChatParams& params() const override { return params_; }
    std::string complete(const std::vector<Message>& messages) override;

private:
    std::string id_;
    ChatParams params_;
    std::shared_ptr<TranscriptStore> store_;
};

}  // namespace ddft
