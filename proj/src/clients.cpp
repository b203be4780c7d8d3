#include "ddft/clients.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

namespace ddft {

using nlohmann::json;

namespace {

constexpr char kFieldSep = '\x1f';
constexpr char kRecordSep = '\x1e';

bool transient_status(int status) {
    return status == 408 || status == 429 || status == 500 || status == 502 ||
           status == 503 || status == 504;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string summarize_request(const std::vector<Message>& messages) {
    std::string summary = std::to_string(messages.size()) + " messages; last: ";
    const std::string& last = messages.back().content;
    summary += last.substr(0, 120);
    if (last.size() > 120) summary += "...";
    return summary;
}

}  // namespace

std::string chat(ChatEndpoint& endpoint, const std::vector<Message>& messages) {
    if (messages.empty())
        throw Error("chat: empty message list");
    return endpoint.complete(messages);
}

std::uint64_t stable_hash64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string request_digest(const std::string& endpoint_id, const ChatParams& params,
                           const std::vector<Message>& messages) {
    std::string canon = endpoint_id;
    canon += kFieldSep;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", params.temperature);
    canon += buf;
    canon += kFieldSep;
    canon += std::to_string(params.max_tokens);
    for (const auto& m : messages) {
        canon += kRecordSep;
        canon += m.role;
        canon += kFieldSep;
        canon += m.content;
    }
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(stable_hash64(canon)));
    return buf;
}

HttpChatEndpoint::HttpChatEndpoint(Options options, Transport transport)
    : options_(std::move(options)), transport_(std::move(transport)) {
    if (!transport_) {
        transport_ = [this](const std::string& body) -> std::pair<int, std::string> {
            const char* key = std::getenv(options_.api_key_env.c_str());
            if (key == nullptr || *key == '\0')
                throw ConfigError("endpoint '" + options_.id + "': environment variable " +
                                  options_.api_key_env + " is not set");
            httplib::Client client(options_.base_url);
            client.set_connection_timeout(options_.params.timeout_s);
            client.set_read_timeout(options_.params.timeout_s);
            httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
            auto result = client.Post(options_.path, headers, body, "application/json");
            if (!result) return {-1, std::string{}};
            return {result->status, result->body};
        };
    }
}

std::string HttpChatEndpoint::complete(const std::vector<Message>& messages) {
    json body;
    body["model"] = options_.model;
    body["temperature"] = options_.params.temperature;
    body["max_tokens"] = options_.params.max_tokens;
    body["messages"] = json::array();
    for (const auto& m : messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const std::string payload = body.dump();

    const int attempts = options_.params.retries + 1;
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(options_.backoff_ms * (1 << (attempt - 1))));
        }
        const auto [status, response] = transport_(payload);
        if (status < 0) {
            last_error = "connection failure";
            continue;
        }
        if (status != 200) {
            if (transient_status(status)) {
                last_error = "HTTP " + std::to_string(status);
                continue;
            }
            throw EndpointUnavailable("endpoint '" + options_.id + "': HTTP " +
                                      std::to_string(status) + ": " + response.substr(0, 200));
        }
        try {
            const json parsed = json::parse(response);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            last_error = std::string("malformed response: ") + e.what();
        }
    }
    throw EndpointUnavailable("endpoint '" + options_.id + "' failed after " +
                              std::to_string(attempts) + " attempts: " + last_error);
}

std::shared_ptr<TranscriptStore> TranscriptStore::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open transcript store: " + file.string());
    auto store = std::make_shared<TranscriptStore>();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json record = json::parse(line);
        store->entries_[record.at("digest").get<std::string>()] =
            record.at("response").get<std::string>();
    }
    return store;
}

void TranscriptStore::open_append(const std::filesystem::path& file) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    out_.open(file, std::ios::app);
    if (!out_)
        throw IoError("cannot open transcript store for append: " + file.string());
}

void TranscriptStore::put(const std::string& digest, const std::string& request_summary,
                          const std::string& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_[digest] = response;
    if (out_.is_open()) {
        json record;
        record["digest"] = digest;
        record["request"] = request_summary;
        record["response"] = response;
        record["timestamp"] = utc_timestamp();
        out_ << record.dump() << '\n';
        out_.flush();
    }
}

std::optional<std::string> TranscriptStore::get(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::size_t TranscriptStore::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

RecordingEndpoint::RecordingEndpoint(std::shared_ptr<ChatEndpoint> inner,
                                     std::shared_ptr<TranscriptStore> store)
    : inner_(std::move(inner)), store_(std::move(store)) {}

std::string RecordingEndpoint::complete(const std::vector<Message>& messages) {
    const std::string digest = request_digest(inner_->id(), inner_->params(), messages);
    const std::string response = inner_->complete(messages);
    store_->put(digest, summarize_request(messages), response);
    return response;
}

ReplayEndpoint::ReplayEndpoint(std::string id, ChatParams params,
                               std::shared_ptr<TranscriptStore> store)
    : id_(std::move(id)), params_(params), store_(std::move(store)) {}

std::string ReplayEndpoint::complete(const std::vector<Message>& messages) {
    const std::string digest = request_digest(id_, params_, messages);
    const auto hit = store_->get(digest);
    if (!hit)
        throw ReplayMiss("replay miss for endpoint '" + id_ + "', digest " + digest);
    return *hit;
}

}  // namespace ddft
