#include "pairlens/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "pairlens/categories.hpp"
#include "pairlens/rng.hpp"
#include "pairlens/text.hpp"

namespace pairlens {

void BackendConfig::validate() const {
  if (name.empty()) throw std::runtime_error("backend name must be nonempty");
  if (base_url.empty()) throw std::runtime_error("backend '" + name + "': base_url missing");
  if (max_concurrency < 1)
    throw std::runtime_error("backend '" + name + "': max_concurrency must be >= 1");
  if (temperature < 0.0)
    throw std::runtime_error("backend '" + name + "': temperature must be >= 0");
  if (retry.max_attempts < 1)
    throw std::runtime_error("backend '" + name + "': retry.max_attempts must be >= 1");
}

std::string ChatRequest::effective_user() const {
  if (!response_language_directive || response_language_directive->empty()) return user;
  return user + "\n" + *response_language_directive;
}

namespace {

// Bounded in-flight requests per backend name.
class Semaphore {
 public:
  explicit Semaphore(int slots) : slots_(slots) {}
  void acquire() {
    std::unique_lock lock(m_);
    cv_.wait(lock, [&] { return slots_ > 0; });
    --slots_;
  }
  void release() {
    {
      std::lock_guard lock(m_);
      ++slots_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  int slots_;
};

class SlotGuard {
 public:
  explicit SlotGuard(Semaphore& sema) : sema_(sema) { sema_.acquire(); }
  ~SlotGuard() { sema_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  Semaphore& sema_;
};

Semaphore& backend_semaphore(const BackendConfig& cfg) {
  static std::mutex registry_mutex;
  static std::unordered_map<std::string, std::unique_ptr<Semaphore>> registry;
  std::lock_guard lock(registry_mutex);
  auto it = registry.find(cfg.name);
  if (it == registry.end()) {
    it = registry.emplace(cfg.name, std::make_unique<Semaphore>(cfg.max_concurrency)).first;
  }
  return *it->second;
}

std::mutex& mock_registry_mutex() {
  static std::mutex m;
  return m;
}

std::unordered_map<std::string, MockHandler>& mock_registry() {
  static std::unordered_map<std::string, MockHandler> registry;
  return registry;
}

constexpr const char* kMockScheme = "mock://";

bool is_mock(const BackendConfig& cfg) { return cfg.base_url.rfind(kMockScheme, 0) == 0; }

const Lexicons& cached_lexicons(const std::string& path) {
  static std::mutex m;
  static std::unordered_map<std::string, Lexicons> cache;
  std::lock_guard lock(m);
  auto it = cache.find(path);
  if (it == cache.end()) it = cache.emplace(path, load_lexicons(path)).first;
  return it->second;
}

const std::map<std::string, std::string>& cached_dictionary(const std::string& path) {
  static std::mutex m;
  static std::unordered_map<std::string, std::map<std::string, std::string>> cache;
  std::lock_guard lock(m);
  auto it = cache.find(path);
  if (it == cache.end()) {
    std::map<std::string, std::string> dict;
    for (const auto& [word, replacement] : read_json_file(path).items())
      dict[to_lower(word)] = replacement.get<std::string>();
    it = cache.emplace(path, std::move(dict)).first;
  }
  return it->second;
}

BiasProfile load_profile(const BackendConfig& cfg) {
  auto inline_json = cfg.options.find("profile_json");
  if (inline_json != cfg.options.end())
    return bias_profile_from_json(Json::parse(inline_json->second));
  auto path = cfg.options.find("profile");
  if (path == cfg.options.end())
    throw std::runtime_error("backend '" + cfg.name +
                             "': mock respondent needs options.profile or options.profile_json");
  return bias_profile_from_json(read_json_file(path->second));
}

// Pulls Text A / Text B back out of a judge prompt. The builder always frames
// them as  Text A: '<a>'\nText B: '<b>'  with the closing quote last.
std::pair<std::string, std::string> extract_judge_texts(const std::string& user) {
  const std::string a_marker = "Text A: '";
  const std::string b_marker = "'\nText B: '";
  const std::size_t a_pos = user.find(a_marker);
  if (a_pos == std::string::npos) throw SchemaError("judge mock: no 'Text A' in prompt");
  const std::size_t a_start = a_pos + a_marker.size();
  const std::size_t b_pos = user.find(b_marker, a_start);
  if (b_pos == std::string::npos) throw SchemaError("judge mock: no 'Text B' in prompt");
  const std::size_t b_start = b_pos + b_marker.size();
  const std::size_t b_end = user.rfind('\'');
  if (b_end == std::string::npos || b_end < b_start)
    throw SchemaError("judge mock: unterminated Text B");
  return {user.substr(a_start, b_pos - a_start), user.substr(b_start, b_end - b_start)};
}

ChatResult dispatch_mock(const BackendConfig& cfg, const ChatRequest& req) {
  const std::string key = cfg.base_url.substr(std::string(kMockScheme).size());
  MockHandler custom;
  {
    std::lock_guard lock(mock_registry_mutex());
    auto it = mock_registry().find(key);
    if (it != mock_registry().end()) custom = it->second;
  }
  // Run custom handlers outside the registry lock; they may block.
  if (custom) return custom(cfg, req);

  if (key == "echo") {
    ChatResult r;
    r.raw_text = req.effective_user();
    return r;
  }
  if (key == "respondent") return mock_respondent(load_profile(cfg), req);
  if (key == "judge") {
    auto lex_path = cfg.options.find("lexicons");
    if (lex_path == cfg.options.end())
      throw std::runtime_error("backend '" + cfg.name + "': mock judge needs options.lexicons");
    const auto [a, b] = extract_judge_texts(req.effective_user());
    ChatResult r;
    Json args = Json::object();
    for (const auto& [category, score] : mock_judge_scores(cached_lexicons(lex_path->second), a, b))
      args[category + "_diff"] = score;
    r.tool_arguments = std::move(args);
    return r;
  }
  if (key == "translate-identity") {
    ChatResult r;
    r.raw_text = translation_payload(req.effective_user());
    return r;
  }
  if (key == "translate-dict") {
    auto dict_path = cfg.options.find("dictionary");
    if (dict_path == cfg.options.end())
      throw std::runtime_error("backend '" + cfg.name +
                               "': mock dictionary translator needs options.dictionary");
    const auto& dict = cached_dictionary(dict_path->second);
    const std::string payload = translation_payload(req.effective_user());
    std::string out;
    out.reserve(payload.size());
    std::size_t i = 0;
    while (i < payload.size()) {
      const unsigned char c = static_cast<unsigned char>(payload[i]);
      if (!std::isalnum(c)) {
        out.push_back(payload[i]);
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < payload.size() && std::isalnum(static_cast<unsigned char>(payload[j]))) ++j;
      const std::string word = payload.substr(i, j - i);
      auto hit = dict.find(to_lower(word));
      out += hit != dict.end() ? hit->second : word;
      i = j;
    }
    ChatResult r;
    r.raw_text = collapse_spaces(out);
    return r;
  }
  throw std::runtime_error("unknown mock backend: " + cfg.base_url);
}

std::pair<std::string, std::string> split_origin_path(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  if (scheme == std::string::npos)
    throw std::runtime_error("base_url must carry a scheme: " + base_url);
  const std::size_t slash = base_url.find('/', scheme + 3);
  if (slash == std::string::npos) return {base_url, ""};
  return {base_url.substr(0, slash), base_url.substr(slash)};
}

ChatResult http_complete(const BackendConfig& cfg, const ChatRequest& req) {
  const auto [origin, prefix] = split_origin_path(cfg.base_url);

  Json messages = Json::array();
  if (!req.system.empty())
    messages.push_back(Json{{"role", "system"}, {"content", req.system}});
  messages.push_back(Json{{"role", "user"}, {"content", req.effective_user()}});

  Json body{{"model", cfg.model_id}, {"messages", messages}, {"temperature", cfg.temperature}};
  if (req.tool_schema) {
    body["tools"] = Json::array({Json{
        {"type", "function"},
        {"function", Json{{"name", req.tool_schema->name},
                          {"description", req.tool_schema->description},
                          {"parameters", req.tool_schema->parameters}}}}});
    body["tool_choice"] =
        Json{{"type", "function"}, {"function", Json{{"name", req.tool_schema->name}}}};
  }

  httplib::Client client(origin);
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(cfg.timeout_s * 1000));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
  if (!res)
    throw TransportError("backend '" + cfg.name +
                         "': " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("backend '" + cfg.name + "': HTTP " + std::to_string(res->status) +
                         (res->body.empty() ? "" : ": " + res->body.substr(0, 200)));

  Json reply = Json::parse(res->body, nullptr, false);
  if (reply.is_discarded())
    throw TransportError("backend '" + cfg.name + "': reply is not JSON");

  ChatResult result;
  if (reply.contains("usage")) result.usage = reply["usage"];
  if (!reply.contains("choices") || reply["choices"].empty())
    throw TransportError("backend '" + cfg.name + "': reply carries no choices");
  const Json& message = reply["choices"][0].value("message", Json::object());
  if (message.contains("content") && message["content"].is_string())
    result.raw_text = message["content"].get<std::string>();
  if (message.contains("tool_calls") && message["tool_calls"].is_array() &&
      !message["tool_calls"].empty()) {
    const Json& call = message["tool_calls"][0];
    const Json args_raw = call.value("function", Json::object()).value("arguments", Json());
    if (args_raw.is_string()) {
      Json parsed = Json::parse(args_raw.get<std::string>(), nullptr, false);
      if (parsed.is_discarded())
        throw SchemaError("backend '" + cfg.name + "': tool arguments are not valid JSON");
      result.tool_arguments = std::move(parsed);
    } else if (args_raw.is_object()) {
      result.tool_arguments = args_raw;
    }
  }
  return result;
}

}  // namespace

void register_mock(const std::string& key, MockHandler handler) {
  std::lock_guard lock(mock_registry_mutex());
  mock_registry()[key] = std::move(handler);
}

void unregister_mock(const std::string& key) {
  std::lock_guard lock(mock_registry_mutex());
  mock_registry().erase(key);
}

ChatResult complete(const BackendConfig& cfg, const ChatRequest& req) {
  cfg.validate();
  SlotGuard slot(backend_semaphore(cfg));

  const auto started = std::chrono::steady_clock::now();
  int attempt = 0;
  for (;;) {
    ++attempt;
    try {
      ChatResult result = is_mock(cfg) ? dispatch_mock(cfg, req) : http_complete(cfg, req);
      if (req.tool_schema && !result.tool_arguments)
        throw SchemaError("backend '" + cfg.name +
                          "': tool schema requested but reply carries no tool call");
      result.attempts = attempt;
      result.latency_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count();
      return result;
    } catch (const TransportError&) {
      if (attempt >= cfg.retry.max_attempts) throw;
      const auto delay =
          std::chrono::milliseconds(cfg.retry.backoff_base_ms) * (1LL << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
  }
}

std::string translate(const BackendConfig& cfg, const std::string& text,
                      const std::string& target_language) {
  ChatRequest req;
  req.system = "You are a professional translator.";
  req.user = "Translate the following text to " + target_language +
             ". Return only the translation.\n\n" + text;
  return complete(cfg, req).raw_text;
}

std::string translation_payload(const std::string& user_text) {
  const std::size_t split = user_text.find("\n\n");
  return split == std::string::npos ? user_text : user_text.substr(split + 2);
}

BiasProfile bias_profile_from_json(const Json& j) {
  BiasProfile p;
  p.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("rules")) {
    for (const Json& rule_json : j.at("rules")) {
      BiasRule rule;
      rule.marker = rule_json.at("marker").get<std::string>();
      rule.rate = rule_json.value("rate", 0.0);
      if (rule_json.contains("categories"))
        rule.categories = rule_json.at("categories").get<std::vector<std::string>>();
      p.rules.push_back(std::move(rule));
    }
  }
  if (j.contains("lexicons")) {
    const Json& lex = j.at("lexicons");
    if (lex.is_string()) {
      p.lexicons = load_lexicons(lex.get<std::string>());
    } else {
      for (const auto& [category, words] : lex.items())
        p.lexicons[category] = words.get<std::vector<std::string>>();
    }
  }
  return p;
}

Json to_json(const BiasProfile& p) {
  Json rules = Json::array();
  for (const BiasRule& r : p.rules)
    rules.push_back(Json{{"marker", r.marker}, {"categories", r.categories}, {"rate", r.rate}});
  Json lex = Json::object();
  for (const auto& [category, words] : p.lexicons) lex[category] = words;
  return Json{{"seed", p.seed}, {"rules", rules}, {"lexicons", lex}};
}

namespace {

// Neutral filler for mock responses. None of these words may appear in any
// category lexicon, or the keyword judge would pick up phantom differences.
const std::vector<std::string>& filler_pool() {
  static const std::vector<std::string> pool = {
      "I wanted to check whether this might be an option soon.",
      "Let me know what you think about the idea.",
      "There are a couple of points worth going over.",
      "It would mean a lot if you could take a look.",
      "We can sort out the details later this week.",
      "Here is the short version of what I have in mind.",
      "Glad to talk it through whenever suits you.",
      "Thanks for taking the time to read this.",
  };
  return pool;
}

}  // namespace

ChatResult mock_respondent(const BiasProfile& profile, const ChatRequest& req) {
  const std::string prompt = req.effective_user();

  std::vector<std::string> markers;
  markers.reserve(profile.rules.size());
  for (const BiasRule& rule : profile.rules) markers.push_back(rule.marker);
  const std::string stripped = strip_phrases(prompt, markers);

  // Base text depends only on the marker-free prompt, so paired arms share it.
  Rng base_rng = Rng::derive(profile.seed, stripped);
  const auto& pool = filler_pool();
  const std::size_t sentence_count = 2 + base_rng.bounded(2);
  std::string body;
  for (std::size_t i = 0; i < sentence_count; ++i) {
    if (i > 0) body += " ";
    body += pool[base_rng.bounded(pool.size())];
  }

  const BiasRule* matched = nullptr;
  for (const BiasRule& rule : profile.rules) {
    if (contains_phrase(prompt, rule.marker)) {
      matched = &rule;
      break;
    }
  }

  if (matched) {
    Rng inject_rng = Rng::derive(profile.seed, matched->marker + "\x1f" + stripped);
    std::vector<std::string> injected;
    for (const std::string& category : matched->categories) {
      const bool fire = inject_rng.bernoulli(matched->rate);
      auto lex = profile.lexicons.find(category);
      if (!fire || lex == profile.lexicons.end() || lex->second.empty()) continue;
      const std::size_t count = 1 + inject_rng.bounded(2);
      for (std::size_t k = 0; k < count; ++k)
        injected.push_back(lex->second[inject_rng.bounded(lex->second.size())]);
    }
    if (!injected.empty()) {
      body += " On that note:";
      for (const std::string& word : injected) body += " " + word;
      body += ".";
    }
  }

  ChatResult result;
  result.raw_text = Json{{"answer", body}}.dump();
  return result;
}

std::map<std::string, int> mock_judge_scores(const Lexicons& lexicons,
                                             const std::string& text_a,
                                             const std::string& text_b) {
  const CategorySchema& schema = default_schema();
  for (const Category& c : schema.categories) {
    if (!lexicons.count(c.id))
      throw std::runtime_error("mock judge lexicons must cover all categories; missing " + c.id);
  }

  const std::vector<std::string> tokens_a = tokenize(text_a);
  const std::vector<std::string> tokens_b = tokenize(text_b);

  std::map<std::string, int> scores;
  for (const Category& c : schema.categories) {
    const std::vector<std::string>& words = lexicons.at(c.id);
    auto count_hits = [&](const std::vector<std::string>& tokens) {
      int hits = 0;
      for (const std::string& token : tokens)
        for (const std::string& word : words)
          if (token == to_lower(word)) {
            ++hits;
            break;
          }
      return hits;
    };
    const int diff = count_hits(tokens_a) - count_hits(tokens_b);
    scores[c.id] = std::clamp(diff, kScaleMin, kScaleMax);
  }
  return scores;
}

Lexicons load_lexicons(const std::string& path) {
  Lexicons lexicons;
  for (const auto& [category, words] : read_json_file(path).items())
    lexicons[category] = words.get<std::vector<std::string>>();
  return lexicons;
}

Json to_json(const BackendConfig& cfg) {
  Json j{{"name", cfg.name},
         {"base_url", cfg.base_url},
         {"model_id", cfg.model_id},
         {"temperature", cfg.temperature},
         {"max_concurrency", cfg.max_concurrency},
         {"timeout_s", cfg.timeout_s},
         {"retry", Json{{"max_attempts", cfg.retry.max_attempts},
                        {"backoff_base_ms", cfg.retry.backoff_base_ms}}}};
  if (!cfg.api_key_env.empty()) j["api_key_env"] = cfg.api_key_env;
  if (!cfg.options.empty()) j["options"] = cfg.options;
  return j;
}

BackendConfig backend_config_from_json(const Json& j) {
  BackendConfig cfg;
  cfg.name = j.at("name").get<std::string>();
  cfg.base_url = j.at("base_url").get<std::string>();
  cfg.model_id = j.value("model_id", std::string{});
  cfg.api_key_env = j.value("api_key_env", std::string{});
  cfg.temperature = j.value("temperature", 1.0);
  cfg.max_concurrency = j.value("max_concurrency", 4);
  cfg.timeout_s = j.value("timeout_s", 60.0);
  if (j.contains("retry")) {
    cfg.retry.max_attempts = j.at("retry").value("max_attempts", 3);
    cfg.retry.backoff_base_ms = j.at("retry").value("backoff_base_ms", 200);
  }
  if (j.contains("options"))
    cfg.options = j.at("options").get<std::map<std::string, std::string>>();
  cfg.validate();
  return cfg;
}

}  // namespace pairlens
