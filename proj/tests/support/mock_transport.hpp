#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <vector>

#include "tgaicc/clients.hpp"

namespace fixture {

// Transport that answers from a callback and records every request.
class MockTransport : public tgaicc::Transport {
 public:
  using Handler = std::function<tgaicc::HttpResponse(const tgaicc::HttpRequest&, int call)>;

  explicit MockTransport(Handler handler) : handler_(std::move(handler)) {}

  tgaicc::HttpResponse post(const tgaicc::HttpRequest& request) override {
    int call;
    {
      std::lock_guard lock(mu_);
      call = static_cast<int>(requests_.size());
      requests_.push_back(request);
    }
    return handler_(request, call);
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return requests_.size();
  }

  std::vector<tgaicc::HttpRequest> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  Handler handler_;
  mutable std::mutex mu_;
  std::vector<tgaicc::HttpRequest> requests_;
};

inline tgaicc::HttpResponse chat_reply(const std::string& content, int status = 200) {
  nlohmann::json body = {{"model", "mock"},
                         {"choices", nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
  return {status, body.dump()};
}

}  // namespace fixture
