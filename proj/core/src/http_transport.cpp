#ifdef TGAICC_HTTPS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "tgaicc/clients.hpp"

namespace tgaicc {

namespace {

class HttplibTransport final : public Transport {
 public:
  HttplibTransport(std::string origin, std::string prefix, std::chrono::seconds timeout)
      : origin_(std::move(origin)), prefix_(std::move(prefix)), timeout_(timeout) {}

  HttpResponse post(const HttpRequest& request) override {
    // httplib::Client is not shareable across threads; one per call.
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    auto result = client.Post(prefix_ + request.path, headers, request.body, "application/json");
    if (!result) {
      throw TransportError("POST " + origin_ + prefix_ + request.path + ": " + httplib::to_string(result.error()));
    }
    return {result->status, result->body};
  }

 private:
  std::string origin_;
  std::string prefix_;
  std::chrono::seconds timeout_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const ClientConfig& config, std::string_view stage) {
  if (config.endpoint.empty()) {
    throw Error("no endpoint configured for the '" + std::string(stage) +
                "' stage; pass --endpoint URL or supply its outputs offline");
  }
  validate(config);
  const std::string& url = config.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint must start with http:// or https://: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw Error("unsupported endpoint scheme: " + scheme);
#ifndef TGAICC_HTTPS
  if (scheme == "https") throw Error("this build has no TLS support; use an http:// endpoint");
#endif
  const auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return std::make_unique<HttplibTransport>(std::move(origin), std::move(prefix), config.timeout);
}

}  // namespace tgaicc
