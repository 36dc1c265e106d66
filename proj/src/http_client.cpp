#include "zz/http_client.hpp"

#include <chrono>
#include <cmath>
#include <httplib.h>

#include "zz/errors.hpp"
#include "zz/io.hpp"

namespace zz {

HttpPolicyClient::HttpPolicyClient(std::string base_url, double timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

ClientResponse HttpPolicyClient::query(const ClientRequest& request) {
  httplib::Client http(base_url_);
  const auto timeout =
      std::chrono::milliseconds(static_cast<long long>(std::ceil(timeout_s_ * 1000.0)));
  http.set_connection_timeout(timeout);
  http.set_read_timeout(timeout);
  http.set_write_timeout(timeout);

  const std::string body = client_request_to_json(request).dump();
  httplib::Result result = http.Post("/query", body, "application/json");
  if (!result) {
    const httplib::Error err = result.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      throw ClientError(ClientError::Kind::Timeout, "policy endpoint timed out");
    }
    throw ClientError(ClientError::Kind::Protocol,
                      "policy endpoint unreachable: " + httplib::to_string(err));
  }
  if (result->status != 200) {
    throw ClientError(ClientError::Kind::Protocol,
                      "policy endpoint returned status " + std::to_string(result->status));
  }
  Json j = Json::parse(result->body, nullptr, false);
  if (j.is_discarded()) {
    throw ClientError(ClientError::Kind::Protocol, "policy endpoint sent invalid JSON");
  }
  try {
    return parse_client_response(1, j);
  } catch (const SchemaError& e) {
    throw ClientError(ClientError::Kind::Protocol,
                      std::string("policy endpoint response: ") + e.what());
  }
}

}  // namespace zz
