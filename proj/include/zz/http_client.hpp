#pragma once

#include <string>

#include "zz/rewards.hpp"

namespace zz {

/// Network adapter for the policy-client wire schema: POSTs one JSON
/// request per call to <base_url>/query and expects a JSON response body.
/// Timeouts raise ClientError(Timeout); bad status or malformed bodies
/// raise ClientError(Protocol).
class HttpPolicyClient : public PolicyClient {
 public:
  explicit HttpPolicyClient(std::string base_url, double timeout_s = 10.0);

  ClientResponse query(const ClientRequest& request) override;

 private:
  std::string base_url_;
  double timeout_s_;
};

}  // namespace zz
