#pragma once

// Minimal in-process Overpass endpoint for tests.

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"

namespace mock {

struct Reply {
  int status = 200;
  std::string body;
};

/// Replies to POST /api/interpreter with handler(query, call_index).
class Overpass {
 public:
  using Handler = std::function<Reply(const std::string& query, int call)>;

  explicit Overpass(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/api/interpreter", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string query = req.has_param("data") ? req.get_param_value("data") : std::string();
      int call = 0;
      {
        std::lock_guard lock(mutex_);
        call = static_cast<int>(queries_.size());
        queries_.push_back(query);
      }
      const Reply r = handler_(query, call);
      res.status = r.status;
      res.set_content(r.body, "application/osm3s+xml");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Overpass() {
    server_.stop();
    thread_.join();
  }
  Overpass(const Overpass&) = delete;
  Overpass& operator=(const Overpass&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api/interpreter"; }
  std::vector<std::string> queries() const {
    std::lock_guard lock(mutex_);
    return queries_;
  }
  int calls() const { return static_cast<int>(queries().size()); }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<std::string> queries_;
};

inline std::string osm(const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\" generator=\"mock\">\n" + body + "</osm>\n";
}

/// A square way `id` with corner (lon, lat) and side d, plus its four nodes.
inline std::string square_way(long id, double lon, double lat, double d, const std::string& k, const std::string& v) {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    const double x = lon + ((i == 1 || i == 2) ? d : 0.0);
    const double y = lat + (i >= 2 ? d : 0.0);
    s += "<node id=\"" + std::to_string(id * 10 + i) + "\" lat=\"" + std::to_string(y) + "\" lon=\"" +
         std::to_string(x) + "\"/>\n";
  }
  s += "<way id=\"" + std::to_string(id) + "\">";
  for (int i = 0; i < 4; ++i) s += "<nd ref=\"" + std::to_string(id * 10 + i) + "\"/>";
  s += "<nd ref=\"" + std::to_string(id * 10) + "\"/><tag k=\"" + k + "\" v=\"" + v + "\"/></way>\n";
  return s;
}

}  // namespace mock
