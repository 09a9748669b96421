#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "librarylens/library_store.hpp"
#include "librarylens/pipeline.hpp"
#include "librarylens/visual.hpp"

namespace librarylens {

// Query-string parsing shared by the HTTP scene endpoint and the CLI.
// Throws ArgumentError on anything unparseable.
inline SceneParams parse_scene_params(const std::optional<std::string>& sort, const std::optional<std::string>& encoding,
                                      const std::optional<std::string>& shelves,
                                      const std::optional<std::string>& width_mm,
                                      const std::optional<std::string>& clearance_mm) {
  SceneParams p;
  if (sort) p.sort = SortStrategy::parse(*sort);
  if (encoding) p.encoding = parse_encoding(*encoding);
  if (shelves) {
    auto v = text::to_int(*shelves);
    if (!v || *v < 1 || *v > 10000) throw ArgumentError("shelves must be a positive integer");
    p.shelves = static_cast<int>(*v);
  }
  if (width_mm) {
    auto v = text::to_double(*width_mm);
    if (!v) throw ArgumentError("width_mm must be a number");
    p.width_mm = *v;
  }
  if (clearance_mm) {
    auto v = text::to_double(*clearance_mm);
    if (!v) throw ArgumentError("clearance_mm must be a number");
    p.clearance_mm = *v;
  }
  return p;
}

// REST front of the pipeline:
//   POST /api/library                          CSV upload (multipart or raw body)
//   GET  /api/library/{id}/scene               ?sort=&encoding=&shelves=&width_mm=&clearance_mm=
//   POST /api/library/{id}/move                {"from", "to", "revision"?}
//   GET  /api/library/{id}/book/{isbn13}
//   GET  /api/library/{id}/export.svg          ?labels=true|false
// Everything else is served from web_root when one is configured.
class Service {
 public:
  Service(LibraryStore& store, PipelineContext& pipeline, PaletteTable palettes,
          std::optional<std::filesystem::path> web_root = std::nullopt)
      : store_(store), pipeline_(pipeline), palettes_(std::move(palettes)) {
    routes();
    if (web_root && std::filesystem::is_directory(*web_root)) server_.set_mount_point("/", web_root->string());
  }

  httplib::Server& server() { return server_; }

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_any_port(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }

 private:
  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
  }

  static std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
  }

  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const NotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const StaleRevisionError& e) {
      send_error(res, 409, e.what());
    } catch (const RowLimitError& e) {
      send_error(res, 413, e.what());
    } catch (const ParseError& e) {
      send_error(res, 400, e.what());
    } catch (const ProviderError& e) {
      send_error(res, 502, e.what());
    } catch (const ArgumentError& e) {
      send_error(res, 422, e.what());
    } catch (const json::exception& e) {
      send_error(res, 422, std::string("bad request body: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  void routes() {
    server_.Post("/api/library", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { upload(req, res); });
    });
    server_.Get(R"(/api/library/([^/]+)/scene)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto id = req.matches[1].str();
        if (!store_.contains(id)) throw NotFoundError("no library " + id);
        auto params = parse_scene_params(param(req, "sort"), param(req, "encoding"), param(req, "shelves"),
                                         param(req, "width_mm"), param(req, "clearance_mm"));
        auto body = store_.mutate(id, [&](LibraryState& s) {
          const bool discarded = apply_scene_params(s, params);
          return scene_json(s, palettes_, discarded);
        });
        send_json(res, 200, body);
      });
    });
    server_.Post(R"(/api/library/([^/]+)/move)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto id = req.matches[1].str();
        if (!store_.contains(id)) throw NotFoundError("no library " + id);
        json body;
        try {
          body = json::parse(req.body);
        } catch (const json::exception&) {
          throw ArgumentError("move body must be JSON");
        }
        if (!body.is_object() || !body.contains("from") || !body.contains("to") || !body["from"].is_number_integer() ||
            !body["to"].is_number_integer())
          throw ArgumentError("move body needs integer 'from' and 'to'");
        std::optional<std::uint64_t> revision;
        if (body.contains("revision") && !body["revision"].is_null()) revision = body["revision"].get<std::uint64_t>();
        auto scene = store_.mutate(id, [&](LibraryState& s) {
          apply_move(s, body["from"].get<long long>(), body["to"].get<long long>(), revision);
          return scene_json(s, palettes_);
        });
        send_json(res, 200, scene);
      });
    });
    server_.Get(R"(/api/library/([^/]+)/book/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto body = store_.read(req.matches[1].str(), [&](const LibraryState& s) {
          return book_json(s, req.matches[2].str(), palettes_);
        });
        send_json(res, 200, body);
      });
    });
    server_.Get(R"(/api/library/([^/]+)/export\.svg)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto labels = param(req, "labels").value_or("true");
        if (labels != "true" && labels != "false" && labels != "1" && labels != "0")
          throw ArgumentError("labels must be true or false");
        const bool with_labels = labels == "true" || labels == "1";
        auto svg = store_.read(req.matches[1].str(), [&](const LibraryState& s) {
          return render_svg(s.current_layout, *s.volumes, s.spec, s.current_mode, palettes_, with_labels);
        });
        res.status = 200;
        res.set_content(svg, "image/svg+xml");
      });
    });
  }

  void upload(const httplib::Request& req, httplib::Response& res) {
    std::string csv;
    if (req.is_multipart_form_data()) {
      if (req.files.empty()) throw ParseError("multipart upload carries no file");
      auto it = req.files.find("file");
      csv = (it != req.files.end() ? it->second : req.files.begin()->second).content;
    } else {
      csv = req.body;
    }
    auto build = [&] {
      std::lock_guard lock(pipeline_mutex_);
      return build_volumes(csv, pipeline_);
    }();
    json failures = json::object();
    for (const auto& [isbn, f] : build.fetch_failures) failures[isbn] = f;
    json report = build.report;
    auto id = store_.create(std::move(build));
    send_json(res, 201, {{"library_id", id}, {"ingest_report", report}, {"fetch_failures", failures}});
  }

  LibraryStore& store_;
  PipelineContext& pipeline_;
  PaletteTable palettes_;
  std::mutex pipeline_mutex_;
  httplib::Server server_;
};

}  // namespace librarylens
