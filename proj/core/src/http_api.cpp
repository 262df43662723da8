#include "ranklab/http_api.hpp"

#include "httplib.h"
#include "json.hpp"

#include "ranklab/error.hpp"

namespace ranklab::service {

using nlohmann::json;

namespace {

json task_json(const std::optional<TaskView>& t) {
  if (!t) return nullptr;
  return {{"topic", t->topic},
          {"index", t->index},
          {"step", to_string(t->phase)},
          {"stance", t->stance ? json(t->stance->value()) : json(nullptr)}};
}

json session_json(const SessionView& v) {
  return {{"session_id", v.session_id},
          {"scenario", v.scenario},
          {"task_order", v.task_order},
          {"completed", v.completed},
          {"current_task", task_json(v.current)}};
}

json ranking_json(const RankedList& r) { return r.order(); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Participant-facing item payload. Stance labels are shown as L/C/R.
json item_json(const NewsItem& item) {
  return {{"id", item.id},
          {"title", item.title},
          {"source", item.source},
          {"label", std::string(group_tag(group_of(item.stance)))}};
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON body: ") + e.what());
  }
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const char* kind, const std::string& message) {
  send(res, status, {{"error", kind}, {"message", message}});
}

template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ValidationError& e) {
      send_error(res, 400, "validation", e.what());
    } catch (const NotFoundError& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const StateViolationError& e) {
      send_error(res, 409, "state_violation", e.what());
    } catch (const UnavailableError& e) {
      send_error(res, 503, "unavailable", e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "validation", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  ExperimentService& service;
  httplib::Server server;

  explicit Impl(ExperimentService& s) : service(s) { routes(); }

  void routes() {
    auto& svc = service;
    server.Post("/sessions", guarded([&svc](const httplib::Request&, httplib::Response& res) {
                  send(res, 201, session_json(svc.create_session()));
                }));
    server.Get(R"(/sessions/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 send(res, 200, session_json(svc.session(req.matches[1])));
               }));
    server.Get(R"(/sessions/([^/]+)/next-task)",
               guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 const SessionView v = svc.session(req.matches[1]);
                 send(res, 200, {{"done", !v.current.has_value()}, {"task", task_json(v.current)}});
               }));
    server.Post(R"(/sessions/([^/]+)/tasks/([^/]+)/stance)",
                guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                  const json body = body_of(req);
                  if (!body.contains("stance") || !body["stance"].is_number_integer()) {
                    throw ValidationError("body needs an integer 'stance'");
                  }
                  svc.submit_stance(req.matches[1], req.matches[2], body["stance"].get<int>());
                  send(res, 200, {{"ok", true}, {"stance", body["stance"]}});
                }));
    server.Get(R"(/sessions/([^/]+)/tasks/([^/]+)/ranking)",
               guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 const ServeOutcome out = svc.serve_ranking(req.matches[1], req.matches[2]);
                 if (const auto* wait = std::get_if<RetryLater>(&out)) {
                   const std::int64_t secs = std::max<std::int64_t>(1, (wait->retry_after_ms + 999) / 1000);
                   res.set_header("Retry-After", std::to_string(secs));
                   send(res, 503, {{"error", "retry_later"}, {"retry_after_ms", wait->retry_after_ms}});
                   return;
                 }
                 const auto& served = std::get<ServedRanking>(out);
                 json items = json::array();
                 for (std::size_t i = 0; i < served.items.size(); ++i) {
                   json item = item_json(served.items[i]);
                   item["rank"] = i + 1;
                   items.push_back(std::move(item));
                 }
                 send(res, 200, {{"run_id", served.run_id}, {"items", items}});
               }));
    server.Post(R"(/sessions/([^/]+)/tasks/([^/]+)/click)",
                guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                  const json body = body_of(req);
                  if (!body.contains("item_id") || !body["item_id"].is_string()) {
                    throw ValidationError("body needs a string 'item_id'");
                  }
                  const ClickOutcome out = svc.submit_click(req.matches[1], req.matches[2], body["item_id"]);
                  json article = item_json(out.article);
                  article["body"] = out.article.body;
                  send(res, 200, {{"article", article}, {"stale", out.stale}});
                }));
    server.Post(R"(/sessions/([^/]+)/tasks/([^/]+)/engagement)",
                guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                  const json body = body_of(req);
                  if (!body.contains("choice") || !body["choice"].is_string()) {
                    throw ValidationError("body needs a string 'choice'");
                  }
                  const auto choice = parse_engagement(body["choice"].get<std::string>());
                  if (!choice) throw ValidationError("choice must be like, share, like_and_share or nothing");
                  EngagementAux aux;
                  if (body.contains("read_more") && !body["read_more"].is_null()) {
                    aux.read_more = body["read_more"].get<bool>();
                  }
                  if (body.contains("perceived_stance") && !body["perceived_stance"].is_null()) {
                    aux.perceived_stance = body["perceived_stance"].get<int>();
                  }
                  const EngagementOutcome out = svc.submit_engagement(req.matches[1], req.matches[2], *choice, aux);
                  send(res, 200, {{"applied", out.applied}, {"seq", out.seq}, {"next_task", task_json(out.next_task)}});
                }));
    server.Get("/runs", guarded([&svc](const httplib::Request&, httplib::Response& res) {
                 json arr = json::array();
                 for (const auto& r : svc.runs()) {
                   arr.push_back({{"run_id", r.run_id},
                                  {"topic", r.topic},
                                  {"scenario", r.scenario},
                                  {"eta", r.algo.eta},
                                  {"lambda", r.algo.lambda},
                                  {"repetition", r.repetition},
                                  {"interaction_count", r.interaction_count},
                                  {"locked", r.locked}});
                 }
                 send(res, 200, arr);
               }));
    server.Get(R"(/runs/([^/]+)/metrics)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                 const RunMetrics m = svc.run_metrics(req.matches[1]);
                 json rankings, popularity;
                 for (UserGroup g : kAllGroups) {
                   const std::string tag(group_tag(g));
                   rankings[tag] = ranking_json(m.rankings[group_index(g)]);
                   popularity[tag] = m.popularity.of(g);
                 }
                 send(res, 200,
                      {{"run_id", m.run_id},
                       {"interaction_count", m.interaction_count},
                       {"window_size", m.window_size},
                       {"ext", optional_json(m.ext)},
                       {"pol", optional_json(m.pol)},
                       {"rankings", rankings},
                       {"popularity", popularity}});
               }));
    server.Get("/config/topics", guarded([&svc](const httplib::Request&, httplib::Response& res) {
                 json arr = json::array();
                 for (const auto& t : svc.config().corpus.topics) {
                   arr.push_back({{"id", t.id},
                                  {"title", t.title},
                                  {"description", t.description},
                                  {"stances", t.stance_text}});
                 }
                 send(res, 200, arr);
               }));
    if (const auto& dir = svc.config().static_dir) server.set_mount_point("/", dir->string());
  }
};

HttpServer::HttpServer(ExperimentService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw UnavailableError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw UnavailableError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace ranklab::service
