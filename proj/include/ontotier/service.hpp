#pragma once

// HTTP facade over the engine. Api is the transport-independent request
// dispatcher (and what the tests drive); Server binds it to httplib and adds
// media range serving and static hosting. docs/API.md lists the endpoints.

#include "ontotier/annodoc.hpp"
#include "ontotier/owl_model.hpp"
#include "ontotier/profile.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace ontotier::service {

struct Request {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> params;
  std::string body;

  std::optional<std::string> param(const std::string& name) const;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// The maps of a workspace, each value behind its own lock.
template <class T>
struct Slot {
  std::shared_mutex lock;
  T value;
};

class Workspace {
public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  /// Resolves a workspace-relative id; BadRequest when it escapes the root.
  std::filesystem::path path_of(std::string_view id) const;
  /// file:// URL of a workspace path, used as a document base IRI.
  std::string url_of(std::string_view id) const;

  std::shared_ptr<Slot<owl::OntologyDocument>> ontology(const std::string& id);
  std::shared_ptr<Slot<Profile>> profile(const std::string& id);
  std::shared_ptr<Slot<AnnotationDocument>> document(const std::string& id);

  std::string add_ontology(std::string_view bytes, std::string_view base);
  void add_profile(const std::string& id, Profile p);
  void add_document(const std::string& id, AnnotationDocument doc);
  void close_document(const std::string& id);

  std::vector<std::string> ontology_ids();
  std::vector<std::string> profile_ids();
  std::vector<std::string> document_ids();

  /// Profile lookup used for ontological tiers: the tier's profile
  /// reference is read as a workspace-relative profile id.
  ProfileLookup profile_lookup();

  /// Writes `bytes` to `path` through a temporary file and a rename.
  static void write_atomically(const std::filesystem::path& path, std::string_view bytes);

private:
  template <class T>
  std::shared_ptr<Slot<T>> find(std::map<std::string, std::shared_ptr<Slot<T>>>& m, const std::string& id);

  std::filesystem::path root_;
  std::mutex registry_;
  std::map<std::string, std::shared_ptr<Slot<owl::OntologyDocument>>> ontologies_;
  std::map<std::string, std::shared_ptr<Slot<Profile>>> profiles_;
  std::map<std::string, std::shared_ptr<Slot<AnnotationDocument>>> documents_;
};

class Api {
public:
  explicit Api(Workspace& ws) : ws_(ws) {}
  Response handle(const Request& req);

private:
  Workspace& ws_;
};

struct Options {
  std::string bind = "127.0.0.1";
  int port = 8750;
  std::filesystem::path root;
  std::optional<std::filesystem::path> web_dir;
  bool open_browser = false;
};

class Server {
public:
  explicit Server(Options opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind();
  /// Blocks until stop().
  void run();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ontotier::service
