#include "ontotier/cli.hpp"

#include "ontotier/error.hpp"
#include "ontotier/serializer.hpp"
#include "ontotier/service.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ontotier {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path, {{"path", path}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_url(const std::string& path) { return "file://" + fs::absolute(path).generic_string(); }

owl::OntologyDocument load_ontology(const std::string& path, const std::string& base) {
  return owl::parse_ontology(slurp(path), base.empty() ? file_url(path) : base, path);
}

std::string value_text(const AnnotationValue& v) {
  if (const auto* s = std::get_if<StringValue>(&v)) return s->text;
  const auto& o = std::get<OntologyValue>(v);
  std::string out = o.user_defined_term + " ->";
  for (const auto& i : o.instances) out += " " + i;
  return out;
}

// One-line rendering that keeps rows tab-separated.
std::string cell(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void print_tree(std::ostream& out, const std::vector<owl::ClassNode>& nodes, int depth) {
  for (const auto& n : nodes) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.label << '\t' << n.iri << '\n';
    print_tree(out, n.children, depth + 1);
  }
}

json tree_json(const std::vector<owl::ClassNode>& nodes) {
  json out = json::array();
  for (const auto& n : nodes) out.push_back({{"iri", n.iri}, {"label", n.label}, {"children", tree_json(n.children)}});
  return out;
}

void export_outline(std::ostream& out, const AnnotationDocument& doc) {
  out << "document " << doc.id << '\n';
  for (const auto& m : doc.media) out << "media " << m.media_url << ' ' << m.mime_type << '\n';
  std::function<void(const std::string&, int)> tier = [&](const std::string& id, int depth) {
    const auto& t = doc.tiers.at(id);
    const auto& type = doc.type_of(t);
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    out << pad << "tier " << id << " (" << type.id << ", " << to_string(type.stereotype);
    if (t.profile_ref) out << ", profile " << *t.profile_ref;
    out << ")\n";
    std::vector<std::pair<Extent, std::string>> rows;
    for (const auto& [aid, a] : doc.annotations) {
      if (annotation_tier(a) == id) rows.push_back({resolve_time_extent(doc, aid), aid});
    }
    // Siblings keep chain order; everything else goes by time, then ordinal.
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      if (x.first.begin != y.first.begin) return x.first.begin < y.first.begin;
      return annotation_ordinal(x.second) < annotation_ordinal(y.second);
    });
    std::set<std::string> done;
    for (const auto& [ext, aid] : rows) {
      if (done.contains(aid)) continue;
      const auto& a = doc.annotations.at(aid);
      std::vector<std::string> group{aid};
      if (const auto* r = std::get_if<ReferringAnnotation>(&a)) group = chain_of(doc, id, r->ref_annotation);
      for (const auto& g : group) {
        done.insert(g);
        const auto& ga = doc.annotations.at(g);
        auto e = resolve_time_extent(doc, g);
        out << pad << "  " << g << " [" << e.begin << "," << e.end << "]";
        if (auto p = annotation_parent(ga)) out << " -> " << *p;
        out << " \"" << cell(value_text(annotation_value(ga))) << "\"\n";
      }
    }
    for (const auto& [cid, c] : doc.tiers) {
      if (c.parent == id) tier(cid, depth + 1);
    }
  };
  for (const auto& [id, t] : doc.tiers) {
    if (!t.parent) tier(id, 0);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ontology-based multimedia annotation engine", "ontotier"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "JSON output");

  std::string file, query, prf, owl_path, base;
  std::vector<std::string> tiers;
  bool ignore_case = false;

  auto* validate = app.add_subcommand("validate", "check an annotation file");
  validate->add_option("file", file)->required();

  auto* search_cmd = app.add_subcommand("search", "search annotation values");
  search_cmd->add_option("file", file)->required();
  search_cmd->add_option("query", query)->required();
  search_cmd->add_option("--tier", tiers, "restrict to tier (repeatable)");
  search_cmd->add_flag("-i,--ignore-case", ignore_case);

  std::string author, version, source, description, output;
  std::vector<std::string> terms, term_descriptions;
  auto* profile_new = app.add_subcommand("profile-new", "write a new language profile");
  profile_new->add_option("--author", author)->required();
  profile_new->add_option("--version", version)->required();
  profile_new->add_option("--source", source)->required();
  profile_new->add_option("--description", description);
  profile_new->add_option("--term", terms, "NAME=Term1,Term2 (repeatable)");
  profile_new->add_option("--term-description", term_descriptions, "NAME=text (repeatable)");
  profile_new->add_option("-o,--output", output, "file to write, default stdout");

  auto* profile_check = app.add_subcommand("profile-check", "check a profile against an ontology");
  profile_check->add_option("profile", prf)->required();
  profile_check->add_option("ontology", owl_path)->required();
  profile_check->add_option("--base", base, "ontology base IRI");

  auto* tree = app.add_subcommand("ontology-tree", "print the class hierarchy");
  tree->add_option("ontology", owl_path)->required();
  tree->add_option("--base", base);

  auto* index = app.add_subcommand("ontology-index", "print the alphabetical term index");
  index->add_option("ontology", owl_path)->required();
  index->add_option("--base", base);

  auto* export_cmd = app.add_subcommand("export", "print a tier outline of an annotation file");
  export_cmd->add_option("file", file)->required();

  service::Options sopts;
  std::string root, web;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--bind", sopts.bind, "bind address")->capture_default_str();
  serve->add_option("--port", sopts.port, "port, 0 for any")->capture_default_str();
  serve->add_option("--root", root, "workspace root (default $ONTOTIER_ROOT or .)");
  serve->add_option("--web", web, "static UI directory");
  serve->add_flag("--open", sopts.open_browser, "open the UI in a browser");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*validate) {
      auto bytes = slurp(file);
      auto findings = validate_file(bytes);
      std::optional<Error> load_error;
      try {
        load_document(bytes);
      } catch (const Error& e) {
        load_error = e;
      }
      if (as_json) {
        json j = json::array();
        for (const auto& f : findings) j.push_back({{"rule", f.rule}, {"subject", f.subject}, {"message", f.message}});
        json o{{"findings", j}};
        if (load_error) o["error"] = {{"code", to_string(load_error->code())}, {"message", load_error->what()}};
        out << o.dump(2) << '\n';
      } else {
        for (const auto& f : findings) out << f.rule << '\t' << f.subject << '\t' << f.message << '\n';
      }
      if (load_error) err << "error: " << to_string(load_error->code()) << ": " << load_error->what() << '\n';
      return findings.empty() && !load_error ? 0 : 1;
    }
    if (*search_cmd) {
      auto doc = load_document(slurp(file));
      std::optional<std::vector<std::string>> filter;
      if (!tiers.empty()) filter = tiers;
      auto hits = search(doc, query, filter, !ignore_case);
      if (as_json) {
        json j = json::array();
        for (const auto& h : hits) {
          j.push_back({{"tier", h.tier_id}, {"annotation", h.annotation_id}, {"begin", h.extent.begin},
                       {"end", h.extent.end}, {"text", h.text}});
        }
        out << j.dump(2) << '\n';
      } else {
        for (const auto& h : hits) {
          out << h.tier_id << '\t' << h.annotation_id << '\t' << h.extent.begin << '\t' << h.extent.end << '\t'
              << cell(h.text) << '\n';
        }
      }
      return 0;
    }
    if (*profile_new) {
      auto p = new_profile(author, version, source);
      p.description = description;
      std::map<std::string, std::string> descs;
      for (const auto& d : term_descriptions) {
        auto eq = d.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::BadRequest, "--term-description needs NAME=text");
        descs[d.substr(0, eq)] = d.substr(eq + 1);
      }
      for (const auto& t : terms) {
        auto eq = t.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::BadRequest, "--term needs NAME=Term1,Term2");
        std::vector<std::string> onto;
        std::stringstream ss(t.substr(eq + 1));
        for (std::string part; std::getline(ss, part, ',');) onto.push_back(part);
        auto name = t.substr(0, eq);
        add_term(p, name, onto, descs.contains(name) ? descs[name] : "");
      }
      auto text = serialize_profile(p);
      if (output.empty()) {
        out << text;
      } else {
        service::Workspace::write_atomically(output, text);
      }
      return 0;
    }
    if (*profile_check) {
      auto p = parse_profile(slurp(prf));
      auto onto = load_ontology(owl_path, base);
      auto findings = validate_against_ontology(p, onto);
      if (as_json) {
        json j = json::array();
        for (const auto& f : findings) {
          j.push_back({{"kind", f.kind == ProfileFinding::Kind::Unresolved ? "unresolved" : "ambiguous"},
                       {"user_term", f.user_term},
                       {"ontology_term", f.ontology_term},
                       {"candidates", f.candidates}});
        }
        out << j.dump(2) << '\n';
      } else {
        for (const auto& f : findings) {
          out << (f.kind == ProfileFinding::Kind::Unresolved ? "unresolved" : "ambiguous") << '\t' << f.user_term
              << '\t' << f.ontology_term << '\t' << f.message() << '\n';
        }
      }
      return findings.empty() ? 0 : 1;
    }
    if (*tree) {
      auto onto = load_ontology(owl_path, base);
      for (const auto& w : onto.warnings) err << "warning: " << w << '\n';
      if (as_json) {
        out << tree_json(owl::class_tree(onto)).dump(2) << '\n';
      } else {
        print_tree(out, owl::class_tree(onto), 0);
      }
      return 0;
    }
    if (*index) {
      auto onto = load_ontology(owl_path, base);
      for (const auto& w : onto.warnings) err << "warning: " << w << '\n';
      auto entries = owl::term_index(onto);
      if (as_json) {
        json j = json::array();
        for (const auto& e : entries) j.push_back({{"label", e.label}, {"iri", e.iri}});
        out << j.dump(2) << '\n';
      } else {
        for (const auto& e : entries) out << e.label << '\t' << e.iri << '\n';
      }
      return 0;
    }
    if (*export_cmd) {
      export_outline(out, load_document(slurp(file)));
      return 0;
    }
    if (*serve) {
      if (root.empty()) {
        const char* env = std::getenv("ONTOTIER_ROOT");
        root = env ? env : ".";
      }
      sopts.root = root;
      if (!web.empty()) {
        sopts.web_dir = web;
      }
#ifdef ONTOTIER_WEB_DIR
      else if (fs::is_directory(ONTOTIER_WEB_DIR)) {
        sopts.web_dir = ONTOTIER_WEB_DIR;
      }
#endif
      service::Server server(sopts);
      int port = server.bind();
      if (port < 0) throw Error(ErrorCode::IoError, "cannot bind " + sopts.bind + ":" + std::to_string(sopts.port));
      out << "listening on http://" << sopts.bind << ':' << port << "/ (root " << fs::absolute(root).string() << ")"
          << std::endl;
      server.run();
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace ontotier
