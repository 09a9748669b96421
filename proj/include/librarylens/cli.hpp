#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "librarylens/library_store.hpp"
#include "librarylens/pipeline.hpp"
#include "librarylens/resources.hpp"
#include "librarylens/service.hpp"
#include "librarylens/visual.hpp"

namespace librarylens {

inline std::filesystem::path default_data_dir() { return env_or("LIBRARYLENS_DATA_DIR", "librarylens-data"); }

inline PaletteTable load_palettes(const std::string& flag) {
  if (!flag.empty()) return PaletteTable::load(flag);
  return PaletteTable::load(env_or("LIBRARYLENS_PALETTES", (resource_dir() / "palettes.json").string()));
}

// Subcommands:
//   ingest <csv>
//   scene  <library> [--sort --encoding --shelves --width-mm --clearance-mm]
//   render <library> [same] --out <svg> [--no-labels]
//   move   <library> --from --to [--revision]
//   serve  [--host --port --web-root]
// Returns the process exit code.
inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"librarylens: Goodreads exports to packed virtual bookshelves"};
  app.require_subcommand(1);
  std::string data_dir = default_data_dir().string();
  std::string palettes_file;
  app.add_option("--data-dir", data_dir, "Library storage directory (LIBRARYLENS_DATA_DIR)");
  app.add_option("--palettes", palettes_file, "Palette config file (LIBRARYLENS_PALETTES)");

  std::string csv_path;
  auto* ingest = app.add_subcommand("ingest", "Import a Goodreads library CSV export");
  ingest->add_option("csv", csv_path, "Goodreads export")->required()->check(CLI::ExistingFile);

  std::string library;
  std::optional<std::string> sort, encoding, shelves, width, clearance;
  auto scene_opts = [&](CLI::App* sub) {
    sub->add_option("library", library, "Library id")->required();
    sub->add_option("--sort", sort, "Sort keys, e.g. genre,-rating,alpha");
    sub->add_option("--encoding", encoding, "original | age | genre | rating");
    sub->add_option("--shelves", shelves, "Number of shelves");
    sub->add_option("--width-mm", width, "Shelf width in mm");
    sub->add_option("--clearance-mm", clearance, "Shelf clearance in mm");
  };
  auto* scene = app.add_subcommand("scene", "Print the current scene as JSON");
  scene_opts(scene);

  std::string out_path;
  bool no_labels = false;
  auto* render = app.add_subcommand("render", "Write the shelf blueprint as SVG");
  scene_opts(render);
  render->add_option("--out", out_path, "Output SVG path")->required();
  render->add_flag("--no-labels", no_labels, "Omit title labels");

  long long from = 0, to = 0;
  std::optional<std::uint64_t> revision;
  auto* mv = app.add_subcommand("move", "Move one volume within the flow order");
  mv->add_option("library", library, "Library id")->required();
  mv->add_option("--from", from, "Current index")->required();
  mv->add_option("--to", to, "Target index after removal")->required();
  mv->add_option("--revision", revision, "Expected revision");

  std::string host = "127.0.0.1", web_root;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--web-root", web_root, "Static web UI bundle directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    LibraryStore store(data_dir);
    auto palettes = load_palettes(palettes_file);

    if (*ingest) {
      std::ifstream in(csv_path, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      PipelineContext ctx(PipelineConfig::from_env());
      auto build = build_volumes(ss.str(), ctx);
      json failures = json::object();
      for (const auto& [isbn, f] : build.fetch_failures) failures[isbn] = f;
      json report = build.report;
      auto id = store.create(std::move(build));
      out << json{{"library_id", id}, {"ingest_report", report}, {"fetch_failures", failures}}.dump(2) << '\n';
      return 0;
    }
    if (*scene || *render) {
      auto params = parse_scene_params(sort, encoding, shelves, width, clearance);
      return store.mutate(library, [&](LibraryState& s) {
        const bool discarded = apply_scene_params(s, params);
        if (discarded) err << "note: manual edits were discarded by the re-sort\n";
        if (*scene) {
          out << scene_json(s, palettes, discarded).dump(2) << '\n';
          return 0;
        }
        std::ofstream svg(out_path, std::ios::binary | std::ios::trunc);
        if (!svg) throw std::runtime_error("cannot write " + out_path);
        svg << render_svg(s.current_layout, *s.volumes, s.spec, s.current_mode, palettes, !no_labels);
        out << "wrote " << out_path << " (" << s.current_layout.placements.size() << " placed, "
            << s.current_layout.overflow.size() << " overflow)\n";
        return 0;
      });
    }
    if (*mv) {
      return store.mutate(library, [&](LibraryState& s) {
        apply_move(s, from, to, revision);
        out << scene_json(s, palettes).dump(2) << '\n';
        return 0;
      });
    }
    if (*serve) {
      PipelineContext ctx(PipelineConfig::from_env());
      std::optional<std::filesystem::path> root;
      if (!web_root.empty()) root = web_root;
      Service service(store, ctx, palettes, root);
      out << "listening on http://" << host << ':' << port << std::endl;
      return service.listen(host, port) ? 0 : 1;
    }
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace librarylens
