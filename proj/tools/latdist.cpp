// latdist: Voronoi-based similarity distances between crystal lattices.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "latdist/latdist.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitComputation = 1;
constexpr int kExitInput = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw latdist::parse_error("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw latdist::parse_error("cannot open output file '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw latdist::parse_error("failed writing to '" + path + "'");
}

std::vector<latdist::LatticeRecord> load_records(const std::string& path) {
  const std::string text = read_file(path);
  std::string ext = fs::path(path).extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".cif")
    return {latdist::parse_cif_cell(text, fs::path(path).stem().string())};
  if (ext == ".json") return latdist::parse_lattice_json(text);
  throw latdist::parse_error("unsupported input extension '" + ext +
                             "' (expected .cif or .json)");
}

std::size_t find_record(const std::vector<latdist::LatticeRecord>& records,
                        const std::string& id) {
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].id == id) return i;
  throw latdist::parse_error("no record with id '" + id + "'");
}

latdist::Metric metric_from_flag(const std::string& name) {
  if (name == "dh") return latdist::Metric::hausdorff;
  if (name == "ds") return latdist::Metric::scale;
  throw latdist::parse_error("unknown metric '" + name + "' (expected dh or ds)");
}

void print_rotation_line(const char* tag, double term,
                         const latdist::RotationSample& r) {
  const double deg = r.angle * 180.0 / std::acos(-1.0);
  std::printf("%s term=%.9f axis=(%.6f,%.6f,%.6f) angle=%.6f\n", tag, term,
              r.axis.x(), r.axis.y(), r.axis.z(), deg);
}

struct CellArgs {
  std::string input;
  int extent = latdist::kDefaultNeighborExtent;
  std::string obj_out;
};

int run_cell(const CellArgs& args) {
  std::vector<latdist::LatticeRecord> records;
  try {
    records = load_records(args.input);
  } catch (const latdist::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  try {
    for (const auto& rec : records) {
      const auto cell = latdist::compute_voronoi_cell(rec.basis, args.extent);
      std::printf("%s vertices=%zu faces=%zu volume=%.6f inradius=%.6f\n",
                  rec.id.c_str(), cell.vertices.size(), cell.faces.size(),
                  latdist::polyhedron_volume(cell), latdist::inradius(cell));
      if (!args.obj_out.empty()) {
        fs::path out(args.obj_out);
        if (records.size() > 1)
          out.replace_filename(out.stem().string() + "_" + rec.id +
                               out.extension().string());
        write_file(out.string(), latdist::export_cell_obj(cell));
      }
    }
  } catch (const latdist::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const latdist::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return 0;
}

struct DistArgs {
  std::string input;
  std::string metric = "dh";
  int n = 3;
  bool refine = false;
  std::vector<std::string> pair;
};

int run_dist(const DistArgs& args) {
  std::vector<latdist::LatticeRecord> records;
  std::size_t i = 0, j = 0;
  try {
    records = load_records(args.input);
    if (args.pair.size() == 2) {
      i = find_record(records, args.pair[0]);
      j = find_record(records, args.pair[1]);
    } else if (records.size() == 2) {
      j = 1;
    } else {
      throw latdist::parse_error(
          "--pair id1 id2 is required unless the input has exactly 2 records");
    }
    metric_from_flag(args.metric);
  } catch (const latdist::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  try {
    const auto grid = latdist::sample_rotations(args.n);
    const latdist::LatticeDistanceResult r =
        metric_from_flag(args.metric) == latdist::Metric::hausdorff
            ? latdist::extended_hausdorff(records[i].basis, records[j].basis,
                                          grid, args.refine)
            : latdist::scale_distance(records[i].basis, records[j].basis, grid,
                                      args.refine);
    std::printf("%s(%s,%s) = %.9f\n", args.metric.c_str(),
                records[i].id.c_str(), records[j].id.c_str(), r.value);
    print_rotation_line("forward:", r.forward_term, r.best_rotation_forward);
    print_rotation_line("backward:", r.backward_term, r.best_rotation_backward);
  } catch (const latdist::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return 0;
}

struct MatrixArgs {
  std::string input;
  std::string metric = "dh";
  int n = 3;
  unsigned threads = 0;
  bool refine = false;
  int extent = latdist::kDefaultNeighborExtent;
  std::string csv_out;
  std::string pgm_out;
};

int run_matrix(const MatrixArgs& args) {
  std::vector<latdist::LatticeRecord> records;
  try {
    records = load_records(args.input);
    if (records.size() < 2)
      throw latdist::parse_error("matrix needs at least 2 records");
    metric_from_flag(args.metric);
  } catch (const latdist::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  try {
    std::vector<std::string> ids;
    std::vector<latdist::LatticeBasis> bases;
    for (const auto& rec : records) {
      ids.push_back(rec.id);
      bases.push_back(rec.basis);
    }
    const auto grid = latdist::sample_rotations(args.n);

    latdist::MatrixOptions opts;
    opts.threads = args.threads;
    opts.refine = args.refine;
    opts.extent = args.extent;
    const std::size_t total = records.size() * (records.size() - 1) / 2;
    const std::size_t step = std::max<std::size_t>(1, total / 10);
    opts.progress = [step](std::size_t done, std::size_t all) {
      if (done % step == 0 || done == all)
        std::fprintf(stderr, "progress: %zu/%zu pairs\n", done, all);
    };

    latdist::MatrixBuildStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = latdist::compute_distance_matrix(
        ids, bases, metric_from_flag(args.metric), grid, opts, &stats);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::fprintf(stderr, "computed %zu pairs over %zu cells in %.2f s\n",
                 stats.pairs_computed, stats.cells_computed, secs);

    const std::string csv = latdist::write_matrix_csv(m);
    if (args.csv_out.empty()) {
      std::fwrite(csv.data(), 1, csv.size(), stdout);
    } else {
      write_file(args.csv_out, csv);
    }
    if (!args.pgm_out.empty())
      write_file(args.pgm_out, latdist::write_pgm(latdist::scale_to_gray(m)));
  } catch (const latdist::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const latdist::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return 0;
}

int run_heatmap(const std::string& csv_path, const std::string& pgm_path) {
  try {
    const auto m = latdist::read_matrix_csv(read_file(csv_path));
    write_file(pgm_path, latdist::write_pgm(latdist::scale_to_gray(m)));
  } catch (const latdist::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "latdist: extended Hausdorff (dh) and scale-invariant (ds) distances\n"
      "between crystal lattices via Voronoi cells and sampled rotations.\n"
      "Flags override environment variables (LATDIST_*), which override\n"
      "defaults."};
  app.require_subcommand(1);

  CellArgs cell_args;
  auto* cell = app.add_subcommand(
      "cell", "compute Voronoi cells and print their combinatorics");
  cell->add_option("input", cell_args.input, "lattice dataset (.json or .cif)")
      ->required();
  cell->add_option("--extent", cell_args.extent, "neighbor shell extent")
      ->envname("LATDIST_EXTENT")
      ->check(CLI::PositiveNumber);
  cell->add_option("--obj", cell_args.obj_out,
                   "write cells as Wavefront OBJ to this path");

  DistArgs dist_args;
  auto* dist = app.add_subcommand(
      "dist", "distance between one pair of lattices");
  dist->add_option("input", dist_args.input, "lattice dataset (.json or .cif)")
      ->required();
  dist->add_option("--metric", dist_args.metric, "dh or ds")
      ->envname("LATDIST_METRIC")
      ->check(CLI::IsMember({"dh", "ds"}));
  dist->add_option("--n", dist_args.n, "rotation grid resolution")
      ->envname("LATDIST_N")
      ->check(CLI::PositiveNumber);
  dist->add_flag("--refine", dist_args.refine,
                 "local rotation refinement around the grid argmin")
      ->envname("LATDIST_REFINE");
  dist->add_option("--pair", dist_args.pair, "ids of the two lattices")
      ->expected(2);

  MatrixArgs matrix_args;
  auto* matrix = app.add_subcommand(
      "matrix", "all-pairs distance matrix (CSV, optional PGM heatmap)");
  matrix->add_option("input", matrix_args.input,
                     "lattice dataset (.json or .cif)")
      ->required();
  matrix->add_option("--metric", matrix_args.metric, "dh or ds")
      ->envname("LATDIST_METRIC")
      ->check(CLI::IsMember({"dh", "ds"}));
  matrix->add_option("--n", matrix_args.n, "rotation grid resolution")
      ->envname("LATDIST_N")
      ->check(CLI::PositiveNumber);
  matrix->add_option("--threads", matrix_args.threads,
                     "worker threads (0 = hardware concurrency)")
      ->envname("LATDIST_THREADS");
  matrix->add_flag("--refine", matrix_args.refine,
                   "local rotation refinement around the grid argmin")
      ->envname("LATDIST_REFINE");
  matrix->add_option("--extent", matrix_args.extent, "neighbor shell extent")
      ->envname("LATDIST_EXTENT")
      ->check(CLI::PositiveNumber);
  matrix->add_option("--out", matrix_args.csv_out,
                     "CSV output path (default: stdout)");
  matrix->add_option("--heatmap", matrix_args.pgm_out,
                     "grayscale PGM heatmap output path");

  std::string heat_in, heat_out;
  auto* heatmap = app.add_subcommand(
      "heatmap", "convert an existing matrix CSV to a grayscale PGM");
  heatmap->add_option("input", heat_in, "matrix CSV path")->required();
  heatmap->add_option("output", heat_out, "PGM output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (cell->parsed()) return run_cell(cell_args);
  if (dist->parsed()) return run_dist(dist_args);
  if (matrix->parsed()) return run_matrix(matrix_args);
  if (heatmap->parsed()) return run_heatmap(heat_in, heat_out);
  return kExitInput;
}
