#include "nesy/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "nesy/circuit.hpp"
#include "nesy/compiler.hpp"
#include "nesy/constraints.hpp"
#include "nesy/losses.hpp"
#include "nesy/oracle.hpp"
#include "nesy/queries.hpp"
#include "nesy/text.hpp"

namespace nesy {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot read `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw error("cannot write `" + path + "`");
}

// Comma-separated 1-based variable indices.
std::vector<Var> parse_var_list(const std::string& s) {
  std::vector<Var> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v <= 0 || v > 0xffffffffLL) throw error("bad variable `" + item + "` in list");
    out.push_back(Var{static_cast<std::uint32_t>(v)});
  }
  return out;
}

struct WeightArgs {
  std::string file;
  bool uniform = false;
  std::string names;
  std::string aux;
};

void add_weight_flags(CLI::App* cmd, WeightArgs& w, bool required) {
  auto* opt = cmd->add_option("-w,--weights", w.file, "weights file: `<var> <p>` or `<var> <wpos> <wneg>` lines");
  if (required) opt->required();
  cmd->add_flag("--uniform", w.uniform, "missing variables get (0.5, 0.5)");
  cmd->add_option("--names", w.names, "name table; variables beyond it are auxiliary and names may replace indices");
  cmd->add_option("--aux", w.aux, "comma-separated auxiliary variables");
}

std::vector<Var> aux_vars(const WeightArgs& args, std::uint32_t num_vars, const NameTable* names) {
  std::vector<Var> aux = parse_var_list(args.aux);
  if (names)
    for (std::uint32_t v = names->size() + 1; v <= num_vars; ++v) aux.push_back(Var{v});
  std::sort(aux.begin(), aux.end());
  aux.erase(std::unique(aux.begin(), aux.end()), aux.end());
  for (Var v : aux)
    if (v.index > num_vars) throw error("auxiliary variable " + std::to_string(v.index) + " outside the circuit");
  return aux;
}

LiteralWeights load_weights(const WeightArgs& args, std::uint32_t num_vars) {
  std::optional<NameTable> names;
  if (!args.names.empty()) names = parse_name_table(read_file(args.names));
  WeightsOptions opts;
  opts.uniform_fill = args.uniform;
  opts.aux = aux_vars(args, num_vars, names ? &*names : nullptr);
  std::string text;
  if (!args.file.empty()) text = read_file(args.file);
  if (names) {
    // Substitute a leading variable name by its index.
    std::istringstream in(text);
    std::string line, rewritten;
    while (std::getline(in, line)) {
      std::size_t start = line.find_first_not_of(" \t");
      if (start != std::string::npos && line[start] != '#') {
        std::size_t end = line.find_first_of(" \t", start);
        std::string head = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (auto v = names->find(head)) line = std::to_string(v->index) + (end == std::string::npos ? "" : line.substr(end));
      }
      rewritten += line + '\n';
    }
    text = rewritten;
  }
  return parse_weights(text, num_vars, opts);
}

char kind_code(NodeKind k) {
  switch (k) {
    case NodeKind::constant_false: return 'F';
    case NodeKind::constant_true: return 'T';
    case NodeKind::literal: return 'L';
    case NodeKind::and_gate: return 'A';
    case NodeKind::or_gate: return 'O';
  }
  return '?';
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string id_list(const std::vector<NodeId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"knowledge compiler, weighted model counting and constraint losses", "nesy"};
  app.require_subcommand(1, 1);

  // compile
  std::string cnf_file, dsl_file, order = "most_frequent", fixed, out_file;
  bool no_smooth = false, no_cache = false;
  auto* compile_cmd = app.add_subcommand("compile", "compile CNF or constraint DSL into smooth d-DNNF");
  auto* cnf_opt = compile_cmd->add_option("--cnf", cnf_file, "DIMACS CNF input");
  auto* dsl_opt = compile_cmd->add_option("--dsl", dsl_file, "constraint DSL input (writes OUT.names alongside)");
  cnf_opt->excludes(dsl_opt);
  compile_cmd->add_option("--order", order, "branching heuristic")->check(CLI::IsMember({"most_frequent", "dfs_fixed"}));
  compile_cmd->add_option("--fixed-order", fixed, "comma-separated priority variables for dfs_fixed");
  compile_cmd->add_flag("--no-smooth", no_smooth, "skip smoothing");
  compile_cmd->add_flag("--no-cache", no_cache, "disable the component cache");
  compile_cmd->add_option("-o,--output", out_file, "output NNF file (default stdout)");

  // queries
  std::string circuit_file;
  WeightArgs wargs;
  bool log_space = false, per_node = false;
  std::string grad_of = "wmc";
  auto* wmc_cmd = app.add_subcommand("wmc", "weighted model count");
  auto* entropy_cmd = app.add_subcommand("entropy", "entropy of the constrained distribution (nats)");
  auto* count_cmd = app.add_subcommand("count", "exact model count");
  auto* grad_cmd = app.add_subcommand("grad", "gradient with respect to the variable probabilities");
  for (auto* cmd : {wmc_cmd, entropy_cmd, count_cmd, grad_cmd})
    cmd->add_option("-c,--circuit", circuit_file, "NNF circuit")->required();
  for (auto* cmd : {wmc_cmd, entropy_cmd, grad_cmd}) add_weight_flags(cmd, wargs, false);
  wmc_cmd->add_flag("--log-space", log_space, "print ln(wmc)");
  entropy_cmd->add_flag("--log-space", log_space, "evaluate in log space");
  entropy_cmd->add_flag("--per-node", per_node, "print per-node wmc and entropy");
  grad_cmd->add_option("--of", grad_of, "quantity to differentiate")->check(CLI::IsMember({"wmc", "entropy"}));

  // loss
  std::string batch_file, entropy_kind = "nesy";
  ObjectiveConfig cfg;
  auto* loss_cmd = app.add_subcommand("loss", "semantic loss plus entropy regularizer per batch row");
  loss_cmd->add_option("-c,--circuit", circuit_file, "NNF circuit")->required();
  loss_cmd->add_option("--batch", batch_file, "batch file `batch <B> <n>` then rows")->required();
  loss_cmd->add_option("--w-semantic", cfg.w_semantic, "semantic loss coefficient");
  loss_cmd->add_option("--w-entropy", cfg.w_entropy, "entropy coefficient");
  loss_cmd->add_option("--entropy-kind", entropy_kind, "entropy term")->check(CLI::IsMember({"nesy", "full"}));
  loss_cmd->add_option("--names", wargs.names, "name table; variables beyond it are auxiliary");
  loss_cmd->add_option("--aux", wargs.aux, "comma-separated auxiliary variables");

  // gen
  std::string gen_kind, spec_file;
  std::uint32_t gen_n = 0, rows = 0, cols = 0;
  std::size_t path_cap = GridSpec{}.path_cap;
  auto* gen_cmd = app.add_subcommand("gen", "generate a structured constraint");
  gen_cmd->add_option("--kind", gen_kind, "constraint family")
      ->required()
      ->check(CLI::IsMember({"exactly-one", "total-order", "grid-paths", "ontology"}));
  gen_cmd->add_option("-n", gen_n, "size for exactly-one and total-order");
  gen_cmd->add_option("--rows", rows, "grid rows");
  gen_cmd->add_option("--cols", cols, "grid columns");
  gen_cmd->add_option("--path-cap", path_cap, "grid path enumeration cap");
  gen_cmd->add_option("--spec", spec_file, "ontology spec file");
  gen_cmd->add_option("-o,--output", out_file, "output file (default stdout)");

  // check
  bool exhaustive = false;
  auto* check_cmd = app.add_subcommand("check", "structural property report");
  check_cmd->add_option("-c,--circuit", circuit_file, "NNF circuit")->required();
  check_cmd->add_flag("--exhaustive-determinism", exhaustive, "verify determinism by enumeration (<= 16 vars)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return exit_ok;
    }
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (*compile_cmd) {
      if (cnf_file.empty() && dsl_file.empty()) throw CLI::RequiredError("--cnf or --dsl");
      CompileOptions opts;
      opts.var_order = order == "dfs_fixed" ? VarOrder::dfs_fixed : VarOrder::most_frequent;
      opts.fixed_order = parse_var_list(fixed);
      opts.smooth_output = !no_smooth;
      opts.use_cache = !no_cache;
      CompileStats stats;
      Circuit c = [&] {
        if (!cnf_file.empty()) return compile(parse_dimacs(read_file(cnf_file)), opts, &stats);
        DslParse parsed = parse_constraint_dsl(read_file(dsl_file));
        std::vector<Var> aux;
        Circuit compiled = compile(parsed.formula, parsed.names.size(), opts, &stats, &aux);
        if (!out_file.empty() && out_file != "-") write_output(out_file + ".names", write_name_table(parsed.names), out);
        return compiled;
      }();
      write_output(out_file, write_nnf(c), out);
      err << stats.summary() << '\n';
      return exit_ok;
    }

    if (*gen_cmd) {
      std::string text;
      if (gen_kind == "exactly-one" || gen_kind == "total-order") {
        if (gen_n == 0) throw CLI::RequiredError("-n (positive)");
        text = gen_kind == "exactly-one" ? write_nnf(exactly_one(gen_n)) : write_dimacs(total_order(gen_n));
      } else if (gen_kind == "grid-paths") {
        if (rows == 0 || cols == 0) throw CLI::RequiredError("--rows and --cols (positive)");
        text = write_nnf(grid_simple_paths({rows, cols, path_cap}));
      } else {
        if (spec_file.empty()) throw CLI::RequiredError("--spec");
        text = write_dimacs(ontology_constraint(parse_ontology_spec(read_file(spec_file))));
      }
      write_output(out_file, text, out);
      return exit_ok;
    }

    Circuit c = read_nnf(read_file(circuit_file));

    if (*check_cmd) {
      auto dec = check_decomposable(c);
      auto smo = check_smooth(c);
      auto det = certify_determinism(c);
      out << "nodes=" << c.size() << " edges=" << c.num_edges() << " vars=" << c.num_vars() << '\n';
      out << "decomposable=" << yes_no(dec.ok) << (dec.ok ? "" : " violations=" + id_list(dec.violations)) << '\n';
      out << "smooth=" << yes_no(smo.ok) << (smo.ok ? "" : " violations=" + id_list(smo.violations)) << '\n';
      out << "deterministic_certified=" << yes_no(det.ok) << (det.ok ? "" : " uncertified=" + id_list(det.violations))
          << '\n';
      if (exhaustive) {
        auto bad = oracle::check_determinism_exhaustive(c, 16);
        out << "deterministic_exhaustive=" << (bad.empty() ? "pass" : "fail violations=" + id_list(bad)) << '\n';
      }
      return exit_ok;
    }

    if (*count_cmd) {
      out << model_count(c).str() << '\n';
      return exit_ok;
    }

    if (*loss_cmd) {
      Batch batch = parse_batch(read_file(batch_file));
      if (batch.cols != c.num_vars())
        throw computation_error("batch has " + std::to_string(batch.cols) + " columns, circuit has " +
                                std::to_string(c.num_vars()) + " variables");
      std::optional<NameTable> names;
      if (!wargs.names.empty()) names = parse_name_table(read_file(wargs.names));
      auto aux = aux_vars(wargs, c.num_vars(), names ? &*names : nullptr);
      cfg.entropy_kind = entropy_kind == "full" ? EntropyKind::full : EntropyKind::nesy;
      auto results = combined_objective(c, batch.values, batch.rows, cfg, aux);
      for (std::size_t r = 0; r < results.size(); ++r) out << format_row(r, results[r]) << '\n';
      return exit_ok;
    }

    if (wargs.file.empty() && !wargs.uniform) throw CLI::RequiredError("-w or --uniform");
    LiteralWeights w = load_weights(wargs, c.num_vars());

    if (*wmc_cmd) {
      auto q = wmc(c, w, log_space ? Space::log : Space::linear);
      out << (log_space ? "log_wmc=" : "wmc=") << format_real(q.value) << '\n';
    } else if (*entropy_cmd) {
      auto q = entropy(c, w, {log_space ? Space::log : Space::linear, per_node});
      out << "entropy=" << format_real(q.value) << '\n';
      for (NodeId id = 0; id < q.per_node.size(); ++id)
        out << "node=" << id << " kind=" << kind_code(c.node(id).kind) << (log_space ? " log_wmc=" : " wmc=")
            << format_real(q.per_node[id].wmc) << " entropy=" << format_real(q.per_node[id].entropy) << '\n';
    } else if (*grad_cmd) {
      auto g = grad_of == "entropy" ? entropy_gradient(c, w) : wmc_gradient(c, w);
      out << "grad=" << join_reals(g) << '\n';
    }
    return exit_ok;
  } catch (const CLI::Error& e) {
    err << "error: requires " << e.what() << '\n';
    return exit_usage;
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_parse;
  } catch (const computation_error& e) {
    err << "computation error: " << e.what() << '\n';
    return exit_computation;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

}  // namespace nesy
