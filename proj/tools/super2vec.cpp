#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "super2vec/workspace.hpp"

namespace {

const char* kUsage = R"(commands:
  validate [kind] <name>          bundle, cocycle, morphism or implementation
  invariants <bundle>             invariant triple
  classify <bundle> <bundle>      compare invariant triples
  tensor|dsum <bundle> <bundle>   build and validate (named by --name)
  refine <bundle> <map>           pull back along a simplicial map
  hh1|csa|bw <algebra>
  picard-surjectify <algebra>
  transport <butterfly> <cocycle>
  lift <extension> <group_cocycle>
  emit                            canonical explicit form of the workspace
  pipeline pin1 <nerve> <cochain>
The workspace file follows the command (after "pin1" for pipelines).)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super 2-vector bundle toolkit"};
  app.footer(kUsage);
  std::vector<std::string> args;
  std::uint64_t seed = 1;
  std::string output, name = "result";
  app.add_option("args", args, "command, workspace file and operands")->required();
  app.add_option("--seed", seed, "seed for randomized searches")->envname("SUPER2VEC_SEED");
  app.add_option("--name", name, "name of a constructed object");
  app.add_option("-o,--output", output, "write the resulting workspace to this file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const size_t file_at = args[0] == "pipeline" ? 2 : 1;
  if (args.size() <= file_at) {
    std::cerr << "missing workspace file\n" << kUsage << "\n";
    return 2;
  }
  const std::string path = args[file_at];
  args.erase(args.begin() + static_cast<long>(file_at));
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  auto r = super2vec::run_command(text.str(), args, {seed, name});
  std::cout << r.report << "\n```json\n" << r.result << "\n```\n";
  if (!output.empty()) {
    std::ofstream out(output);
    out << (r.workspace.empty() ? text.str() : r.workspace);
    if (!out) {
      std::cerr << "cannot write " << output << "\n";
      return 2;
    }
  }
  return r.exit_code;
}
