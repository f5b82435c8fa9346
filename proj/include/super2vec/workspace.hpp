#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "super2vec/lifting.hpp"

namespace super2vec {

// Malformed or unresolvable input. line and column are 1-based, 0 when unknown.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message, std::string pointer = "", int line = 0, int column = 0)
      : std::runtime_error(message), pointer_(std::move(pointer)), line_(line), column_(column) {}
  const std::string& pointer() const { return pointer_; }
  int line() const { return line_; }
  int column() const { return column_; }
  std::string where() const;

 private:
  std::string pointer_;
  int line_;
  int column_;
};

template <class T>
struct NamedImplementation {
  std::string extension;
  Implementation<T> value;
};

template <class T>
struct NamedGroupCocycle {
  NervePtr nerve;
  GCocycle values;
};

template <class T>
struct NamedButterfly {
  AlgebraPtr<T> algebra;     // set for a CSA butterfly
  BimodulePtr<T> bimodule;   // set for a Morita butterfly
};

// Every section maps names to fully built objects; std::map keeps emission sorted.
template <class T>
struct Workspace {
  std::map<std::string, AlgebraPtr<T>> algebras;
  std::map<std::string, NervePtr> nerves;
  std::map<std::string, AbelianCochain> cochains;
  std::map<std::string, BimodulePtr<T>> bimodules;
  std::map<std::string, CMCocycle<T>> cocycles;
  std::map<std::string, BundlePtr<T>> bundles;
  std::map<std::string, SimplicialMap> maps;
  std::map<std::string, BundleMorphism<T>> morphisms;
  std::map<std::string, CentralExtension<T>> extensions;
  std::map<std::string, NamedImplementation<T>> implementations;
  std::map<std::string, NamedGroupCocycle<T>> group_cocycles;
  std::map<std::string, NamedButterfly<T>> butterflies;
};

// "Q" or "Q(i)"; "Q" when the document has no field entry.
std::string document_field(const std::string& text);

template <class T>
Workspace<T> parse_workspace(const std::string& text);

// Explicit form of every object; parsing the result rebuilds the same workspace.
template <class T>
std::string emit_workspace(const Workspace<T>& w);

struct CommandOptions {
  std::uint64_t seed = 1;
  std::string name = "result";  // name of a constructed bundle in the emitted workspace
};

struct CommandResult {
  int exit_code = 0;       // 0 pass, 1 validation failure, 2 input error
  std::string report;      // human-readable
  std::string result;      // JSON object
  std::string workspace;   // input workspace plus constructed objects, when any
};

// args[0] is the subcommand, the rest its operands.
CommandResult run_command(const std::string& text, const std::vector<std::string>& args,
                          const CommandOptions& options = {});

}  // namespace super2vec
