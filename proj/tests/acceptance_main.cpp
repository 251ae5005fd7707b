// Prints one line per criterion; exit status is the number of failures.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "clusterdev/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--json" && i + 1 < argc) {
      json_path = argv[++i];
    } else {
      only.push_back(std::atoi(a.c_str()));
    }
  }
  const auto results = clusterdev::run_acceptance(only);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s\n", clusterdev::format_line(r).c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  if (!json_path.empty()) std::ofstream(json_path) << clusterdev::to_json(results).dump(2) << '\n';
  return failed == 0 ? 0 : 1;
}
